// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#include "surfhodge/flow.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "surfhodge/error.hpp"
#include "surfhodge/output.hpp"

namespace surfhodge {

BlockSystem build_reduced_system(const SparseMatrix& A, const Eigen::VectorXd& b, const SparseMatrix& E,
                                 const Eigen::MatrixXd& H, const Eigen::VectorXd& gauge) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || b.size() != n || E.rows() != n || (H.cols() > 0 && H.rows() != n))
    throw Error(Errc::DimensionMismatch, "reduced system: operator, load and embedding disagree");
  if (gauge.size() != 0 && gauge.size() != E.cols())
    throw Error(Errc::DimensionMismatch, "reduced system: gauge vector has wrong length");
  BlockSystem sys;
  const SparseMatrix Et = E.transpose();
  sys.A_SS = Et * A * E;
  sys.A_SS.prune(0.0);
  const Eigen::MatrixXd AH = A * H;
  const Eigen::MatrixXd AtH = SparseMatrix(A.transpose()) * H;
  sys.A_SH = Et * AH;
  sys.A_HS = (Et * AtH).transpose();
  sys.A_HH = H.transpose() * AH;
  sys.b_S = Et * b;
  sys.b_H = H.transpose() * b;
  sys.gauge = gauge;
  return sys;
}

namespace {

FactorizedOperator factorize_streamfunction_block(const BlockSystem& sys) {
  if (sys.gauge.size() != 0) return FactorizedOperator(bordered(sys.A_SS, sys.gauge), FactorKind::SymmetricIndefinite);
  const FactorKind kind = symmetry_defect(sys.A_SS) <= 1e-12 ? FactorKind::SPD : FactorKind::SymmetricIndefinite;
  return FactorizedOperator(sys.A_SS, kind);
}

}  // namespace

SchurSolver::SchurSolver(const BlockSystem& sys)
    : n_s_(sys.n_s()), n_h_(sys.n_h()), gauged_(sys.gauge.size() != 0), op_(factorize_streamfunction_block(sys)) {
  if (sys.A_SH.rows() != n_s_ || sys.A_SH.cols() != n_h_ || sys.A_HS.rows() != n_h_ || sys.A_HS.cols() != n_s_)
    throw Error(Errc::DimensionMismatch, "block sizes disagree");
  A_HS_ = sys.A_HS;
  Z_.resize(n_s_, n_h_);
  for (int j = 0; j < n_h_; ++j) Z_.col(j) = solve_sparse(sys.A_SH.col(j));
  S_HH_ = sys.A_HH - A_HS_ * Z_;
  if (n_h_ > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S_HH_);
    const auto& s = svd.singularValues();
    const double scale = std::max({s(0), sys.A_HH.norm(), std::numeric_limits<double>::min()});
    if (s(n_h_ - 1) <= 1e-12 * scale)
      throw Error(Errc::SingularSchur, "harmonic Schur complement is numerically singular");
    schur_lu_.compute(S_HH_);
  }
}

Eigen::VectorXd SchurSolver::solve_sparse(const Eigen::VectorXd& rhs) const {
  if (!gauged_) return op_.solve(rhs);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n_s_ + 1);
  b.head(n_s_) = rhs;
  return op_.solve(b).head(n_s_);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> SchurSolver::solve(const Eigen::VectorXd& b_S,
                                                               const Eigen::VectorXd& b_H) const {
  if (b_S.size() != n_s_ || b_H.size() != n_h_) throw Error(Errc::DimensionMismatch, "right-hand side blocks disagree");
  const Eigen::VectorXd y = solve_sparse(b_S);
  Eigen::VectorXd x_H = Eigen::VectorXd::Zero(n_h_);
  if (n_h_ > 0) x_H = schur_lu_.solve(Eigen::VectorXd(b_H - A_HS_ * y));
  Eigen::VectorXd x_S = y - Z_ * x_H;
  if (!x_S.allFinite() || !x_H.allFinite()) throw Error(Errc::SolverFailure, "Schur solve produced non-finite values");
  return {std::move(x_S), std::move(x_H)};
}

SchurResult schur_solve(const BlockSystem& sys) {
  const SchurSolver solver(sys);
  auto [x_S, x_H] = solver.solve(sys.b_S, sys.b_H);
  return {std::move(x_S), std::move(x_H), solver.sparse_solves()};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> monolithic_solve(const BlockSystem& sys) {
  const int ns = sys.n_s(), nh = sys.n_h();
  const int ng = sys.gauge.size() != 0 ? 1 : 0;
  const SparseMatrix SH = sys.A_SH.sparseView(0.0, 0.0);
  const SparseMatrix HS = sys.A_HS.sparseView(0.0, 0.0);
  const SparseMatrix HH = sys.A_HH.sparseView(0.0, 0.0);
  SparseMatrix g(ns, ng);
  for (int i = 0; ng && i < ns; ++i)
    if (sys.gauge(i) != 0.0) g.insert(i, 0) = sys.gauge(i);
  const SparseMatrix gt = g.transpose();
  const SparseMatrix K = block_matrix({{&sys.A_SS, &SH, &g}, {&HS, &HH, nullptr}, {&gt, nullptr, nullptr}},
                                      {ns, nh, ng}, {ns, nh, ng});
  Eigen::VectorXd b = Eigen::VectorXd::Zero(ns + nh + ng);
  b.head(ns) = sys.b_S;
  b.segment(ns, nh) = sys.b_H;
  const Eigen::VectorXd x = FactorizedOperator(K, FactorKind::SymmetricIndefinite).solve(b);
  return {x.head(ns), x.segment(ns, nh)};
}

void validate(const FlowConfig& c) {
  if (c.k < 0) throw Error(Errc::ConfigError, "k must be nonnegative");
  if (c.mu < 0) throw Error(Errc::NonpositiveParameter, "viscosity must be nonnegative");
  if (c.mu == 0 && !c.allow_inviscid)
    throw Error(Errc::ConfigError, "zero viscosity requires allow_inviscid = true");
  if (c.alpha < 0) throw Error(Errc::NonpositiveParameter, "penalty must be positive");
  if (!(c.dt > 0)) throw Error(Errc::NonpositiveParameter, "time step must be positive");
  if (c.t_end < 0) throw Error(Errc::ConfigError, "end time must be nonnegative");
  if (c.output_every < 1) throw Error(Errc::ConfigError, "output_every must be at least 1");
  if (!(c.cfl > 0)) throw Error(Errc::NonpositiveParameter, "CFL factor must be positive");
}

double penalty(const FlowConfig& c) { return c.alpha > 0 ? c.alpha : default_penalty(c.k); }

SparseMatrix viscous_operator(const HodgeContext& ctx, const FlowConfig& config) {
  validate(config);
  if (config.mu == 0) return SparseMatrix(ctx.V().num_dofs(), ctx.V().num_dofs());
  return assemble_sip(ctx.V(), config.mu, penalty(config), config.wall);
}

FlowState make_state(const HodgeContext& ctx, const HarmonicBasis& basis, double t, Eigen::VectorXd psi,
                     Eigen::VectorXd h) {
  FlowState s;
  s.t = t;
  s.u = ctx.embedding() * psi;
  for (int i = 0; i < basis.size(); ++i) s.u += h(i) * basis.fields[i];
  s.psi = std::move(psi);
  s.h = std::move(h);
  s.kinetic_energy = 0.5 * s.u.dot(ctx.mass() * s.u);
  return s;
}

namespace {

Eigen::VectorXd gauge_of(const HodgeContext& ctx) { return ctx.closed() ? ctx.s_mean() : Eigen::VectorXd(); }

// Dense solve in the reduced coordinates that removes the numerical kernel.
ReducedSolution dense_kernel_solve(const HodgeContext& ctx, const HarmonicBasis& basis, const SparseMatrix& A,
                                   const Eigen::VectorXd& F, const FlowConfig& config) {
  const int ns = ctx.S().num_dofs(), nh = basis.size();
  const int keep = ctx.closed() ? ns - 1 : ns;  // drop one streamfunction dof: E 1 = 0
  if (keep + nh > config.dense_limit)
    throw Error(Errc::SingularOperator, "reduced operator is singular and too large for the dense kernel search");
  if (symmetry_defect(A) > 1e-12) throw Error(Errc::SingularOperator, "singular nonsymmetric reduced operator");
  Eigen::MatrixXd T(ctx.V().num_dofs(), keep + nh);
  T.leftCols(keep) = Eigen::MatrixXd(ctx.embedding()).leftCols(keep);
  if (nh > 0) T.rightCols(nh) = basis.matrix();
  const Eigen::MatrixXd AT = A * T;
  Eigen::MatrixXd Ar = T.transpose() * AT;
  Ar = 0.5 * (Ar + Ar.transpose()).eval();
  Eigen::MatrixXd Mr = T.transpose() * (ctx.mass() * T);
  Mr = 0.5 * (Mr + Mr.transpose()).eval();
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(Ar, Mr);
  if (eig.info() != Eigen::Success) throw Error(Errc::SingularOperator, "generalized eigensolver failed");
  const Eigen::VectorXd& lam = eig.eigenvalues();
  const Eigen::MatrixXd& X = eig.eigenvectors();
  const double top = lam.cwiseAbs().maxCoeff();
  const Eigen::VectorXd br = T.transpose() * F;
  ReducedSolution out;
  out.dense_fallback = true;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(keep + nh);
  for (int i = 0; i < lam.size(); ++i) {
    if (std::abs(lam(i)) <= config.kernel_tol * top) {
      out.kernel.push_back(T * X.col(i));
      continue;
    }
    x += X.col(i) * (X.col(i).dot(br) / lam(i));
  }
  if (out.kernel.empty()) throw Error(Errc::SingularOperator, "operator is singular but no kernel was detected");
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(ns);
  psi.head(keep) = x.head(keep);
  if (ctx.closed()) psi.array() -= ctx.s_mean().dot(psi) / ctx.s_mean().sum();
  out.state = make_state(ctx, basis, 0.0, std::move(psi), x.tail(nh));
  return out;
}

}  // namespace

ReducedSolution solve_stokes_reduced(const HodgeContext& ctx, const HarmonicBasis& basis, const SparseMatrix& A,
                                     const Eigen::VectorXd& F, const FlowConfig& config) {
  check_basis(ctx, basis);
  const BlockSystem sys = build_reduced_system(A, F, ctx.embedding(), basis.matrix(), gauge_of(ctx));
  try {
    const SchurResult r = schur_solve(sys);
    ReducedSolution out;
    out.state = make_state(ctx, basis, 0.0, r.x_S, r.x_H);
    out.sparse_solves = r.sparse_solves;
    return out;
  } catch (const Error& e) {
    switch (e.code()) {
      case Errc::SingularMatrix:
      case Errc::NotSPD:
      case Errc::SingularSchur:
      case Errc::SolverFailure: return dense_kernel_solve(ctx, basis, A, F, config);
      default: throw;
    }
  }
}

SaddleSolution solve_stokes_saddle(const HodgeContext& ctx, const SparseMatrix& A, const Eigen::VectorXd& F,
                                   const std::vector<Eigen::VectorXd>& kernel) {
  const int nv = ctx.V().num_dofs(), nq = ctx.Q().num_dofs(), nk = static_cast<int>(kernel.size());
  if (A.rows() != nv || A.cols() != nv || F.size() != nv)
    throw Error(Errc::DimensionMismatch, "saddle system dimensions disagree");
  const SparseMatrix base = ctx.saddle_matrix(A);
  Eigen::MatrixXd C(nv, nk);
  for (int j = 0; j < nk; ++j) C.col(j) = ctx.mass() * kernel[j];
  const int nb = nv + nq + 1;
  SparseMatrix Cfull(nb, nk);
  {
    std::vector<Eigen::Triplet<double>> trips;
    for (int j = 0; j < nk; ++j)
      for (int i = 0; i < nv; ++i)
        if (C(i, j) != 0.0) trips.emplace_back(i, j, C(i, j));
    Cfull.setFromTriplets(trips.begin(), trips.end());
  }
  const SparseMatrix Ct = Cfull.transpose();
  const SparseMatrix K = block_matrix({{&base, &Cfull}, {&Ct, nullptr}}, {nb, nk}, {nb, nk});
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nb + nk);
  b.head(nv) = F;
  const Eigen::VectorXd x = FactorizedOperator(K, FactorKind::SymmetricIndefinite).solve(b);
  return {x.head(nv), x.segment(nv, nq)};
}

Eigen::VectorXd reconstruct_pressure(const HodgeContext& ctx, const SparseMatrix& A, const Eigen::VectorXd& F,
                                     const Eigen::VectorXd& u) {
  return ctx.solve_mixed(F - A * u).second;
}

Eigen::VectorXd gradient_load(const HodgeContext& ctx, const Eigen::VectorXd& q) {
  if (q.size() != ctx.Q().num_dofs()) throw Error(Errc::DimensionMismatch, "pressure vector has wrong length");
  return ctx.div().transpose() * q;
}

double max_speed(const FeField& u) {
  const SurfaceMesh& mesh = u.space().mesh();
  const std::array<Eigen::Vector2d, 4> pts = {Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1),
                                              Eigen::Vector2d(1.0 / 3, 1.0 / 3)};
  double m = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (const auto& p : pts) m = std::max(m, evaluate_vector(u, t, p).norm());
  return m;
}

NavierStokesStepper::NavierStokesStepper(const HodgeContext& ctx, const HarmonicBasis& basis, const FlowConfig& config)
    : ctx_(ctx), basis_(basis), config_(config) {
  validate(config);
  check_basis(ctx, basis);
  if (config.k != ctx.k()) throw Error(Errc::DegreeMismatch, "configuration degree differs from the context");
  A_ = viscous_operator(ctx, config);
  H_ = basis.matrix();
  h_min_ = ctx.mesh().min_edge_length();
  const SparseMatrix L = SparseMatrix(ctx.mass() / config.dt) + A_;
  const BlockSystem sys =
      build_reduced_system(L, Eigen::VectorXd::Zero(L.rows()), ctx.embedding(), H_, gauge_of(ctx));
  schur_ = std::make_unique<SchurSolver>(sys);
}

double NavierStokesStepper::cfl_limit(const Eigen::VectorXd& u) const {
  const double speed = max_speed(FeField(ctx_.V(), u));
  return speed > 0 ? config_.cfl * h_min_ / speed : std::numeric_limits<double>::infinity();
}

FlowState NavierStokesStepper::step(const FlowState& state, const Eigen::VectorXd& F) {
  const double limit = cfl_limit(state.u);
  if (config_.dt > limit) {
    ++cfl_warnings_;
    if (warn_) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "t=%.6g: dt=%.3g exceeds the convective limit %.3g", state.t, config_.dt, limit);
      warn_(buf);
    }
  }
  if (!F.allFinite() || !state.u.allFinite())
    throw Error(Errc::NaNDetected, "non-finite load or state at t=" + std::to_string(state.t));
  const SparseMatrix& M = ctx_.mass();
  Eigen::VectorXd rhs = M * state.u / config_.dt + F;
  if (state.u.squaredNorm() > 0) {
    const SparseMatrix C = assemble_convection(ctx_.V(), FeField(ctx_.V(), state.u));
    rhs -= C * state.u;
  }
  const Eigen::VectorXd b_S = ctx_.embedding().transpose() * rhs;
  const Eigen::VectorXd b_H = H_.transpose() * rhs;
  auto [x_S, x_H] = schur_->solve(b_S, b_H);
  FlowState next = make_state(ctx_, basis_, state.t + config_.dt, std::move(x_S), std::move(x_H));
  if (!next.u.allFinite() || !std::isfinite(next.kinetic_energy))
    throw Error(Errc::NaNDetected, "non-finite velocity at t=" + std::to_string(next.t));
  return next;
}

std::string series_csv_header(int b1) {
  std::string h = "step,t,kinetic_energy,harmonic_norm,rot_norm,div_norm";
  for (int i = 0; i < b1; ++i) h += ",h" + std::to_string(i);
  return h;
}

std::string series_csv_row(const SeriesRow& r) {
  std::ostringstream out;
  out.precision(17);
  out << r.step << ',' << r.t << ',' << r.kinetic_energy << ',' << r.harmonic_norm << ',' << r.rot_norm << ','
      << r.div_norm;
  for (int i = 0; i < r.h.size(); ++i) out << ',' << r.h(i);
  return out.str();
}

SimulationResult run_simulation(const HodgeContext& ctx, const HarmonicBasis& basis, const FlowConfig& config,
                                const ForcingLoad& forcing, const SimulationOptions& options) {
  validate(config);
  NavierStokesStepper stepper(ctx, basis, config);
  if (options.warn) stepper.set_warning_handler(options.warn);
  FlowState state;
  if (options.initial) {
    state = *options.initial;
  } else {
    if (config.mu == 0) throw Error(Errc::ConfigError, "an inviscid run needs an explicit initial state");
    state = solve_stokes_reduced(ctx, basis, stepper.viscous(), forcing(0.0), config).state;
  }
  const long steps = std::lround(config.t_end / config.dt);
  SimulationResult result;
  std::ofstream csv;
  const bool write = !options.out_dir.empty();
  if (write) {
    std::filesystem::create_directories(options.out_dir);
    const auto path = options.out_dir / (options.prefix + "_series.csv");
    csv.open(path);
    if (!csv) throw Error(Errc::IoError, "cannot write " + path.string());
    csv << series_csv_header(basis.size()) << '\n';
    result.files.push_back(path);
  }
  auto record = [&](long step) {
    SeriesRow row;
    row.step = static_cast<int>(step);
    row.t = state.t;
    row.kinetic_energy = state.kinetic_energy;
    row.h = state.h;
    row.harmonic_norm = state.h.norm();
    row.rot_norm = m_norm(ctx.mass(), ctx.embedding() * state.psi);
    row.div_norm = divergence_norm(FeField(ctx.V(), state.u));
    result.series.push_back(row);
    if (!write) return;
    csv << series_csv_row(row) << '\n';
    if (step % config.output_every != 0 && step != steps) return;
    char name[64];
    std::snprintf(name, sizeof(name), "_%06ld.vtk", step);
    const auto path = options.out_dir / (options.prefix + name);
    const Eigen::VectorXd rot = ctx.embedding() * state.psi;
    write_vtk(path, ctx.mesh(),
              {{"u", centroid_values(FeField(ctx.V(), state.u))},
               {"u_rot", centroid_values(FeField(ctx.V(), rot))},
               {"u_harm", centroid_values(FeField(ctx.V(), Eigen::VectorXd(state.u - rot)))}},
              {{"psi", vertex_values(FeField(ctx.S(), state.psi))}});
    result.files.push_back(path);
  };
  record(0);
  for (long n = 1; n <= steps; ++n) {
    state = stepper.step(state, forcing(state.t + config.dt));
    record(n);
  }
  result.final_state = state;
  result.cfl_warnings = stepper.cfl_warnings();
  return result;
}

}  // namespace surfhodge
