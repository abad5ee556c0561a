// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#include "surfhodge/expression.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string_view>

#include "surfhodge/error.hpp"

namespace surfhodge {
namespace {

enum Code {
  kConst,
  kX,
  kY,
  kZ,
  kT,
  kNeg,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kPow,
  kLess,
  kLessEq,
  kGreater,
  kGreaterEq,
  kUnary,  // value holds the function index
  kBinary,
};

using UnaryFn = double (*)(double);
using BinaryFn = double (*)(double, double);

struct UnaryEntry {
  std::string_view name;
  UnaryFn fn;
};
struct BinaryEntry {
  std::string_view name;
  BinaryFn fn;
};

const std::array<UnaryEntry, 16> kUnaryTable{{
    {"sin", [](double a) { return std::sin(a); }},
    {"cos", [](double a) { return std::cos(a); }},
    {"tan", [](double a) { return std::tan(a); }},
    {"asin", [](double a) { return std::asin(a); }},
    {"acos", [](double a) { return std::acos(a); }},
    {"atan", [](double a) { return std::atan(a); }},
    {"sinh", [](double a) { return std::sinh(a); }},
    {"cosh", [](double a) { return std::cosh(a); }},
    {"tanh", [](double a) { return std::tanh(a); }},
    {"exp", [](double a) { return std::exp(a); }},
    {"log", [](double a) { return std::log(a); }},
    {"sqrt", [](double a) { return std::sqrt(a); }},
    {"abs", [](double a) { return std::abs(a); }},
    {"floor", [](double a) { return std::floor(a); }},
    {"ceil", [](double a) { return std::ceil(a); }},
    {"step", [](double a) { return a >= 0.0 ? 1.0 : 0.0; }},
}};

const std::array<BinaryEntry, 4> kBinaryTable{{
    {"atan2", [](double a, double b) { return std::atan2(a, b); }},
    {"min", [](double a, double b) { return std::fmin(a, b); }},
    {"max", [](double a, double b) { return std::fmax(a, b); }},
    {"pow", [](double a, double b) { return std::pow(a, b); }},
}};

class Parser {
 public:
  Parser(std::string_view text, std::vector<Expression::Op>& out) : s_(text), out_(out) {}

  void run() {
    comparison();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
  }

  bool uses_time = false;

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(Errc::ConfigError,
                "expression '" + std::string(s_) + "' at position " + std::to_string(pos_) + ": " + msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(std::string_view tok) {
    skip();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void emit(int code, double value = 0.0) { out_.push_back({code, value}); }

  void comparison() {
    sum();
    int code = -1;
    if (accept("<=")) code = kLessEq;
    else if (accept(">=")) code = kGreaterEq;
    else if (accept("<")) code = kLess;
    else if (accept(">")) code = kGreater;
    if (code < 0) return;
    sum();
    emit(code);
  }

  void sum() {
    product();
    for (;;) {
      if (accept("+")) {
        product();
        emit(kAdd);
      } else if (accept("-")) {
        product();
        emit(kSub);
      } else {
        return;
      }
    }
  }

  void product() {
    unary();
    for (;;) {
      if (accept("*")) {
        unary();
        emit(kMul);
      } else if (accept("/")) {
        unary();
        emit(kDiv);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (accept("-")) {
      unary();
      emit(kNeg);
    } else if (accept("+")) {
      unary();
    } else {
      power();
    }
  }

  void power() {
    atom();
    if (accept("^")) {
      unary();
      emit(kPow);
    }
  }

  void atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      comparison();
      if (!accept(")")) fail("expected ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::string rest(s_.substr(pos_));
      char* end = nullptr;
      const double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) fail("bad number");
      pos_ += static_cast<std::size_t>(end - rest.c_str());
      emit(kConst, v);
      return;
    }
    if (!std::isalpha(static_cast<unsigned char>(c))) fail("unexpected '" + std::string(1, c) + "'");
    std::size_t end = pos_;
    while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) ++end;
    const std::string_view name = s_.substr(pos_, end - pos_);
    pos_ = end;
    if (accept("(")) {
      for (std::size_t i = 0; i < kUnaryTable.size(); ++i) {
        if (kUnaryTable[i].name != name) continue;
        comparison();
        if (!accept(")")) fail("expected ')' after argument of " + std::string(name));
        emit(kUnary, static_cast<double>(i));
        return;
      }
      for (std::size_t i = 0; i < kBinaryTable.size(); ++i) {
        if (kBinaryTable[i].name != name) continue;
        comparison();
        if (!accept(",")) fail(std::string(name) + " takes two arguments");
        comparison();
        if (!accept(")")) fail("expected ')' after arguments of " + std::string(name));
        emit(kBinary, static_cast<double>(i));
        return;
      }
      fail("unknown function " + std::string(name));
    }
    if (name == "x") emit(kX);
    else if (name == "y") emit(kY);
    else if (name == "z") emit(kZ);
    else if (name == "t") {
      emit(kT);
      uses_time = true;
    } else if (name == "pi") emit(kConst, std::numbers::pi);
    else if (name == "e") emit(kConst, std::numbers::e);
    else fail("unknown variable " + std::string(name));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::vector<Expression::Op>& out_;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.text_ = text;
  Parser p(text, e.program_);
  p.run();
  e.uses_time_ = p.uses_time;
  return e;
}

double Expression::operator()(const Vec3& x, double t) const {
  if (program_.empty()) return 0.0;
  std::vector<double> stack(program_.size());
  std::size_t top = 0;
  auto push = [&](double v) { stack[top++] = v; };
  for (const Op& op : program_) {
    double b;
    switch (op.code) {
      case kConst: push(op.value); break;
      case kX: push(x.x()); break;
      case kY: push(x.y()); break;
      case kZ: push(x.z()); break;
      case kT: push(t); break;
      case kNeg: stack[top - 1] = -stack[top - 1]; break;
      case kUnary: stack[top - 1] = kUnaryTable[static_cast<std::size_t>(op.value)].fn(stack[top - 1]); break;
      default:
        b = stack[--top];
        double& a = stack[top - 1];
        switch (op.code) {
          case kAdd: a += b; break;
          case kSub: a -= b; break;
          case kMul: a *= b; break;
          case kDiv: a /= b; break;
          case kPow: a = std::pow(a, b); break;
          case kLess: a = a < b ? 1.0 : 0.0; break;
          case kLessEq: a = a <= b ? 1.0 : 0.0; break;
          case kGreater: a = a > b ? 1.0 : 0.0; break;
          case kGreaterEq: a = a >= b ? 1.0 : 0.0; break;
          case kBinary: a = kBinaryTable[static_cast<std::size_t>(op.value)].fn(a, b); break;
        }
    }
  }
  return stack[0];
}

}  // namespace surfhodge
