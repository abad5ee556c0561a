// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "surfhodge/mesh.hpp"

namespace surfhodge {

/// Arithmetic expression over x, y, z and t.
///
///   numbers, pi, e, x, y, z, t
///   + - * / ^ (right associative), unary -, parentheses
///   < <= > >= (1 or 0)
///   sin cos tan asin acos atan sinh cosh tanh exp log sqrt abs floor ceil
///   step (1 for arguments >= 0, else 0), atan2 min max pow
///
/// Parse errors throw ConfigError with the offending position.
class Expression {
 public:
  Expression() = default;
  static Expression parse(const std::string& text);

  double operator()(const Vec3& x, double t = 0.0) const;

  bool uses_time() const { return uses_time_; }
  const std::string& text() const { return text_; }

  struct Op {
    int code = 0;
    double value = 0.0;
  };

 private:
  std::string text_;
  std::vector<Op> program_;  // postfix
  bool uses_time_ = false;
};

}  // namespace surfhodge
