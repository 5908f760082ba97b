#pragma once

// Small arithmetic expression language for source terms in configs:
// numbers, pi, variables x y z r, + - * / ^, unary minus, parentheses and
// the functions sin cos tan exp log sqrt abs atan min max pow.

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace symcomp {

class ExpressionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExprVars {
  double x = 0.0, y = 0.0, z = 0.0, r = 0.0;
};

class Expression {
 public:
  struct Node;
  /// Throws ExpressionError with the offending column on malformed input.
  static Expression parse(std::string_view text);
  double operator()(const ExprVars& v) const;
  const std::string& text() const { return text_; }
  /// True when the expression does not use x, y or z.
  bool radial_only() const { return radial_only_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
  bool radial_only_ = true;
};

}  // namespace symcomp
