#pragma once

#include "riemann_kit/types.hpp"

#include <map>
#include <memory>

namespace riemann_kit {

/// Small arithmetic expression grammar: + - * / ^, unary minus, parentheses,
/// numbers, named constants (pi, e, i), variables, and the functions sqrt,
/// exp, log, sin, cos, tan, sinh, cosh, tanh, asin, acos, atan, sech, abs.
/// Parsed to an AST that evaluates over double or complex and differentiates
/// symbolically with respect to a named variable.
class Expr {
 public:
  /// Throws InputError with the 0-based position on parse failure.
  static Expr parse(const std::string& text);

  double eval(const std::map<std::string, double>& vars) const;
  Complex eval_complex(const std::map<std::string, Complex>& vars) const;
  Expr derivative(const std::string& var) const;
  std::string str() const;

  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  explicit Expr(NodePtr root) : root_(std::move(root)) {}
  Expr() = default;

 private:
  NodePtr root_;
};

}  // namespace riemann_kit
