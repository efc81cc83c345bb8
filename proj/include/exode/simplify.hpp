#pragma once

#include <unordered_map>
#include <vector>

#include "exode/expression.hpp"
#include "exode/poly.hpp"

namespace exode {

/// Canonical form: the expression is rewritten as a reduced rational function
/// whose variables are "kernels" (x, y, p, parameters, and function
/// applications or fractional powers with canonical arguments). Rational
/// identities are therefore decided exactly. Idempotent.
///
/// Rules applied to kernels: exp of a sum splits into a product, exp(c*ln(u))
/// becomes u^c, ln(exp(u)) becomes u, sqrt(u)^2 becomes u, constant folding of
/// exp(0), ln(1), sin(0), cos(0), atan(0) and square roots of rational squares.
/// A quotient whose denominator simplifies to zero is returned unchanged.
Expression simplify(const Expression& e);

/// Conversion between expressions and rational functions over a kernel
/// table. Kernel ids are assigned in discovery order.
class Canonicalizer {
 public:
  /// Throws DivisionByZero when a denominator is identically zero.
  RatFunc convert(const Expression& e);

  /// Rewrites powers of radical kernels (k = w^(a/b), k^b = w^a).
  RatFunc reduce_radicals(const RatFunc& r);

  int intern(const Expression& kernel);
  /// -1 when absent.
  int find(const Expression& kernel) const;
  const std::vector<Expression>& kernels() const { return kernels_; }
  const Expression& kernel(int id) const { return kernels_[static_cast<std::size_t>(id)]; }

  /// Rebuild an expression; terms are ordered canonically by kernel key.
  Expression to_expression(const Poly& p) const;
  Expression to_expression(const RatFunc& r) const;

  /// Permutation mapping kernel ids to their rank in canonical key order.
  std::vector<int> canonical_ranks() const;

 private:
  RatFunc convert_power(const Expression& e);
  RatFunc convert_function(const Expression& e);
  RatFunc convert_exp(const Expression& arg);
  RatFunc kernel_poly(const Expression& k) { return RatFunc(Poly::variable(intern(k))); }

  std::vector<Expression> kernels_;
  std::unordered_map<Expression, int, ExpressionHash> ids_;
};

/// Sort key of a kernel: x < y < p < parameters < everything else.
std::string kernel_key(const Expression& k);

}  // namespace exode
