#pragma once

#include <functional>
#include <optional>
#include <stdexcept>

#include "exode/expression.hpp"

namespace exode {

/// Antiderivative of `e` with respect to `v`, treating the other symbols as
/// constants. Supported: polynomials in v with arbitrary coefficients, and
/// rational functions of v whose denominator splits over the coefficient
/// field into linear factors (any multiplicity) and, for purely numeric
/// denominators, irreducible quadratics (simple). Logarithms are written as
/// ln(f) with f normalized to a positive leading coefficient in v.
/// Returns nullopt outside that class.
std::optional<Expression> integrate_symbolic(const Expression& e, Var v);

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
/// Throws QuadratureError when the error estimate exceeds `abs_tol`
/// (relaxed relative to the size of the result).
double integrate_numeric(const std::function<double(double)>& f, double a, double b,
                         double abs_tol = 1e-10);

}  // namespace exode
