#include <cmath>

#include "exode/expression.hpp"

namespace exode {

DomainError::DomainError(const std::string& what, std::string subexpression, Point3 at)
    : std::domain_error(what + " in '" + subexpression + "' at " + to_string(at)),
      sub_(std::move(subexpression)),
      at_(at) {}

UnboundParameter::UnboundParameter(const std::string& name)
    : std::invalid_argument("unbound parameter '" + name + "'") {}

namespace {

using K = Expression::Kind;

struct Evaluator {
  const Point3& at;
  const Bindings& params;

  [[noreturn]] void fail(const char* what, const Expression& e) const {
    throw DomainError(what, print(e), at);
  }

  double operator()(const Expression& e) const {
    switch (e.kind()) {
      case K::Constant:
        return e.value().get_d();
      case K::Variable:
        return at[e.variable()];
      case K::Parameter: {
        auto it = params.find(e.name());
        if (it == params.end()) throw UnboundParameter(e.name());
        return it->second;
      }
      case K::Sum: {
        double s = 0.0;
        for (const auto& o : e.operands()) s += (*this)(o);
        return s;
      }
      case K::Product: {
        double s = 1.0;
        for (const auto& o : e.operands()) s *= (*this)(o);
        return s;
      }
      case K::Quotient: {
        double n = (*this)(e.operand(0));
        double d = (*this)(e.operand(1));
        if (d == 0.0) fail("division by zero", e);
        return check(n / d, e);
      }
      case K::Power:
        return power(e);
      case K::Neg:
        return -(*this)(e.operand(0));
      case K::Function:
        return function(e);
    }
    return 0.0;
  }

  double check(double v, const Expression& e) const {
    if (!std::isfinite(v)) fail("non-finite result", e);
    return v;
  }

  double power(const Expression& e) const {
    const Expression& ex = e.operand(1);
    double b = (*this)(e.operand(0));
    if (ex.is_constant() && ex.value().get_den() == 1) {
      double n = ex.value().get_d();
      if (b == 0.0 && n < 0) fail("division by zero", e);
      return check(std::pow(b, n), e);
    }
    double x = (*this)(ex);
    if (b < 0.0 && std::floor(x) != x) fail("negative base with non-integer exponent", e);
    if (b == 0.0 && x < 0.0) fail("division by zero", e);
    return check(std::pow(b, x), e);
  }

  double function(const Expression& e) const {
    double u = (*this)(e.operand(0));
    switch (e.function()) {
      case Func::Exp:
        return check(std::exp(u), e);
      case Func::Ln:
        if (!(u > 0.0)) fail("logarithm of a non-positive value", e);
        return std::log(u);
      case Func::Sqrt:
        if (u < 0.0) fail("square root of a negative value", e);
        return std::sqrt(u);
      case Func::Sin:
        return std::sin(u);
      case Func::Cos:
        return std::cos(u);
      case Func::Atan:
        return std::atan(u);
    }
    return 0.0;
  }
};

}  // namespace

double evaluate(const Expression& e, const Point3& at, const Bindings& params) {
  return Evaluator{at, params}(e);
}

}  // namespace exode
