#pragma once

#include <array>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "exode/expression.hpp"
#include "exode/zero_test.hpp"

namespace exode {

/// a2(x,y,p) y'' + a1(x,y,p) y' + a0(x,y,p) = 0
struct SecondOrderOde {
  Expression a2;
  Expression a1;
  Expression a0;
  Bindings params;

  /// Throws std::invalid_argument when a2 simplifies to zero.
  SecondOrderOde(Expression a2, Expression a1, Expression a0, Bindings params = {});

  /// y'' = -(a1 p + a0) / a2 at a point.
  double second_derivative(const Point3& at) const;
  std::vector<std::string> parameter_names() const;
  /// Copy with every coefficient multiplied by `mu` and simplified.
  SecondOrderOde scaled(const Expression& mu) const;
};

enum class Exactness { Exact, UndeterminedSampled, NotExact };
std::string_view to_string(Exactness e);

struct ExactnessReport {
  /// r1 = d(a2)/dy - d(a1)/dp, r2 = d(a2)/dx - d(a0)/dp, r3 = d(a1)/dx - d(a0)/dy
  std::array<Expression, 3> residuals;
  std::array<ZeroVerdict, 3> verdicts;
  Exactness overall = Exactness::NotExact;

  /// Exact or UndeterminedSampled.
  bool is_exact() const { return overall != Exactness::NotExact; }
};

/// Sampler configuration with the ode's parameter values merged in.
SamplerConfig with_params(const SamplerConfig& cfg, const Bindings& params);

ExactnessReport check_exact(const SecondOrderOde& ode, const SamplerConfig& cfg = {});

class NotExactError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SingularBasePoint : public std::domain_error {
 public:
  SingularBasePoint(const std::string& leg, const Point3& base);
  const std::string& leg() const { return leg_; }

 private:
  std::string leg_;
};

/// Potential built by integrating along three coordinate segments from the
/// base point: first x (at the final y, p), then y (at x0), then p (at x0, y0).
/// Each leg is symbolic when possible, else adaptive quadrature.
class FirstIntegral {
 public:
  struct Leg {
    Var var;
    /// Integrand as a function of the leg variable (other coordinates
    /// already fixed where the path requires it).
    Expression integrand;
    /// Definite integral from the base coordinate, when symbolic.
    std::optional<Expression> antiderivative;
  };

  double operator()(const Point3& at) const;
  const std::optional<Expression>& closed_form() const { return closed_; }
  bool is_closed_form() const { return closed_.has_value(); }
  const Point3& base() const { return base_; }
  const Bindings& params() const { return params_; }
  const std::array<Leg, 3>& legs() const { return legs_; }
  /// Copy evaluating with different parameter values.
  FirstIntegral with_params(const Bindings& params) const;

 private:
  friend FirstIntegral potential(const Expression&, const Expression&, const Expression&,
                                 const Point3&, const Bindings&);
  std::array<Leg, 3> legs_;
  std::optional<Expression> closed_;
  Point3 base_;
  Bindings params_;
};

/// Potential of the field (fx, fy, fp), assumed curl-free. Throws
/// SingularBasePoint when a leg cannot start at `base`.
FirstIntegral potential(const Expression& fx, const Expression& fy, const Expression& fp,
                        const Point3& base, const Bindings& params);

/// Throws NotExactError unless check_exact passes.
FirstIntegral build_first_integral(const SecondOrderOde& ode, const Point3& base,
                                   const SamplerConfig& cfg = {});
/// Same, trying the default base points in order until one is regular.
FirstIntegral build_first_integral(const SecondOrderOde& ode, const SamplerConfig& cfg = {});

/// Base points tried when none is given: (0,0,0) first.
std::vector<Point3> default_base_points();

struct ReducedOde {
  FirstIntegral psi;
  /// Level fixed by initial data.
  std::optional<double> level;
  /// Name of the symbolic level when none is fixed.
  std::string level_symbol = "c";
  /// psi - c, when psi has a closed form.
  std::optional<Expression> implicit_form;
  /// p = f(x, y), present when psi is affine in p.
  std::optional<Expression> explicit_p;
  SecondOrderOde parent;
};

ReducedOde reduce(const SecondOrderOde& ode, const std::optional<Point3>& initial,
                  const std::optional<Point3>& base = std::nullopt, const SamplerConfig& cfg = {});

}  // namespace exode
