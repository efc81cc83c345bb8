#include "exode/exactness.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "exode/integrate.hpp"
#include "exode/simplify.hpp"

namespace exode {

namespace {

Expression at_coordinate(const Expression& e, Var v, double value) {
  return substitute(e, v, constant(to_rational(value)));
}

std::string leg_name(Var v) { return std::string(to_string(v)) + "-leg"; }

}  // namespace

SecondOrderOde::SecondOrderOde(Expression a2_, Expression a1_, Expression a0_, Bindings params_)
    : a2(std::move(a2_)), a1(std::move(a1_)), a0(std::move(a0_)), params(std::move(params_)) {
  if (simplify(a2).is_zero()) {
    throw std::invalid_argument("a2 is identically zero; the equation is not second order");
  }
}

double SecondOrderOde::second_derivative(const Point3& at) const {
  double c2 = evaluate(a2, at, params);
  double c1 = evaluate(a1, at, params);
  double c0 = evaluate(a0, at, params);
  return -(c1 * at.p + c0) / c2;
}

std::vector<std::string> SecondOrderOde::parameter_names() const {
  std::set<std::string> names;
  for (const auto* e : {&a2, &a1, &a0}) {
    for (auto& n : parameters(*e)) names.insert(std::move(n));
  }
  return {names.begin(), names.end()};
}

SecondOrderOde SecondOrderOde::scaled(const Expression& mu) const {
  return SecondOrderOde(simplify(mu * a2), simplify(mu * a1), simplify(mu * a0), params);
}

std::string_view to_string(Exactness e) {
  switch (e) {
    case Exactness::Exact: return "Exact";
    case Exactness::UndeterminedSampled: return "Undetermined-sampled";
    case Exactness::NotExact: return "NotExact";
  }
  return "?";
}

SamplerConfig with_params(const SamplerConfig& cfg, const Bindings& params) {
  SamplerConfig out = cfg;
  for (const auto& [k, v] : params) out.params.try_emplace(k, v);
  return out;
}

ExactnessReport check_exact(const SecondOrderOde& ode, const SamplerConfig& cfg) {
  ExactnessReport r;
  r.residuals = {
      simplify(differentiate_raw(ode.a2, Var::Y) - differentiate_raw(ode.a1, Var::P)),
      simplify(differentiate_raw(ode.a2, Var::X) - differentiate_raw(ode.a0, Var::P)),
      simplify(differentiate_raw(ode.a1, Var::X) - differentiate_raw(ode.a0, Var::Y)),
  };
  SamplerConfig c = with_params(cfg, ode.params);
  if (!c.box) {
    std::array<Expression, 3> coeffs{ode.a2, ode.a1, ode.a0};
    c.box = default_box(coeffs);
  }
  bool all_proven = true;
  bool any_nonzero = false;
  for (std::size_t i = 0; i < 3; ++i) {
    r.verdicts[i] = is_identically_zero(r.residuals[i], c);
    all_proven = all_proven && r.verdicts[i].kind == ZeroVerdict::Kind::ProvenZero;
    any_nonzero = any_nonzero || r.verdicts[i].kind == ZeroVerdict::Kind::NonZero;
  }
  r.overall = any_nonzero ? Exactness::NotExact
              : all_proven ? Exactness::Exact
                           : Exactness::UndeterminedSampled;
  return r;
}

SingularBasePoint::SingularBasePoint(const std::string& leg, const Point3& base)
    : std::domain_error("base point " + to_string(base) + " is singular on the " + leg), leg_(leg) {}

double FirstIntegral::operator()(const Point3& at) const {
  if (closed_) return evaluate(*closed_, at, params_);
  double total = 0.0;
  for (const auto& leg : legs_) {
    if (leg.antiderivative) {
      total += evaluate(*leg.antiderivative, at, params_);
      continue;
    }
    const Var v = leg.var;
    auto f = [&](double t) {
      Point3 q = at;
      q[v] = t;
      return evaluate(leg.integrand, q, params_);
    };
    total += integrate_numeric(f, base_[v], at[v]);
  }
  return total;
}

FirstIntegral FirstIntegral::with_params(const Bindings& params) const {
  FirstIntegral out = *this;
  out.params_ = params;
  return out;
}

FirstIntegral potential(const Expression& fx, const Expression& fy, const Expression& fp,
                        const Point3& base, const Bindings& params) {
  FirstIntegral fi;
  fi.base_ = base;
  fi.params_ = params;
  fi.legs_[0] = {Var::X, simplify(fx), std::nullopt};
  fi.legs_[1] = {Var::Y, simplify(at_coordinate(fy, Var::X, base.x)), std::nullopt};
  fi.legs_[2] = {Var::P,
                 simplify(at_coordinate(at_coordinate(fp, Var::X, base.x), Var::Y, base.y)),
                 std::nullopt};

  bool all_symbolic = true;
  for (auto& leg : fi.legs_) {
    if (leg.integrand.is_zero()) {
      leg.antiderivative = constant(0);
      continue;
    }
    try {
      evaluate(leg.integrand, base, params);
    } catch (const DomainError&) {
      throw SingularBasePoint(leg_name(leg.var), base);
    } catch (const UnboundParameter&) {
    }
    if (auto F = integrate_symbolic(leg.integrand, leg.var)) {
      Expression lower = at_coordinate(*F, leg.var, base[leg.var]);
      try {
        evaluate(lower, base, params);
      } catch (const DomainError&) {
        throw SingularBasePoint(leg_name(leg.var), base);
      } catch (const UnboundParameter&) {
      }
      leg.antiderivative = simplify(*F - lower);
    } else {
      all_symbolic = false;
    }
  }
  if (all_symbolic) {
    fi.closed_ = simplify(*fi.legs_[0].antiderivative + *fi.legs_[1].antiderivative +
                          *fi.legs_[2].antiderivative);
  }
  return fi;
}

FirstIntegral build_first_integral(const SecondOrderOde& ode, const Point3& base,
                                   const SamplerConfig& cfg) {
  ExactnessReport r = check_exact(ode, cfg);
  if (!r.is_exact()) throw NotExactError("the equation is not exact");
  return potential(ode.a0, ode.a1, ode.a2, base, ode.params);
}

std::vector<Point3> default_base_points() {
  std::vector<Point3> out;
  for (int ones = 0; ones <= 3; ++ones) {
    for (int mask = 0; mask < 8; ++mask) {
      if (__builtin_popcount(static_cast<unsigned>(mask)) != ones) continue;
      out.push_back({static_cast<double>((mask >> 2) & 1), static_cast<double>((mask >> 1) & 1),
                     static_cast<double>(mask & 1)});
    }
  }
  for (double v : {0.1, 0.5, 1.5, 2.0, -1.0}) out.push_back({v, v, v});
  return out;
}

FirstIntegral build_first_integral(const SecondOrderOde& ode, const SamplerConfig& cfg) {
  ExactnessReport r = check_exact(ode, cfg);
  if (!r.is_exact()) throw NotExactError("the equation is not exact");
  for (const auto& b : default_base_points()) {
    try {
      return potential(ode.a0, ode.a1, ode.a2, b, ode.params);
    } catch (const SingularBasePoint&) {
    }
  }
  throw SingularBasePoint("every leg", {0, 0, 0});
}

ReducedOde reduce(const SecondOrderOde& ode, const std::optional<Point3>& initial,
                  const std::optional<Point3>& base, const SamplerConfig& cfg) {
  FirstIntegral psi = base ? build_first_integral(ode, *base, cfg) : build_first_integral(ode, cfg);
  ReducedOde red{psi, std::nullopt, "c", std::nullopt, std::nullopt, ode};
  std::vector<std::string> names = ode.parameter_names();
  while (std::find(names.begin(), names.end(), red.level_symbol) != names.end()) red.level_symbol += "_";

  std::optional<Expression> level_expr;
  if (initial) {
    if (psi.closed_form()) {
      Expression e = *psi.closed_form();
      for (Var v : {Var::X, Var::Y, Var::P}) e = at_coordinate(e, v, (*initial)[v]);
      e = simplify(exode::bind(e, ode.params));
      if (e.is_constant()) {
        red.level = to_double(e.value());
        level_expr = e;
      }
    }
    if (!red.level) {
      red.level = psi(*initial);
      level_expr = constant(to_rational(*red.level));
    }
  }
  Expression level = level_expr ? *level_expr : parameter(red.level_symbol);

  if (!psi.closed_form()) return red;
  const Expression& closed = *psi.closed_form();
  red.implicit_form = simplify(closed - level);

  Expression dp = differentiate(closed, Var::P);
  SamplerConfig c = with_params(cfg, ode.params);
  if (!is_identically_zero(differentiate(dp, Var::P), c).is_zero()) return red;
  if (is_identically_zero(dp, c).is_zero()) {
    throw std::domain_error("coefficient of p in the first integral vanishes identically");
  }
  Expression rest = simplify(substitute(closed, Var::P, constant(0)));
  red.explicit_p = simplify((level - rest) / dp);
  return red;
}

}  // namespace exode
