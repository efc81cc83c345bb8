#include "exode/verify.hpp"

#include <cmath>

namespace exode {

namespace {

constexpr double kMinLeading = 1e-12;
constexpr int kMinSteps = 16;

}  // namespace

double fd_partial(const ScalarField& f, Var v, const Point3& at, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
  Point3 hi = at;
  Point3 lo = at;
  hi[v] += h;
  lo[v] -= h;
  return (f(hi) - f(lo)) / (2.0 * h);
}

Trajectory integrate_ode(const SecondOrderOde& ode, const Point3& origin, double x_end, int steps) {
  if (steps < kMinSteps) throw std::invalid_argument("at least 16 steps are required");
  if (!origin.is_finite() || !std::isfinite(x_end) || x_end == origin.x) {
    throw std::invalid_argument("invalid integration interval");
  }
  Trajectory tr;
  tr.origin = origin;
  tr.h = (x_end - origin.x) / steps;
  tr.samples.reserve(static_cast<std::size_t>(steps) + 1);
  tr.samples.push_back(origin);

  auto rhs = [&](double x, double y, double p) {
    Point3 at{x, y, p};
    double c2 = evaluate(ode.a2, at, ode.params);
    if (std::abs(c2) < kMinLeading) {
      throw IntegrationError("a2 vanishes at x = " + std::to_string(x), x);
    }
    double c1 = evaluate(ode.a1, at, ode.params);
    double c0 = evaluate(ode.a0, at, ode.params);
    return -(c1 * p + c0) / c2;
  };

  const double h = tr.h;
  double y = origin.y;
  double p = origin.p;
  for (int i = 0; i < steps; ++i) {
    double x = origin.x + i * h;
    double k1y = p;
    double k1p = rhs(x, y, p);
    double k2y = p + 0.5 * h * k1p;
    double k2p = rhs(x + 0.5 * h, y + 0.5 * h * k1y, k2y);
    double k3y = p + 0.5 * h * k2p;
    double k3p = rhs(x + 0.5 * h, y + 0.5 * h * k2y, k3y);
    double k4y = p + h * k3p;
    double k4p = rhs(x + h, y + h * k3y, k4y);
    y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    p += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    Point3 next{origin.x + (i + 1) * h, y, p};
    if (!next.is_finite()) throw IntegrationError("state became non-finite", next.x);
    tr.samples.push_back(next);
  }
  return tr;
}

std::vector<double> integrate_first_order(const std::function<double(double, double)>& f,
                                          double x0, double y0, double x_end, int steps) {
  if (steps < kMinSteps) throw std::invalid_argument("at least 16 steps are required");
  const double h = (x_end - x0) / steps;
  std::vector<double> ys{y0};
  ys.reserve(static_cast<std::size_t>(steps) + 1);
  double y = y0;
  for (int i = 0; i < steps; ++i) {
    double x = x0 + i * h;
    double k1 = f(x, y);
    double k2 = f(x + 0.5 * h, y + 0.5 * h * k1);
    double k3 = f(x + 0.5 * h, y + 0.5 * h * k2);
    double k4 = f(x + h, y + h * k3);
    y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!std::isfinite(y)) throw IntegrationError("state became non-finite", x + h);
    ys.push_back(y);
  }
  return ys;
}

ConstancyReport check_constancy(const ScalarField& psi, const Trajectory& tr) {
  ConstancyReport r;
  if (tr.samples.empty()) return r;
  r.psi0 = psi(tr.samples.front());
  r.drift.reserve(tr.samples.size());
  for (const auto& s : tr.samples) {
    double d = std::abs(psi(s) - r.psi0);
    r.drift.push_back(d);
    r.max_drift = std::max(r.max_drift, d);
  }
  return r;
}

ConstancyReport check_constancy(const FirstIntegral& psi, const Trajectory& tr) {
  return check_constancy(ScalarField([&psi](const Point3& at) { return psi(at); }), tr);
}

double cross_check_reduction(const SecondOrderOde& ode, const ReducedOde& red, const Point3& origin,
                             double x_end, int steps) {
  if (!red.explicit_p) throw std::invalid_argument("the reduction has no explicit form");
  Bindings params = ode.params;
  double level = red.level ? *red.level : red.psi(origin);
  if (!red.level) params[red.level_symbol] = level;
  const Expression& f = *red.explicit_p;
  auto slope = [&](double x, double y) { return evaluate(f, {x, y, 0.0}, params); };
  double p0 = slope(origin.x, origin.y);
  if (std::abs(p0 - origin.p) > 1e-8 * std::max(1.0, std::abs(origin.p))) {
    throw std::invalid_argument("origin is inconsistent with the reduced equation: p0 = " +
                                std::to_string(origin.p) + ", f(x0, y0) = " + std::to_string(p0));
  }
  std::vector<double> ys = integrate_first_order(slope, origin.x, origin.y, x_end, steps);
  Trajectory tr = integrate_ode(ode, origin, x_end, steps);
  double worst = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) worst = std::max(worst, std::abs(ys[i] - tr.samples[i].y));
  return worst;
}

}  // namespace exode
