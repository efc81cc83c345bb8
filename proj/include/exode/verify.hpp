#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "exode/exactness.hpp"

namespace exode {

using ScalarField = std::function<double(const Point3&)>;

/// Central difference (f(at + h e_v) - f(at - h e_v)) / 2h.
double fd_partial(const ScalarField& f, Var v, const Point3& at, double h = 1e-5);

struct Trajectory {
  std::vector<Point3> samples;
  double h = 0.0;
  Point3 origin;
  std::string integrator = "rk4";
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double x) : std::runtime_error(what), x_(x) {}
  double x() const { return x_; }

 private:
  double x_;
};

/// Classical fixed-step RK4 on y' = p, p' = -(a1 p + a0)/a2 from `origin`
/// to x_end. Aborts when |a2| < 1e-12 or the state becomes non-finite.
Trajectory integrate_ode(const SecondOrderOde& ode, const Point3& origin, double x_end, int steps);

/// Fixed-step RK4 for the first-order equation y' = f(x, y).
std::vector<double> integrate_first_order(const std::function<double(double, double)>& f,
                                          double x0, double y0, double x_end, int steps);

struct ConstancyReport {
  double psi0 = 0.0;
  double max_drift = 0.0;
  std::vector<double> drift;
};

ConstancyReport check_constancy(const ScalarField& psi, const Trajectory& tr);
ConstancyReport check_constancy(const FirstIntegral& psi, const Trajectory& tr);

/// Largest |y| difference between the reduced first-order equation and the
/// original second-order equation integrated from the same origin.
double cross_check_reduction(const SecondOrderOde& ode, const ReducedOde& red, const Point3& origin,
                             double x_end, int steps);

}  // namespace exode
