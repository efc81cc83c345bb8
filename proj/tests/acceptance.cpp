#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "exode/intfactor.hpp"
#include "exode/simplify.hpp"
#include "exode/verify.hpp"
#include "test_support.hpp"

using namespace exode;
using exode::testing::TestPoly;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond && pass) {
      pass = false;
      detail << what;
    }
  }
};

SecondOrderOde ode_of(const std::string& a2, const std::string& a1, const std::string& a0,
                      Bindings params = {}) {
  return SecondOrderOde(parse(a2), parse(a1), parse(a0), std::move(params));
}

bool same_canonical(const Expression& a, const std::string& b) { return simplify(a) == simplify(parse(b)); }

cli::Problem problem(const std::string& a2, const std::string& a1, const std::string& a0) {
  cli::Problem pb;
  pb.a2 = a2;
  pb.a1 = a1;
  pb.a0 = a0;
  return pb;
}

void jet(Outcome& o) {
  cli::Problem pb = problem("3*eps", "y", "0");
  pb.params["eps"] = 1.0;
  cli::CommandResult r = cli::cmd_check(pb);
  o.require(r.exit_code == cli::kSuccess, "check exit code " + std::to_string(r.exit_code));
  o.require(r.report["exactness"]["verdict"] == "Exact", "verdict not Exact");
  for (const auto& res : r.report["exactness"]["residuals"]) {
    o.require(res["verdict"] == "ProvenZero", "residual not ProvenZero");
  }

  SecondOrderOde ode = ode_of("3*eps", "y", "0", {{"eps", 1.0}});
  ReducedOde red = reduce(ode, std::nullopt, Point3{0, 0, 0});
  o.require(red.psi.closed_form().has_value(), "psi not closed form");
  if (!o.pass) return;
  Expression psi = exode::bind(*red.psi.closed_form(), ode.params);
  o.require(same_canonical(psi, "y^2/2 + 3*p"), "psi = " + print(*red.psi.closed_form()));

  Trajectory tr = integrate_ode(ode, {0, 1, 0}, 2.0, 1024);
  double drift = check_constancy(red.psi, tr).max_drift;
  o.require(drift <= 1e-6, "drift " + std::to_string(drift));
  o.detail << "psi = " << print(*red.psi.closed_form()) << ", drift " << drift;
}

void ivp(Outcome& o) {
  SecondOrderOde ode = ode_of("1", "12*x*y^3", "3*y^4 - 1");
  Point3 origin{0, 2, 0};
  ReducedOde red = reduce(ode, origin);
  o.require(red.psi.closed_form().has_value(), "psi not closed form");
  if (!o.pass) return;
  o.require(same_canonical(*red.psi.closed_form(), "p + (3*y^4 - 1)*x"), "psi = " + print(*red.psi.closed_form()));
  o.require(red.level && *red.level == 0.0, "level is not 0");
  o.require(red.explicit_p && same_canonical(*red.explicit_p, "x - 3*x*y^4"), "explicit form mismatch");
  double disc = cross_check_reduction(ode, red, origin, 0.5, 1024);
  o.require(disc <= 1e-5, "discrepancy " + std::to_string(disc));
  o.detail << "p = " << print(*red.explicit_p) << ", discrepancy " << disc;
}

void example_mu_y(Outcome& o) {
  cli::CommandResult r = cli::cmd_mu(problem("(1+y^2)*y", "y", "(1+y^2)*y"));
  o.require(r.exit_code == cli::kSuccess, "mu exit code " + std::to_string(r.exit_code));
  if (!o.pass) return;
  const auto& f = r.report["integrating_factor"];
  o.require(f["form"] == "OfY", "form " + f["form"].dump());
  o.require(f["scaled_exactness"]["verdict"] == "Exact", "scaled equation not Exact");
  o.require(f["mu"].is_string(), "no closed-form mu");
  if (!o.pass) return;
  Expression mu = parse(f["mu"].get<std::string>());
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ys(0.2, 2.0), other(-2.0, 2.0);
  std::vector<double> ratios;
  for (int i = 0; i < 50; ++i) {
    Point3 at{other(rng), ys(rng), other(rng)};
    ratios.push_back(evaluate(mu, at) * at.y * (1.0 + at.y * at.y));
  }
  double cv = exode::testing::coefficient_of_variation(ratios);
  o.require(cv <= 1e-8, "coefficient of variation " + std::to_string(cv));
  o.detail << "mu = " << f["mu"].get<std::string>() << ", cv " << cv;
}

void example_mu_xy(Outcome& o) {
  cli::Problem pb = problem("x*y*(2*x+y)", "x^2 + x*y", "3*x*y + y^2");
  pb.mu = "1/(x*y*(2*x+y))";
  pb.ivp = Point3{1, 1, 0};
  pb.x_end = 2.0;
  cli::CommandResult r = cli::cmd_verify_mu(pb);
  o.require(r.exit_code == cli::kSuccess, "verify-mu exit code " + std::to_string(r.exit_code));
  o.require(r.report["integrating_factor"]["scaled_exactness"]["verdict"] == "Exact", "scaled equation not Exact");

  SecondOrderOde ode = ode_of(pb.a2, pb.a1, pb.a0);
  Trajectory tr = integrate_ode(ode, {1, 1, 0}, 2.0, 1024);
  ScalarField derived = [](const Point3& q) {
    return q.p + std::log(q.x) + 0.5 * std::log(q.y) + 0.5 * std::log(2 * q.x + q.y);
  };
  ScalarField printed = [](const Point3& q) { return q.p + std::log(q.x * q.y * std::sqrt(q.y + 2 * q.x)); };
  double d_derived = check_constancy(derived, tr).max_drift;
  double d_printed = check_constancy(printed, tr).max_drift;
  o.require(d_derived <= 1e-6, "derived drift " + std::to_string(d_derived));
  o.require(d_printed > 1e-2, "printed form unexpectedly constant, drift " + std::to_string(d_printed));

  // The library's first integral differs from the derived one by a constant.
  MuResult m = verify_mu(ode, parse(*pb.mu));
  FirstIntegral psi = build_first_integral(*m.scaled);
  double offset = psi({1, 1, 0}) - derived({1, 1, 0});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(0.2, 2.0), any(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    Point3 q{pos(rng), pos(rng), any(rng)};
    o.require(std::abs(psi(q) - derived(q) - offset) <= 1e-9, "library psi differs from derived form");
  }
  o.detail << "derived drift " << d_derived << ", printed drift " << d_printed;
}

void obstruction_check(Outcome& o) {
  SecondOrderOde ode = ode_of("1", "0", "x*y");
  Obstruction ob = obstruction(ode);
  o.require(simplify(ob.combination) == parse("x"), "E = " + print(ob.combination));
  o.require(ob.verdict.kind == ZeroVerdict::Kind::NonZero, "E verdict not NonZero");
  cli::CommandResult r = cli::cmd_check(problem("1", "0", "x*y"));
  o.require(r.exit_code == cli::kNegative, "check exit code " + std::to_string(r.exit_code));
  o.require(r.report["message"].get<std::string>().find("no integrating factor of the covered forms") !=
                std::string::npos,
            "missing obstruction message");

  struct Fixture {
    const char *a2, *a1, *a0, *mu;
  };
  const Fixture fixtures[] = {
      {"3*eps", "y", "0", "1"},
      {"1", "12*x*y^3", "3*y^4 - 1", "1"},
      {"(1+y^2)*y", "y", "(1+y^2)*y", "1/(y*(1+y^2))"},
      {"x*y*(2*x+y)", "x^2 + x*y", "3*x*y + y^2", "1/(x*y*(2*x+y))"},
  };
  for (const auto& f : fixtures) {
    SecondOrderOde fx = ode_of(f.a2, f.a1, f.a0, {{"eps", 1.0}});
    MuResult m = verify_mu(fx, parse(f.mu));
    o.require(m.scaled_report.is_exact(), std::string("mu does not verify for a2 = ") + f.a2);
    o.require(obstruction(fx).verdict.is_zero(), std::string("E nonzero for a2 = ") + f.a2);
  }
  o.detail << "E = " << print(ob.combination);
}

TestPoly nondegenerate_poly(std::mt19937_64& rng) {
  for (;;) {
    TestPoly t = exode::testing::random_poly(rng);
    if (t.depends_on(0) && t.depends_on(1) && t.depends_on(2)) return t;
  }
}

void round_trip(Outcome& o) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  int failures = 0;
  for (int i = 0; i < 200; ++i) {
    TestPoly hat = exode::testing::random_poly(rng);
    if (!hat.depends_on(2)) hat.terms.push_back({1, 1, {0, 0, 1}});
    SecondOrderOde ode = ode_of(hat.partial(2).text(), hat.partial(1).text(), hat.partial(0).text());
    ExactnessReport rep = check_exact(ode);
    bool ok = rep.overall == Exactness::Exact;
    for (const auto& v : rep.verdicts) ok = ok && v.kind == ZeroVerdict::Kind::ProvenZero;
    FirstIntegral psi = build_first_integral(ode, Point3{0, 0, 0});
    for (int k = 0; k < 50 && ok; ++k) {
      Point3 q{coord(rng), coord(rng), coord(rng)};
      double expected = hat(q) - hat({0, 0, 0});
      ok = std::abs(psi(q) - expected) <= 1e-9;
    }
    if (!ok) {
      if (failures == 0) o.detail << "first failure: " << hat.text() << "; ";
      ++failures;
    }
  }
  o.require(failures == 0, std::to_string(failures) + " failures");
  o.detail << "200 polynomials, " << failures << " failures";
}

void mu_recovery(Outcome& o) {
  struct Known {
    std::string mu;
    std::function<double(const Point3&)> value;
    std::function<FinderOutcome(const SecondOrderOde&)> finder;
  };
  const std::vector<Known> known = {
      {"x^2", [](const Point3& q) { return q.x * q.x; }, [](const SecondOrderOde& e) { return find_mu_x(e); }},
      {"y", [](const Point3& q) { return q.y; }, [](const SecondOrderOde& e) { return find_mu_y(e); }},
      {"p", [](const Point3& q) { return q.p; }, [](const SecondOrderOde& e) { return find_mu_p(e); }},
      {"x*y", [](const Point3& q) { return q.x * q.y; },
       [](const SecondOrderOde& e) { return find_mu_pairwise(e, {x_(), y_(), constant(1)}); }},
      {"1 + p^2", [](const Point3& q) { return 1 + q.p * q.p; },
       [](const SecondOrderOde& e) { return find_mu_p(e); }},
      {"exp(x)", [](const Point3& q) { return std::exp(q.x); },
       [](const SecondOrderOde& e) { return find_mu_x(e); }},
  };
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> coord(0.5, 1.5);
  int failures = 0;
  for (int i = 0; i < 100; ++i) {
    const Known& k = known[static_cast<std::size_t>(i) % known.size()];
    TestPoly hat = nondegenerate_poly(rng);
    auto scaled = [&](const TestPoly& t) { return "(" + t.text() + ")/(" + k.mu + ")"; };
    std::string why;
    try {
      SecondOrderOde ode =
          ode_of(scaled(hat.partial(2)), scaled(hat.partial(1)), scaled(hat.partial(0)));
      FinderOutcome found = k.finder(ode);
      if (!found) {
        why = found.failed_hypothesis;
      } else {
        std::vector<double> ratios;
        for (int s = 0; s < 50; ++s) {
          Point3 q{coord(rng), coord(rng), coord(rng)};
          ratios.push_back(found.result->evaluate_mu(q) / k.value(q));
        }
        double cv = exode::testing::coefficient_of_variation(ratios);
        if (!(cv <= 1e-8)) why = "cv " + std::to_string(cv);
      }
    } catch (const std::exception& e) {
      why = e.what();
    }
    if (!why.empty()) {
      if (failures == 0) o.detail << "first failure: mu* = " << k.mu << ", psi = " << hat.text() << ": " << why << "; ";
      ++failures;
    }
  }
  o.require(failures == 0, std::to_string(failures) + " failures");
  o.detail << "100 equations, " << failures << " failures";
}

void integrator(Outcome& o) {
  SecondOrderOde ode = ode_of("1", "0", "y");
  auto error_at = [&](int steps) {
    Trajectory tr = integrate_ode(ode, {0, 0, 1}, 1.0, steps);
    const Point3& end = tr.samples.back();
    return std::max(std::abs(end.y - std::sin(1.0)), std::abs(end.p - std::cos(1.0)));
  };
  double ratio = error_at(16) / error_at(32);
  o.require(ratio >= 12 && ratio <= 20, "order ratio " + std::to_string(ratio));

  exode::testing::SmoothExprGen gen(5);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  int failures = 0;
  for (int i = 0; i < 500; ++i) {
    Expression e = gen();
    Var v = static_cast<Var>(i % 3);
    Point3 at{coord(rng), coord(rng), coord(rng)};
    double sym = evaluate(differentiate(e, v), at);
    double fd = fd_partial([&](const Point3& q) { return evaluate(e, q); }, v, at);
    if (!(std::abs(sym - fd) <= 1e-5 * std::max(1.0, std::abs(sym)))) {
      if (failures == 0) o.detail << "first failure: d/d" << to_string(v) << " " << print(e) << "; ";
      ++failures;
    }
  }
  o.require(failures == 0, std::to_string(failures) + " derivative mismatches");
  o.detail << "order ratio " << ratio << ", 500 derivatives, " << failures << " mismatches";
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    void (*run)(Outcome&);
  };
  const Criterion criteria[] = {
      {"1 jet equation: exact, first integral, constancy", jet},
      {"2 initial value problem: closed form, level, explicit reduction", ivp},
      {"3 integrating factor in y", example_mu_y},
      {"4 integrating factor in x and y, derived first integral", example_mu_xy},
      {"5 obstruction", obstruction_check},
      {"6 round trip of random polynomial potentials", round_trip},
      {"7 recovery of known integrating factors", mu_recovery},
      {"8 integrator order and derivative agreement", integrator},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.name << "  (" << o.detail.str() << ")\n";
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
