#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "exode/integrate.hpp"
#include "exode/simplify.hpp"
#include "exode/verify.hpp"
#include "test_support.hpp"

using namespace exode;
using exode::testing::SmoothExprGen;

TEST_CASE("symbolic derivatives agree with central differences") {
  SmoothExprGen gen(101);
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 500; ++i) {
    Expression e = gen();
    Var v = static_cast<Var>(i % 3);
    Point3 at{u(rng), u(rng), u(rng)};
    double sym = evaluate(differentiate(e, v), at);
    double fd = fd_partial([&](const Point3& q) { return evaluate(e, q); }, v, at);
    CAPTURE(print(e), to_string(v), to_string(at));
    CHECK(std::abs(sym - fd) <= 1e-5 * (1 + std::abs(sym)));
  }
}

TEST_CASE("simplification preserves values") {
  SmoothExprGen gen(201);
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 500; ++i) {
    Expression e = gen();
    Expression s = simplify(e);
    CAPTURE(print(e), print(s));
    for (int k = 0; k < 50; ++k) {
      Point3 at{u(rng), u(rng), u(rng)};
      double a = evaluate(e, at);
      double b = evaluate(s, at);
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("printing round-trips") {
  SmoothExprGen gen(301);
  for (int i = 0; i < 500; ++i) {
    Expression e = gen();
    CAPTURE(print(e));
    CHECK(parse(print(e)) == e);
    Expression s = simplify(e);
    CHECK(parse(print(s)) == s);
  }
}

TEST_CASE("returned antiderivatives differentiate back") {
  std::mt19937_64 rng(401);
  int found = 0;
  for (int i = 0; i < 200; ++i) {
    auto num = exode::testing::random_poly(rng, 3, 4);
    auto den = exode::testing::random_poly(rng, 2, 3);
    Expression e = parse("(" + num.text() + ")/(" + den.text() + ")");
    Var v = static_cast<Var>(i % 3);
    auto F = integrate_symbolic(e, v);
    if (!F) continue;
    ++found;
    CAPTURE(print(e), print(*F));
    SamplerConfig cfg;
    cfg.box = Box::cube(0.3, 1.7);
    ZeroVerdict z;
    try {
      z = is_identically_zero(differentiate(*F, v) - e, cfg);
    } catch (const SamplingError&) {
      continue;
    }
    CHECK(z.is_zero());
  }
  CHECK(found > 100);
}

TEST_CASE("zero verdicts are sound") {
  SmoothExprGen gen(501);
  std::mt19937_64 rng(502);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 200; ++i) {
    Expression e = gen(2);
    ZeroVerdict v = is_identically_zero(e);
    CAPTURE(print(e));
    if (v.kind == ZeroVerdict::Kind::NonZero) {
      REQUIRE(v.witness);
      CHECK(std::abs(evaluate(e, v.witness->at)) > v.tol);
    } else if (v.kind == ZeroVerdict::Kind::ProvenZero) {
      for (int k = 0; k < 20; ++k) CHECK(std::abs(evaluate(e, {u(rng), u(rng), u(rng)})) <= 1e-12);
    }
    Expression diff = e - simplify(e);
    CHECK(is_identically_zero(diff).is_zero());
  }
}
