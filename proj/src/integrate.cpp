#include "exode/integrate.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "exode/poly.hpp"
#include "exode/simplify.hpp"

namespace exode {

namespace {

using K = Expression::Kind;

// Dense univariate polynomial in v whose coefficients are rational functions
// of the remaining kernels. Index = degree.
using KPoly = std::vector<RatFunc>;

void trim(KPoly& a) {
  while (!a.empty() && a.back().is_zero()) a.pop_back();
}

int deg(const KPoly& a) { return static_cast<int>(a.size()) - 1; }

KPoly add(const KPoly& a, const KPoly& b) {
  KPoly r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = r[i] + a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = r[i] + b[i];
  trim(r);
  return r;
}

KPoly mul(const KPoly& a, const KPoly& b) {
  if (a.empty() || b.empty()) return {};
  KPoly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
  }
  trim(r);
  return r;
}

KPoly scale(const KPoly& a, const RatFunc& c) {
  KPoly r;
  r.reserve(a.size());
  for (const auto& x : a) r.push_back(x * c);
  trim(r);
  return r;
}

std::pair<KPoly, KPoly> divmod(KPoly a, const KPoly& b) {
  if (b.empty()) throw DivisionByZero();
  KPoly q;
  trim(a);
  if (deg(a) < deg(b)) return {q, a};
  q.assign(static_cast<std::size_t>(deg(a) - deg(b) + 1), RatFunc());
  RatFunc lead_inv = b.back().inverse();
  while (!a.empty() && deg(a) >= deg(b)) {
    int shift = deg(a) - deg(b);
    RatFunc t = a.back() * lead_inv;
    q[static_cast<std::size_t>(shift)] = t;
    for (std::size_t j = 0; j < b.size(); ++j) {
      a[j + static_cast<std::size_t>(shift)] = a[j + static_cast<std::size_t>(shift)] - t * b[j];
    }
    a.pop_back();
    trim(a);
  }
  trim(q);
  return {q, a};
}

KPoly mod(const KPoly& a, const KPoly& b) { return divmod(a, b).second; }

// s with s*a = 1 (mod b); a and b coprime.
std::optional<KPoly> inverse_mod(const KPoly& a, const KPoly& b) {
  KPoly r0 = b, r1 = mod(a, b);
  KPoly s0, s1{RatFunc(Rational(1))};
  while (!r1.empty() && deg(r1) > 0) {
    auto [q, r] = divmod(r0, r1);
    KPoly s2 = add(s0, scale(mul(q, s1), RatFunc(Rational(-1))));
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  if (r1.empty()) return std::nullopt;
  return mod(scale(s1, r1[0].inverse()), b);
}

KPoly to_kpoly(const Poly& p, int v) {
  KPoly r;
  for (int k = 0; k <= p.degree(v); ++k) r.emplace_back(p.coeff(v, k));
  trim(r);
  return r;
}

bool only_in(const Poly& p, int v) {
  for (const auto& [m, c] : p.terms()) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] != 0 && static_cast<int>(i) != v) return false;
    }
  }
  return true;
}

// Integer-primitive with a positive leading coefficient in v.
Poly normalize(const Poly& f, int v) {
  Rational s = f.numeric_content();
  if (sgn(f.leading_coeff(v).leading_coefficient()) < 0) s = -s;
  return f * Rational(1 / s);
}

Rational eval_numeric(const Poly& p, int v, const Rational& at) {
  Rational acc = 0;
  for (int k = p.degree(v); k >= 0; --k) {
    acc = acc * at;
    Poly c = p.coeff(v, k);
    if (!c.is_zero()) acc += c.constant_value();
  }
  return acc;
}

std::vector<Integer> divisors(Integer n) {
  n = abs(n);
  std::vector<Integer> out;
  for (Integer d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      if (d * d != n) out.push_back(n / d);
    }
  }
  return out;
}

constexpr long kMaxRootSearch = 1000000000L;

// A rational root of a numeric univariate polynomial, as a normalized linear
// factor.
std::optional<Poly> rational_linear_factor(const Poly& p, int v) {
  Integer l = 1;
  for (const auto& [m, c] : p.terms()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  Poly ip = p * Rational(l);
  int lo = 0;
  while (ip.coeff(v, lo).is_zero()) ++lo;
  if (lo > 0) return Poly::variable(v);
  Integer a0 = ip.coeff(v, 0).constant_value().get_num();
  Integer an = ip.leading_coeff(v).constant_value().get_num();
  if (abs(a0) > kMaxRootSearch || abs(an) > kMaxRootSearch) return std::nullopt;
  for (const auto& d : divisors(a0)) {
    for (const auto& e : divisors(an)) {
      for (int sign : {1, -1}) {
        Rational r(sign * d, e);
        r.canonicalize();
        if (sgn(eval_numeric(p, v, r)) == 0) {
          Poly f = Poly::variable(v) * Rational(r.get_den()) - Poly(Rational(r.get_num()));
          return f;
        }
      }
    }
  }
  return std::nullopt;
}

struct Factor {
  Poly f;
  int mult;
};

class Integrator {
 public:
  Integrator(Canonicalizer& c, int v, Var var) : c_(c), v_(v), var_(var) {}

  void add_hint(const Poly& h) {
    if (h.depends_on(v_)) hints_.push_back(h);
  }

  std::optional<Expression> run(const RatFunc& r) {
    KPoly n = to_kpoly(r.num(), v_);
    KPoly d = to_kpoly(r.den(), v_);
    auto [q, rem] = divmod(n, d);
    std::vector<Expression> out;
    for (std::size_t k = 0; k < q.size(); ++k) {
      if (q[k].is_zero()) continue;
      out.push_back(expr(q[k] * RatFunc(Rational(1, static_cast<long>(k + 1)))) *
                    pow(variable(var_), static_cast<long>(k + 1)));
    }
    if (!rem.empty()) {
      auto frac = fractions(r.den(), rem);
      if (!frac) return std::nullopt;
      out.push_back(*frac);
    }
    return sum(std::move(out));
  }

 private:
  Expression expr(const RatFunc& r) const { return c_.to_expression(r); }
  Expression expr(const Poly& p) const { return c_.to_expression(p); }

  std::vector<Factor> squarefree(const Poly& a) const {
    std::vector<Factor> out;
    Poly g = gcd(a, a.derivative(v_));
    Poly w = *a.divide_exact(g);
    int i = 1;
    while (w.degree(v_) > 0) {
      Poly y = gcd(w, g);
      Poly z = *w.divide_exact(y);
      if (z.degree(v_) > 0) out.push_back({z, i});
      ++i;
      w = y;
      g = *g.divide_exact(y);
    }
    return out;
  }

  // Split a squarefree factor into pieces we can integrate.
  bool split(const Poly& z, std::vector<Poly>& out, int depth = 0) const {
    int d = z.degree(v_);
    if (d <= 0) return true;
    if (d == 1) {
      out.push_back(normalize(z, v_));
      return true;
    }
    if (depth < 8) {
      for (const auto& h : hints_) {
        Poly g = gcd(z, h);
        int dg = g.degree(v_);
        if (dg > 0 && dg < d) {
          return split(g, out, depth + 1) && split(*z.divide_exact(g), out, depth + 1);
        }
      }
    }
    if (only_in(z, v_) && d >= 3) {
      if (auto f = rational_linear_factor(z, v_)) {
        out.push_back(normalize(*f, v_));
        return split(*z.divide_exact(*f), out, depth + 1);
      }
      return false;
    }
    if (d == 2) return split_quadratic(z, out);
    return false;
  }

  bool split_quadratic(const Poly& z, std::vector<Poly>& out) const {
    Poly a = z.coeff(v_, 2), b = z.coeff(v_, 1), c0 = z.coeff(v_, 0);
    Poly disc = b * b - a * c0 * Rational(4);
    if (auto sq = poly_sqrt(disc)) {
      Poly base = Poly::variable(v_) * Rational(2) * a + b;
      Poly f1 = primitive_part(base - *sq, v_);
      Poly f2 = primitive_part(base + *sq, v_);
      auto rest = z.divide_exact(f1 * f2);
      if (!rest || rest->depends_on(v_)) return false;
      out.push_back(normalize(f1, v_));
      out.push_back(normalize(f2, v_));
      return true;
    }
    if (only_in(z, v_) && disc.is_constant() && sgn(disc.constant_value()) < 0) {
      out.push_back(normalize(z, v_));
      return true;
    }
    return false;
  }

  std::optional<Expression> fractions(const Poly& den, const KPoly& rem) const {
    std::vector<Factor> sqf = squarefree(den);
    std::vector<Factor> factors;
    for (const auto& [z, m] : sqf) {
      std::vector<Poly> pieces;
      if (!split(z, pieces)) return std::nullopt;
      for (auto& p : pieces) factors.push_back({std::move(p), m});
    }
    Poly prod(Rational(1));
    for (const auto& [f, m] : factors) prod = prod * f.pow(static_cast<unsigned>(m));
    auto kappa = den.divide_exact(prod);
    if (!kappa || kappa->depends_on(v_)) return std::nullopt;
    KPoly num = scale(rem, RatFunc(*kappa).inverse());

    std::vector<KPoly> full;
    for (const auto& [f, m] : factors) full.push_back(to_kpoly(f.pow(static_cast<unsigned>(m)), v_));

    std::vector<Expression> out;
    for (std::size_t j = 0; j < factors.size(); ++j) {
      KPoly a;
      if (factors.size() == 1) {
        a = num;
      } else {
        KPoly others{RatFunc(Rational(1))};
        for (std::size_t i = 0; i < factors.size(); ++i) {
          if (i != j) others = mul(others, full[i]);
        }
        auto inv = inverse_mod(others, full[j]);
        if (!inv) return std::nullopt;
        a = mod(mul(num, *inv), full[j]);
      }
      KPoly f = to_kpoly(factors[j].f, v_);
      for (int k = factors[j].mult; k >= 1 && !a.empty(); --k) {
        auto [q, r] = divmod(a, f);
        if (!r.empty()) {
          auto term = integrate_piece(factors[j].f, f, r, k);
          if (!term) return std::nullopt;
          out.push_back(*term);
        }
        a = std::move(q);
      }
    }
    return sum(std::move(out));
  }

  // Antiderivative of c / f^k with deg c < deg f.
  std::optional<Expression> integrate_piece(const Poly& fp, const KPoly& f, const KPoly& c, int k) const {
    Expression fe = expr(fp);
    if (deg(f) == 1) {
      RatFunc coef = c[0] / f[1];
      if (k == 1) return expr(coef) * ln(fe);
      return expr(coef * RatFunc(Rational(-1, k - 1))) * power(fe, constant(1 - k));
    }
    if (deg(f) == 2 && k == 1) {
      Rational a = f[2].constant_value(), b = f[1].constant_value(), c0 = f[0].constant_value();
      RatFunc A = deg(c) >= 1 ? c[1] : RatFunc();
      RatFunc B = c.empty() ? RatFunc() : c[0];
      Rational delta = 4 * a * c0 - b * b;
      Expression root = is_perfect_square(delta) ? constant(rational_sqrt(delta)) : sqrt(constant(delta));
      RatFunc log_coef = A * RatFunc(Rational(1 / (2 * a)));
      RatFunc atan_coef = (B - A * RatFunc(Rational(b / (2 * a)))) * RatFunc(Rational(2));
      Expression arg = (constant(2 * a) * variable(var_) + constant(b)) / root;
      return expr(log_coef) * ln(fe) + expr(atan_coef) / root * apply(Func::Atan, arg);
    }
    if (deg(f) == 2) {
      // (A v + B)/f^k = L f'/f^k + M/f^k, then reduce the power of 1/f^k.
      Rational a = f[2].constant_value(), b = f[1].constant_value(), c0 = f[0].constant_value();
      Rational delta = 4 * a * c0 - b * b;
      RatFunc A = deg(c) >= 1 ? c[1] : RatFunc();
      RatFunc B = c.empty() ? RatFunc() : c[0];
      RatFunc L = A * RatFunc(Rational(1 / (2 * a)));
      RatFunc M = B - A * RatFunc(Rational(b / (2 * a)));
      std::vector<Expression> out;
      if (!L.is_zero()) out.push_back(expr(L * RatFunc(Rational(-1, k - 1))) * power(fe, constant(1 - k)));
      if (!M.is_zero()) {
        Rational km1(k - 1);
        Expression lead = (constant(2 * a) * variable(var_) + constant(b)) / (constant(km1 * delta) * power(fe, constant(k - 1)));
        auto lower = integrate_piece(fp, f, KPoly{RatFunc(Rational(1))}, k - 1);
        if (!lower) return std::nullopt;
        Rational w = 2 * (2 * k - 3) * a / (km1 * delta);
        out.push_back(expr(M) * (lead + constant(w) * *lower));
      }
      return sum(std::move(out));
    }
    return std::nullopt;
  }

  Canonicalizer& c_;
  int v_;
  Var var_;
  std::vector<Poly> hints_;
};

void collect_sums(const Expression& e, std::vector<Expression>& out) {
  if (e.is(K::Sum)) out.push_back(e);
  for (const auto& o : e.operands()) collect_sums(o, out);
}

}  // namespace

std::optional<Expression> integrate_symbolic(const Expression& e, Var v) {
  Expression s = simplify(e);
  Expression var = variable(v);
  if (!contains(s, v)) return simplify(s * var);
  Canonicalizer c;
  RatFunc r;
  try {
    r = c.reduce_radicals(c.convert(s));
  } catch (const DivisionByZero&) {
    return std::nullopt;
  }
  for (std::size_t i = 0; i < c.kernels().size(); ++i) {
    const Expression& k = c.kernels()[i];
    if (k != var && r.depends_on(static_cast<int>(i)) && contains(k, v)) return std::nullopt;
  }
  int vid = c.find(var);
  if (vid < 0 || !r.depends_on(vid)) return simplify(s * var);
  Integrator integ(c, vid, v);
  std::vector<Expression> sums;
  collect_sums(e, sums);
  for (const auto& t : sums) {
    try {
      RatFunc h = c.convert(t);
      integ.add_hint(h.num());
      integ.add_hint(h.den());
    } catch (const DivisionByZero&) {
    }
  }
  std::optional<Expression> out;
  try {
    out = integ.run(r);
  } catch (const DivisionByZero&) {
    return std::nullopt;
  }
  if (!out) return std::nullopt;
  return simplify(*out);
}

double integrate_numeric(const std::function<double(double)>& f, double a, double b, double abs_tol) {
  if (a == b) return 0.0;
  double err = 0.0;
  double val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 20, 1e-13, &err);
  if (!std::isfinite(val)) throw QuadratureError("quadrature produced a non-finite value");
  if (err > std::max(abs_tol, 1e-12 * std::abs(val))) {
    throw QuadratureError("quadrature error estimate " + std::to_string(err) + " exceeds tolerance");
  }
  return val;
}

}  // namespace exode
