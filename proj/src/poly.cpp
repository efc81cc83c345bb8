#include "exode/poly.hpp"

#include <algorithm>
#include <utility>

namespace exode {

namespace {

void trim(Monomial& m) {
  while (!m.empty() && m.back() == 0) m.pop_back();
}

int exponent(const Monomial& m, int var) {
  return var < static_cast<int>(m.size()) ? m[static_cast<std::size_t>(var)] : 0;
}

}  // namespace

bool MonomialLess::operator()(const Monomial& a, const Monomial& b) const {
  std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    int ai = i < a.size() ? a[i] : 0;
    int bi = i < b.size() ? b[i] : 0;
    if (ai != bi) return ai < bi;
  }
  return false;
}

Monomial monomial_mul(const Monomial& a, const Monomial& b) {
  Monomial r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  trim(r);
  return r;
}

bool monomial_divides(const Monomial& d, const Monomial& m) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > (i < m.size() ? m[i] : 0)) return false;
  }
  return true;
}

Monomial monomial_div(const Monomial& m, const Monomial& d) {
  Monomial r = m;
  for (std::size_t i = 0; i < d.size(); ++i) r[i] -= d[i];
  trim(r);
  return r;
}

Poly::Poly(const Rational& c) {
  if (sgn(c) != 0) terms_.emplace(Monomial{}, c);
}

Poly Poly::variable(int id, int power) {
  Monomial m(static_cast<std::size_t>(id) + 1, 0);
  m[static_cast<std::size_t>(id)] = power;
  trim(m);
  return term(std::move(m), Rational(1));
}

Poly Poly::term(Monomial m, const Rational& c) {
  Poly p;
  trim(m);
  p.add_term(m, c);
  return p;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rational Poly::constant_value() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rational(0) : it->second;
}

int Poly::degree(int var) const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, exponent(m, var));
  return d;
}

int Poly::total_degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) {
    int s = 0;
    for (int e : m) s += e;
    d = std::max(d, s);
  }
  return d;
}

bool Poly::depends_on(int var) const {
  for (const auto& [m, c] : terms_) {
    if (exponent(m, var) > 0) return true;
  }
  return false;
}

int Poly::min_var() const {
  int best = -1;
  for (const auto& [m, c] : terms_) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] > 0) {
        if (best < 0 || static_cast<int>(i) < best) best = static_cast<int>(i);
        break;
      }
    }
  }
  return best;
}

int Poly::width() const {
  std::size_t w = 0;
  for (const auto& [m, c] : terms_) w = std::max(w, m.size());
  return static_cast<int>(w);
}

Poly Poly::coeff(int var, int k) const {
  Poly r;
  for (const auto& [m, c] : terms_) {
    if (exponent(m, var) != k) continue;
    Monomial mm = m;
    if (var < static_cast<int>(mm.size())) mm[static_cast<std::size_t>(var)] = 0;
    trim(mm);
    r.add_term(mm, c);
  }
  return r;
}

Poly Poly::derivative(int var) const {
  Poly r;
  for (const auto& [m, c] : terms_) {
    int e = exponent(m, var);
    if (e == 0) continue;
    Monomial mm = m;
    mm[static_cast<std::size_t>(var)] = e - 1;
    trim(mm);
    r.add_term(mm, c * e);
  }
  return r;
}

Poly Poly::pow(unsigned n) const {
  Poly result(Rational(1));
  Poly base = *this;
  while (n > 0) {
    if (n & 1U) result = result * base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return result;
}

Poly Poly::monic() const {
  if (is_zero()) return *this;
  Rational lc = leading_coefficient();
  if (lc == 1) return *this;
  Poly r = *this;
  r *= Rational(1 / lc);
  return r;
}

Rational Poly::numeric_content() const {
  Integer g = 0;
  Integer l = 1;
  for (const auto& [m, c] : terms_) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  }
  if (g == 0) return Rational(1);
  Rational r(g, l);
  r.canonicalize();
  return r;
}

std::optional<Poly> Poly::divide_exact(const Poly& d) const {
  if (d.is_zero()) throw DivisionByZero();
  if (d.is_constant()) {
    Poly r = *this;
    r *= Rational(1 / d.constant_value());
    return r;
  }
  Poly q;
  Poly r = *this;
  const Monomial& lm = d.leading_monomial();
  const Rational& lc = d.leading_coefficient();
  while (!r.is_zero()) {
    const Monomial& rm = r.leading_monomial();
    if (!monomial_divides(lm, rm)) return std::nullopt;
    Poly t = term(monomial_div(rm, lm), r.leading_coefficient() / lc);
    q += t;
    r -= t * d;
  }
  return q;
}

Poly Poly::substitute(int var, const Poly& value) const {
  std::map<int, Poly> powers;
  Poly r;
  for (const auto& [m, c] : terms_) {
    int e = exponent(m, var);
    if (e == 0) {
      r.add_term(m, c);
      continue;
    }
    Monomial mm = m;
    mm[static_cast<std::size_t>(var)] = 0;
    trim(mm);
    auto it = powers.find(e);
    if (it == powers.end()) it = powers.emplace(e, value.pow(static_cast<unsigned>(e))).first;
    r += term(mm, c) * it->second;
  }
  return r;
}

Poly Poly::remap(std::span<const int> perm) const {
  Poly r;
  for (const auto& [m, c] : terms_) {
    Monomial mm;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      auto j = static_cast<std::size_t>(perm[i]);
      if (mm.size() <= j) mm.resize(j + 1, 0);
      mm[j] = m[i];
    }
    trim(mm);
    r.add_term(mm, c);
  }
  return r;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, Rational(-c));
  return *this;
}

Poly& Poly::operator*=(const Rational& c) {
  if (sgn(c) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly r;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) r.add_term(monomial_mul(ma, mb), ca * cb);
  }
  return r;
}

Poly pseudo_remainder(const Poly& a, const Poly& b, int var) {
  int db = b.degree(var);
  Poly lcb = b.coeff(var, db);
  Poly r = a;
  while (!r.is_zero()) {
    int dr = r.degree(var);
    if (dr < db) break;
    Poly lcr = r.coeff(var, dr);
    r = lcb * r - lcr * b * Poly::variable(var, dr - db);
  }
  return r;
}

Poly content(const Poly& p, int var) {
  Poly g;
  int d = p.degree(var);
  for (int k = d; k >= 0; --k) {
    Poly c = p.coeff(var, k);
    if (c.is_zero()) continue;
    g = gcd(g, c);
    if (g.is_constant()) return Poly(Rational(1));
  }
  return g;
}

Poly primitive_part(const Poly& p, int var) {
  if (p.is_zero()) return p;
  return p.divide_exact(content(p, var))->monic();
}

Poly gcd(const Poly& a, const Poly& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return Poly(Rational(1));
  if (a.monic() == b.monic()) return a.monic();
  int va = a.min_var();
  int vb = b.min_var();
  int v = va < 0 ? vb : (vb < 0 ? va : std::min(va, vb));
  if (!a.depends_on(v)) return gcd(a, content(b, v));
  if (!b.depends_on(v)) return gcd(content(a, v), b);

  Poly ca = content(a, v);
  Poly cb = content(b, v);
  Poly g = gcd(ca, cb);
  Poly pa = *a.divide_exact(ca);
  Poly pb = *b.divide_exact(cb);
  if (pa.degree(v) < pb.degree(v)) std::swap(pa, pb);
  while (!pb.is_zero()) {
    Poly r = pseudo_remainder(pa, pb, v);
    pa = std::move(pb);
    pb = r.is_zero() ? std::move(r) : primitive_part(r, v);
  }
  Poly h = pa.degree(v) > 0 ? primitive_part(pa, v) : Poly(Rational(1));
  return (g * h).monic();
}

bool is_perfect_square(const Rational& q) {
  return sgn(q) >= 0 && mpz_perfect_square_p(q.get_num_mpz_t()) &&
         mpz_perfect_square_p(q.get_den_mpz_t());
}

Rational rational_sqrt(const Rational& q) {
  Integer n;
  Integer d;
  mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
  Rational r(n, d);
  r.canonicalize();
  return r;
}

std::optional<Poly> poly_sqrt(const Poly& p) {
  if (p.is_zero()) return p;
  const Monomial& lm = p.leading_monomial();
  if (!is_perfect_square(p.leading_coefficient())) return std::nullopt;
  Monomial half;
  for (int e : lm) {
    if (e % 2 != 0) return std::nullopt;
    half.push_back(e / 2);
  }
  Poly root = Poly::term(half, rational_sqrt(p.leading_coefficient()));
  const Monomial root_lm = root.leading_monomial();
  const Rational two_lc = root.leading_coefficient() * 2;
  for (std::size_t iter = 0; iter <= p.size() + 1; ++iter) {
    Poly rem = p - root * root;
    if (rem.is_zero()) return root;
    const Monomial& rm = rem.leading_monomial();
    if (!monomial_divides(root_lm, rm)) return std::nullopt;
    Monomial t = monomial_div(rm, root_lm);
    if (!MonomialLess{}(t, root_lm)) return std::nullopt;
    root += Poly::term(t, rem.leading_coefficient() / two_lc);
  }
  return std::nullopt;
}

RatFunc::RatFunc(Poly num, Poly den) {
  if (den.is_zero()) throw DivisionByZero();
  if (num.is_zero()) {
    den_ = Poly(Rational(1));
    return;
  }
  Poly g = gcd(num, den);
  if (!g.is_constant()) {
    num = *num.divide_exact(g);
    den = *den.divide_exact(g);
  }
  num_ = std::move(num);
  den_ = std::move(den);
  normalize_scale();
}

void RatFunc::normalize_scale() {
  Rational s = den_.numeric_content();
  if (sgn(den_.leading_coefficient()) < 0) s = -s;
  if (s != 1) {
    Rational inv = 1 / s;
    num_ *= inv;
    den_ *= inv;
  }
}

RatFunc RatFunc::inverse() const {
  if (num_.is_zero()) throw DivisionByZero();
  RatFunc r(den_, num_, Reduced{});
  r.normalize_scale();
  return r;
}

RatFunc RatFunc::pow(int n) const {
  if (n < 0) return inverse().pow(-n);
  RatFunc r(num_.pow(static_cast<unsigned>(n)), den_.pow(static_cast<unsigned>(n)), Reduced{});
  r.normalize_scale();
  return r;
}

RatFunc operator+(const RatFunc& a, const RatFunc& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den_ == b.den_) return RatFunc(a.num_ + b.num_, a.den_);
  if (a.den_.is_constant() && b.den_.is_constant()) {
    RatFunc r(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_, RatFunc::Reduced{});
    r.normalize_scale();
    return r;
  }
  Poly g = gcd(a.den_, b.den_);
  Poly ad = *a.den_.divide_exact(g);
  Poly bd = *b.den_.divide_exact(g);
  return RatFunc(a.num_ * bd + b.num_ * ad, a.den_ * bd);
}

RatFunc operator*(const RatFunc& a, const RatFunc& b) {
  if (a.is_zero() || b.is_zero()) return RatFunc();
  if (a.is_polynomial() && b.is_polynomial()) {
    RatFunc r(a.num_ * b.num_, a.den_ * b.den_, RatFunc::Reduced{});
    r.normalize_scale();
    return r;
  }
  Poly g1 = gcd(a.num_, b.den_);
  Poly g2 = gcd(b.num_, a.den_);
  Poly an = *a.num_.divide_exact(g1);
  Poly bd = *b.den_.divide_exact(g1);
  Poly bn = *b.num_.divide_exact(g2);
  Poly ad = *a.den_.divide_exact(g2);
  RatFunc r(an * bn, ad * bd, RatFunc::Reduced{});
  r.normalize_scale();
  return r;
}

RatFunc RatFunc::remap(std::span<const int> perm) const {
  RatFunc r(num_.remap(perm), den_.remap(perm), Reduced{});
  r.normalize_scale();
  return r;
}

}  // namespace exode
