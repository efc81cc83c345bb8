#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "exode/expression.hpp"

namespace exode {

/// Exponent vector indexed by variable id, trailing zeros trimmed.
using Monomial = std::vector<int>;

/// Lexicographic order; variable 0 is the most significant.
struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

Monomial monomial_mul(const Monomial& a, const Monomial& b);
bool monomial_divides(const Monomial& d, const Monomial& m);
Monomial monomial_div(const Monomial& m, const Monomial& d);

/// Sparse multivariate polynomial over Q.
class Poly {
 public:
  using Terms = std::map<Monomial, Rational, MonomialLess>;

  Poly() = default;
  explicit Poly(const Rational& c);
  static Poly variable(int id, int power = 1);
  static Poly term(Monomial m, const Rational& c);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_value() const;
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  int degree(int var) const;
  int total_degree() const;
  bool depends_on(int var) const;
  /// Smallest variable id with a positive exponent, or -1.
  int min_var() const;
  /// Number of variable slots in use (max id + 1).
  int width() const;

  /// Coefficient of var^k, free of var.
  Poly coeff(int var, int k) const;
  Poly leading_coeff(int var) const { return coeff(var, degree(var)); }

  const Monomial& leading_monomial() const { return terms_.rbegin()->first; }
  const Rational& leading_coefficient() const { return terms_.rbegin()->second; }

  Poly derivative(int var) const;
  Poly pow(unsigned n) const;
  /// Scaled so the leading coefficient is 1.
  Poly monic() const;
  /// Positive rational c such that this/c has coprime integer coefficients.
  Rational numeric_content() const;

  std::optional<Poly> divide_exact(const Poly& d) const;
  Poly substitute(int var, const Poly& value) const;
  /// Renumber variables: old id i becomes perm[i].
  Poly remap(std::span<const int> perm) const;

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Rational& c);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(Poly a, const Rational& c) { return a *= c; }
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }

  void add_term(const Monomial& m, const Rational& c);

 private:
  Terms terms_;
};

/// Greatest common divisor, normalized monic (1 when coprime).
Poly gcd(const Poly& a, const Poly& b);
/// gcd of the coefficients of `p` viewed as a polynomial in `var`.
Poly content(const Poly& p, int var);
Poly primitive_part(const Poly& p, int var);
/// Pseudo-remainder of a by b with respect to var.
Poly pseudo_remainder(const Poly& a, const Poly& b, int var);
/// Exact polynomial square root, if one exists.
std::optional<Poly> poly_sqrt(const Poly& p);

bool is_perfect_square(const Rational& q);
Rational rational_sqrt(const Rational& q);  // precondition: is_perfect_square

class DivisionByZero : public std::domain_error {
 public:
  DivisionByZero() : std::domain_error("division by the zero polynomial") {}
};

/// Reduced rational function: gcd(num, den) = 1, den has coprime integer
/// coefficients and a positive leading coefficient.
class RatFunc {
 public:
  RatFunc() : den_(Rational(1)) {}
  RatFunc(const Rational& c) : num_(c), den_(Rational(1)) {}
  RatFunc(Poly p) : num_(std::move(p)), den_(Rational(1)) {}
  RatFunc(Poly num, Poly den);

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  Rational constant_value() const { return num_.constant_value() / den_.constant_value(); }
  bool depends_on(int var) const { return num_.depends_on(var) || den_.depends_on(var); }

  RatFunc inverse() const;
  RatFunc pow(int n) const;
  RatFunc operator-() const { return RatFunc(-num_, den_, {}); }
  friend RatFunc operator+(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }
  friend RatFunc operator*(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b) { return a * b.inverse(); }
  friend bool operator==(const RatFunc& a, const RatFunc& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  RatFunc remap(std::span<const int> perm) const;

 private:
  struct Reduced {};
  RatFunc(Poly num, Poly den, Reduced) : num_(std::move(num)), den_(std::move(den)) {}
  void normalize_scale();

  Poly num_;
  Poly den_;
};

}  // namespace exode
