#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace exode {

using Rational = mpq_class;
using Integer = mpz_class;

/// The three independent symbols. `P` stands for y'.
enum class Var : std::uint8_t { X, Y, P };

enum class Func : std::uint8_t { Exp, Ln, Sqrt, Sin, Cos, Atan };

std::string_view to_string(Var v);
std::string_view to_string(Func f);

/// Parameter values used at evaluation time.
using Bindings = std::map<std::string, double, std::less<>>;

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double p = 0.0;

  double operator[](Var v) const;
  double& operator[](Var v);
  bool is_finite() const;
  friend bool operator==(const Point3&, const Point3&) = default;
};

std::string to_string(const Point3& pt);

struct Node;

/// Immutable expression tree over x, y, p, named parameters and exact
/// rational constants. Copies share structure.
class Expression {
 public:
  enum class Kind : std::uint8_t {
    Constant,
    Variable,
    Parameter,
    Sum,
    Product,
    Quotient,
    Power,
    Neg,
    Function,
  };

  /// The zero constant.
  Expression();

  Kind kind() const;
  bool is(Kind k) const { return kind() == k; }

  // Accessors; each requires the matching kind.
  const Rational& value() const;
  Var variable() const;
  const std::string& name() const;
  Func function() const;

  /// Sum/Product: all terms. Quotient: {numerator, denominator}.
  /// Power: {base, exponent}. Neg and Function: {argument}.
  std::span<const Expression> operands() const;
  const Expression& operand(std::size_t i) const { return operands()[i]; }

  bool is_constant() const { return is(Kind::Constant); }
  bool is_zero() const;
  bool is_one() const;

  std::size_t hash() const;

  friend bool operator==(const Expression& a, const Expression& b);
  /// Total structural order; used for canonical sorting.
  friend std::strong_ordering operator<=>(const Expression& a, const Expression& b);

 private:
  explicit Expression(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;

  friend Expression make_node(Node&& n);
};

struct ExpressionHash {
  std::size_t operator()(const Expression& e) const { return e.hash(); }
};

// Factories. They fold only what the parser would also fold, so printing and
// re-parsing reproduces the same tree: negation of a constant, double
// negation, and a quotient of two constants.
Expression constant(const Rational& q);
Expression constant(long n);
Expression constant(long num, long den);
Expression variable(Var v);
Expression parameter(std::string name);
Expression sum(std::vector<Expression> terms);
Expression product(std::vector<Expression> factors);
Expression quotient(Expression num, Expression den);
Expression power(Expression base, Expression exponent);
Expression neg(Expression e);
Expression apply(Func f, Expression arg);

inline Expression x_() { return variable(Var::X); }
inline Expression y_() { return variable(Var::Y); }
inline Expression p_() { return variable(Var::P); }

Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);
Expression pow(const Expression& base, long n);
Expression exp(const Expression& a);
Expression ln(const Expression& a);
Expression sqrt(const Expression& a);

bool contains(const Expression& e, Var v);
bool contains_parameter(const Expression& e);
std::vector<std::string> parameters(const Expression& e);

/// Replace every occurrence of `v` by `with`. No simplification.
Expression substitute(const Expression& e, Var v, const Expression& with);
/// Replace bound parameters by their values (as short decimal rationals).
Expression bind(const Expression& e, const Bindings& b);

/// Shortest decimal representation of a double, as an exact rational.
Rational to_rational(double d);
double to_double(const Rational& q);

// ---- printing / parsing -------------------------------------------------

/// Canonical text: explicit `*` and `^`, parentheses only where precedence
/// requires them. parse(print(e)) == e for trees built with the factories.
std::string print(const Expression& e);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

Expression parse(std::string_view text);

// ---- evaluation ---------------------------------------------------------

class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, std::string subexpression, Point3 at);
  const std::string& subexpression() const { return sub_; }
  const Point3& point() const { return at_; }

 private:
  std::string sub_;
  Point3 at_;
};

class UnboundParameter : public std::invalid_argument {
 public:
  explicit UnboundParameter(const std::string& name);
};

double evaluate(const Expression& e, const Point3& at, const Bindings& params = {});

// ---- calculus -----------------------------------------------------------

/// Partial derivative treating x, y, p as independent symbols; simplified.
Expression differentiate(const Expression& e, Var v);
/// Same, without the final simplification pass.
Expression differentiate_raw(const Expression& e, Var v);

}  // namespace exode

template <>
struct std::hash<exode::Expression> {
  std::size_t operator()(const exode::Expression& e) const { return e.hash(); }
};
