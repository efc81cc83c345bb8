#include "exode/expression.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>

namespace exode {

struct Node {
  Expression::Kind kind = Expression::Kind::Constant;
  Rational value;
  Var var = Var::X;
  Func fn = Func::Exp;
  std::string name;
  std::vector<Expression> ops;
  std::size_t hash = 0;
};

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_rational(const Rational& q) {
  std::size_t h = std::hash<long>{}(mpz_get_si(q.get_num_mpz_t()));
  h = mix(h, std::hash<long>{}(mpz_get_si(q.get_den_mpz_t())));
  return mix(h, mpz_size(q.get_num_mpz_t()));
}

const Expression& zero_constant() {
  static const Expression z = constant(0);
  return z;
}

}  // namespace

Expression make_node(Node&& n) {
  std::size_t h = static_cast<std::size_t>(n.kind) * 1315423911ULL;
  switch (n.kind) {
    case Expression::Kind::Constant:
      h = mix(h, hash_rational(n.value));
      break;
    case Expression::Kind::Variable:
      h = mix(h, static_cast<std::size_t>(n.var));
      break;
    case Expression::Kind::Parameter:
      h = mix(h, std::hash<std::string>{}(n.name));
      break;
    case Expression::Kind::Function:
      h = mix(h, static_cast<std::size_t>(n.fn));
      break;
    default:
      break;
  }
  for (const auto& o : n.ops) h = mix(h, o.hash());
  n.hash = h;
  return Expression(std::make_shared<const Node>(std::move(n)));
}

std::string_view to_string(Var v) {
  switch (v) {
    case Var::X: return "x";
    case Var::Y: return "y";
    case Var::P: return "p";
  }
  return "?";
}

std::string_view to_string(Func f) {
  switch (f) {
    case Func::Exp: return "exp";
    case Func::Ln: return "ln";
    case Func::Sqrt: return "sqrt";
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Atan: return "atan";
  }
  return "?";
}

double Point3::operator[](Var v) const {
  switch (v) {
    case Var::X: return x;
    case Var::Y: return y;
    case Var::P: return p;
  }
  return x;
}

double& Point3::operator[](Var v) {
  switch (v) {
    case Var::X: return x;
    case Var::Y: return y;
    case Var::P: return p;
  }
  return x;
}

bool Point3::is_finite() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(p);
}

std::string to_string(const Point3& pt) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "(x=%.17g, y=%.17g, p=%.17g)", pt.x, pt.y, pt.p);
  return buf;
}

Expression::Expression() : node_(zero_constant().node_) {}

Expression::Kind Expression::kind() const { return node_->kind; }
const Rational& Expression::value() const { return node_->value; }
Var Expression::variable() const { return node_->var; }
const std::string& Expression::name() const { return node_->name; }
Func Expression::function() const { return node_->fn; }
std::span<const Expression> Expression::operands() const { return node_->ops; }
std::size_t Expression::hash() const { return node_->hash; }

bool Expression::is_zero() const { return kind() == Kind::Constant && sgn(value()) == 0; }
bool Expression::is_one() const { return kind() == Kind::Constant && value() == 1; }

bool operator==(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash()) return false;
  return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const Node& x = *a.node_;
  const Node& y = *b.node_;
  if (auto c = x.kind <=> y.kind; c != 0) return c;
  switch (x.kind) {
    case Expression::Kind::Constant: {
      int c = cmp(x.value, y.value);
      return c < 0 ? std::strong_ordering::less
                   : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }
    case Expression::Kind::Variable:
      return x.var <=> y.var;
    case Expression::Kind::Parameter:
      return x.name <=> y.name;
    case Expression::Kind::Function:
      if (auto c = x.fn <=> y.fn; c != 0) return c;
      break;
    default:
      break;
  }
  if (auto c = x.ops.size() <=> y.ops.size(); c != 0) return c;
  for (std::size_t i = 0; i < x.ops.size(); ++i) {
    if (auto c = x.ops[i] <=> y.ops[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

Expression constant(const Rational& q) {
  Node n;
  n.kind = Expression::Kind::Constant;
  n.value = q;
  n.value.canonicalize();
  return make_node(std::move(n));
}

Expression constant(long v) { return constant(Rational(v)); }
Expression constant(long num, long den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  Rational q{Integer(num), Integer(den)};
  q.canonicalize();
  return constant(q);
}

Expression variable(Var v) {
  Node n;
  n.kind = Expression::Kind::Variable;
  n.var = v;
  return make_node(std::move(n));
}

Expression parameter(std::string name) {
  Node n;
  n.kind = Expression::Kind::Parameter;
  n.name = std::move(name);
  return make_node(std::move(n));
}

Expression sum(std::vector<Expression> terms) {
  if (terms.empty()) return constant(0);
  if (terms.size() == 1) return terms.front();
  Node n;
  n.kind = Expression::Kind::Sum;
  n.ops = std::move(terms);
  return make_node(std::move(n));
}

Expression product(std::vector<Expression> factors) {
  if (factors.empty()) return constant(1);
  if (factors.size() == 1) return factors.front();
  Node n;
  n.kind = Expression::Kind::Product;
  n.ops = std::move(factors);
  return make_node(std::move(n));
}

Expression quotient(Expression num, Expression den) {
  if (num.is_constant() && den.is_constant() && sgn(den.value()) != 0) {
    return constant(Rational(num.value() / den.value()));
  }
  Node n;
  n.kind = Expression::Kind::Quotient;
  n.ops = {std::move(num), std::move(den)};
  return make_node(std::move(n));
}

Expression power(Expression base, Expression exponent) {
  Node n;
  n.kind = Expression::Kind::Power;
  n.ops = {std::move(base), std::move(exponent)};
  return make_node(std::move(n));
}

Expression neg(Expression e) {
  if (e.is_constant()) return constant(Rational(-e.value()));
  if (e.is(Expression::Kind::Neg)) return e.operand(0);
  Node n;
  n.kind = Expression::Kind::Neg;
  n.ops = {std::move(e)};
  return make_node(std::move(n));
}

Expression apply(Func f, Expression arg) {
  Node n;
  n.kind = Expression::Kind::Function;
  n.fn = f;
  n.ops = {std::move(arg)};
  return make_node(std::move(n));
}

Expression operator+(const Expression& a, const Expression& b) {
  std::vector<Expression> t;
  if (a.is(Expression::Kind::Sum)) {
    t.assign(a.operands().begin(), a.operands().end());
  } else {
    t.push_back(a);
  }
  t.push_back(b);
  return sum(std::move(t));
}

Expression operator-(const Expression& a, const Expression& b) { return a + neg(b); }

Expression operator*(const Expression& a, const Expression& b) {
  std::vector<Expression> t;
  if (a.is(Expression::Kind::Product)) {
    t.assign(a.operands().begin(), a.operands().end());
  } else {
    t.push_back(a);
  }
  t.push_back(b);
  return product(std::move(t));
}

Expression operator/(const Expression& a, const Expression& b) { return quotient(a, b); }
Expression operator-(const Expression& a) { return neg(a); }
Expression pow(const Expression& base, long n) { return power(base, constant(n)); }
Expression exp(const Expression& a) { return apply(Func::Exp, a); }
Expression ln(const Expression& a) { return apply(Func::Ln, a); }
Expression sqrt(const Expression& a) { return apply(Func::Sqrt, a); }

bool contains(const Expression& e, Var v) {
  if (e.is(Expression::Kind::Variable)) return e.variable() == v;
  return std::any_of(e.operands().begin(), e.operands().end(),
                     [v](const Expression& o) { return contains(o, v); });
}

bool contains_parameter(const Expression& e) {
  if (e.is(Expression::Kind::Parameter)) return true;
  return std::any_of(e.operands().begin(), e.operands().end(),
                     [](const Expression& o) { return contains_parameter(o); });
}

namespace {
void collect_parameters(const Expression& e, std::set<std::string>& out) {
  if (e.is(Expression::Kind::Parameter)) out.insert(e.name());
  for (const auto& o : e.operands()) collect_parameters(o, out);
}

template <typename F>
Expression rebuild(const Expression& e, F&& leaf) {
  using K = Expression::Kind;
  switch (e.kind()) {
    case K::Constant:
    case K::Variable:
    case K::Parameter:
      return leaf(e);
    default:
      break;
  }
  std::vector<Expression> ops;
  ops.reserve(e.operands().size());
  bool changed = false;
  for (const auto& o : e.operands()) {
    ops.push_back(rebuild(o, leaf));
    changed = changed || !(ops.back() == o);
  }
  if (!changed) return e;
  switch (e.kind()) {
    case K::Sum: return sum(std::move(ops));
    case K::Product: return product(std::move(ops));
    case K::Quotient: return quotient(ops[0], ops[1]);
    case K::Power: return power(ops[0], ops[1]);
    case K::Neg: return neg(ops[0]);
    case K::Function: return apply(e.function(), ops[0]);
    default: return e;
  }
}
}  // namespace

std::vector<std::string> parameters(const Expression& e) {
  std::set<std::string> s;
  collect_parameters(e, s);
  return {s.begin(), s.end()};
}

Expression substitute(const Expression& e, Var v, const Expression& with) {
  return rebuild(e, [&](const Expression& leaf) {
    if (leaf.is(Expression::Kind::Variable) && leaf.variable() == v) return with;
    return leaf;
  });
}

Expression bind(const Expression& e, const Bindings& b) {
  return rebuild(e, [&](const Expression& leaf) {
    if (leaf.is(Expression::Kind::Parameter)) {
      if (auto it = b.find(leaf.name()); it != b.end()) return constant(to_rational(it->second));
    }
    return leaf;
  });
}

Rational to_rational(double d) {
  if (!std::isfinite(d)) throw std::invalid_argument("cannot convert a non-finite double to a rational");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, res.ptr);
  bool negative = false;
  std::size_t i = 0;
  if (s[i] == '-') {
    negative = true;
    ++i;
  }
  std::string digits;
  long exp10 = 0;
  bool frac = false;
  for (; i < s.size() && s[i] != 'e'; ++i) {
    if (s[i] == '.') {
      frac = true;
      continue;
    }
    digits.push_back(s[i]);
    if (frac) --exp10;
  }
  if (i < s.size()) exp10 += std::stol(s.substr(i + 1));
  Integer mant(digits.empty() ? "0" : digits, 10);
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
  Rational q = exp10 >= 0 ? Rational(mant * scale) : Rational(mant, scale);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

double to_double(const Rational& q) { return q.get_d(); }

}  // namespace exode
