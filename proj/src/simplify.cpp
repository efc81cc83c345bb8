#include "exode/simplify.hpp"

#include <algorithm>
#include <numeric>

namespace exode {

namespace {

using K = Expression::Kind;

constexpr long kMaxIntegerPower = 64;

// Split a canonical term into (rational coefficient, remaining factor).
// `rest` is empty for a pure constant.
std::pair<Rational, std::optional<Expression>> split_coefficient(const Expression& t) {
  switch (t.kind()) {
    case K::Constant:
      return {t.value(), std::nullopt};
    case K::Neg: {
      auto [c, rest] = split_coefficient(t.operand(0));
      return {Rational(-c), rest};
    }
    case K::Quotient:
      if (t.operand(1).is_constant()) {
        auto [c, rest] = split_coefficient(t.operand(0));
        return {Rational(c / t.operand(1).value()), rest};
      }
      return {Rational(1), t};
    case K::Product: {
      auto ops = t.operands();
      if (ops[0].is_constant()) {
        return {ops[0].value(), product(std::vector<Expression>(ops.begin() + 1, ops.end()))};
      }
      return {Rational(1), t};
    }
    default:
      return {Rational(1), t};
  }
}

bool fits_long(const Rational& q) { return q.get_den() == 1 && q.get_num().fits_slong_p(); }

}  // namespace

std::string kernel_key(const Expression& k) {
  char cat = '9';
  if (k.is(K::Variable)) {
    cat = static_cast<char>('0' + static_cast<int>(k.variable()));
  } else if (k.is(K::Parameter)) {
    cat = '5';
  } else if (k.is(K::Function)) {
    cat = '6';
  } else if (k.is(K::Power)) {
    cat = '7';
  }
  return std::string(1, cat) + print(k);
}

int Canonicalizer::intern(const Expression& kernel) {
  auto [it, inserted] = ids_.try_emplace(kernel, static_cast<int>(kernels_.size()));
  if (inserted) kernels_.push_back(kernel);
  return it->second;
}

int Canonicalizer::find(const Expression& kernel) const {
  auto it = ids_.find(kernel);
  return it == ids_.end() ? -1 : it->second;
}

RatFunc Canonicalizer::convert(const Expression& e) {
  switch (e.kind()) {
    case K::Constant:
      return RatFunc(e.value());
    case K::Variable:
    case K::Parameter:
      return kernel_poly(e);
    case K::Sum: {
      RatFunc acc;
      for (const auto& o : e.operands()) acc = acc + convert(o);
      return acc;
    }
    case K::Product: {
      RatFunc acc(Rational(1));
      for (const auto& o : e.operands()) {
        acc = acc * convert(o);
      }
      return acc;
    }
    case K::Quotient: {
      RatFunc n = convert(e.operand(0));
      RatFunc d = convert(e.operand(1));
      if (d.is_zero()) throw DivisionByZero();
      return n / d;
    }
    case K::Neg:
      return -convert(e.operand(0));
    case K::Power:
      return convert_power(e);
    case K::Function:
      return convert_function(e);
  }
  return RatFunc();
}

RatFunc Canonicalizer::convert_power(const Expression& e) {
  const Expression& b = e.operand(0);
  Expression ex = simplify(e.operand(1));
  if (ex.is_constant()) {
    const Rational& q = ex.value();
    if (fits_long(q) && std::labs(q.get_num().get_si()) <= kMaxIntegerPower) {
      long n = q.get_num().get_si();
      if (n == 0) return RatFunc(Rational(1));
      RatFunc base = convert(b);
      if (base.is_zero()) {
        if (n < 0) throw DivisionByZero();
        return base;
      }
      return base.pow(static_cast<int>(n));
    }
    if (q.get_den() != 1) {
      Integer fl;
      mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
      Rational frac = q - Rational(fl);
      Expression bs = simplify(b);
      if (bs.is_zero()) {
        if (sgn(q) < 0) throw DivisionByZero();
        return RatFunc();
      }
      if (bs.is_one()) return RatFunc(Rational(1));
      if (!fl.fits_slong_p() || std::labs(fl.get_si()) > kMaxIntegerPower) {
        return kernel_poly(power(bs, ex));
      }
      RatFunc radical;
      if (frac == Rational(1, 2)) {
        if (bs.is_constant() && is_perfect_square(bs.value())) {
          radical = RatFunc(rational_sqrt(bs.value()));
        } else {
          radical = kernel_poly(apply(Func::Sqrt, bs));
        }
      } else {
        radical = kernel_poly(power(bs, constant(frac)));
      }
      long n = fl.get_si();
      if (n == 0) return radical;
      return convert(bs).pow(static_cast<int>(n)) * radical;
    }
  }
  Expression bs = simplify(b);
  if (bs.is_one()) return RatFunc(Rational(1));
  return kernel_poly(power(bs, ex));
}

RatFunc Canonicalizer::convert_function(const Expression& e) {
  Expression u = simplify(e.operand(0));
  switch (e.function()) {
    case Func::Exp:
      return convert_exp(u);
    case Func::Ln:
      if (u.is_one()) return RatFunc();
      if (u.is(K::Function) && u.function() == Func::Exp) return convert(u.operand(0));
      break;
    case Func::Sqrt:
      if (u.is_zero()) return RatFunc();
      if (u.is_constant() && is_perfect_square(u.value())) return RatFunc(rational_sqrt(u.value()));
      break;
    case Func::Sin:
    case Func::Atan:
      if (u.is_zero()) return RatFunc();
      break;
    case Func::Cos:
      if (u.is_zero()) return RatFunc(Rational(1));
      break;
  }
  return kernel_poly(apply(e.function(), u));
}

RatFunc Canonicalizer::convert_exp(const Expression& arg) {
  if (arg.is_zero()) return RatFunc(Rational(1));
  std::vector<Expression> terms;
  if (arg.is(K::Sum)) {
    terms.assign(arg.operands().begin(), arg.operands().end());
  } else {
    terms.push_back(arg);
  }
  RatFunc acc(Rational(1));
  for (const auto& t : terms) {
    auto [c, rest] = split_coefficient(t);
    Expression base = rest ? *rest : constant(1);
    if (rest && rest->is(K::Function) && rest->function() == Func::Ln) {
      // exp(c*ln(w)) = w^c
      acc = acc * convert(power(rest->operand(0), constant(c)));
      continue;
    }
    const Integer& den = c.get_den();
    Expression karg = den == 1 ? base : simplify(quotient(base, constant(Rational(den))));
    Integer num = c.get_num();
    if (!num.fits_slong_p() || std::labs(num.get_si()) > kMaxIntegerPower) {
      acc = acc * kernel_poly(apply(Func::Exp, simplify(constant(c) * base)));
      continue;
    }
    acc = acc * kernel_poly(apply(Func::Exp, karg)).pow(static_cast<int>(num.get_si()));
  }
  return acc;
}

RatFunc Canonicalizer::reduce_radicals(const RatFunc& r) {
  RatFunc cur = r;
  for (int round = 0; round < 8; ++round) {
    bool changed = false;
    for (std::size_t id = 0; id < kernels_.size(); ++id) {
      const Expression k = kernels_[id];
      Expression radicand;
      Rational q;
      if (k.is(K::Function) && k.function() == Func::Sqrt) {
        radicand = k.operand(0);
        q = Rational(1, 2);
      } else if (k.is(K::Power) && k.operand(1).is_constant()) {
        radicand = k.operand(0);
        q = k.operand(1).value();
      } else {
        continue;
      }
      const int b = static_cast<int>(q.get_den().get_si());
      const int a = static_cast<int>(q.get_num().get_si());
      int var = static_cast<int>(id);
      if (cur.num().degree(var) < b && cur.den().degree(var) < b) continue;
      RatFunc w = convert(radicand).pow(a);
      auto rewrite = [&](const Poly& p) {
        RatFunc out;
        for (const auto& [m, c] : p.terms()) {
          int e = var < static_cast<int>(m.size()) ? m[static_cast<std::size_t>(var)] : 0;
          Monomial mm = m;
          if (e > 0) mm[static_cast<std::size_t>(var)] = e % b;
          RatFunc t(Poly::term(mm, c));
          if (e >= b) t = t * w.pow(e / b);
          out = out + t;
        }
        return out;
      };
      cur = rewrite(cur.num()) / rewrite(cur.den());
      changed = true;
    }
    if (!changed) break;
  }
  return cur;
}

std::vector<int> Canonicalizer::canonical_ranks() const {
  std::vector<int> order(kernels_.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::string> keys;
  keys.reserve(kernels_.size());
  for (const auto& k : kernels_) keys.push_back(kernel_key(k));
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return keys[static_cast<std::size_t>(a)] < keys[static_cast<std::size_t>(b)];
  });
  std::vector<int> rank(kernels_.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
  return rank;
}

Expression Canonicalizer::to_expression(const Poly& p) const {
  if (p.is_zero()) return constant(0);
  std::vector<int> rank = canonical_ranks();
  std::vector<int> by_rank(rank.size());
  for (std::size_t i = 0; i < rank.size(); ++i) by_rank[static_cast<std::size_t>(rank[i])] = static_cast<int>(i);

  struct Term {
    Monomial ranked;
    int degree;
    const Monomial* m;
    const Rational* c;
  };
  std::vector<Term> terms;
  for (const auto& [m, c] : p.terms()) {
    Monomial ranked(rank.size(), 0);
    int deg = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      ranked[static_cast<std::size_t>(rank[i])] = m[i];
      deg += m[i];
    }
    terms.push_back({std::move(ranked), deg, &m, &c});
  }
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    if (a.degree != b.degree) return a.degree > b.degree;
    return MonomialLess{}(b.ranked, a.ranked);
  });

  std::vector<Expression> out;
  for (const auto& t : terms) {
    const Rational& c = *t.c;
    std::vector<Expression> factors;
    Integer num = abs(c.get_num());
    if (num != 1 || t.degree == 0) factors.push_back(constant(Rational(num)));
    for (std::size_t r = 0; r < t.ranked.size(); ++r) {
      int e = t.ranked[r];
      if (e == 0) continue;
      const Expression& k = kernels_[static_cast<std::size_t>(by_rank[r])];
      factors.push_back(e == 1 ? k : pow(k, e));
    }
    Expression term = product(std::move(factors));
    if (c.get_den() != 1) term = quotient(term, constant(Rational(c.get_den())));
    if (sgn(c) < 0) term = neg(term);
    out.push_back(std::move(term));
  }
  return sum(std::move(out));
}

Expression Canonicalizer::to_expression(const RatFunc& r) const {
  if (r.is_polynomial()) {
    Poly n = r.num();
    n *= Rational(1 / r.den().constant_value());
    return to_expression(n);
  }
  return quotient(to_expression(r.num()), to_expression(r.den()));
}

Expression simplify(const Expression& e) {
  switch (e.kind()) {
    case K::Constant:
    case K::Variable:
    case K::Parameter:
      return e;
    default:
      break;
  }
  try {
    Canonicalizer c;
    RatFunc r = c.reduce_radicals(c.convert(e));
    // Renumber kernels in canonical order so normalization does not depend
    // on discovery order.
    std::vector<int> rank = c.canonical_ranks();
    std::vector<Expression> ks(c.kernels().size());
    for (std::size_t i = 0; i < ks.size(); ++i) ks[static_cast<std::size_t>(rank[i])] = c.kernels()[i];
    Canonicalizer sorted;
    for (const auto& k : ks) sorted.intern(k);
    return sorted.to_expression(r.remap(rank));
  } catch (const DivisionByZero&) {
    return e;
  }
}

}  // namespace exode
