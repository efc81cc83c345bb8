#include "exode/expression.hpp"
#include "exode/simplify.hpp"

namespace exode {

namespace {

using K = Expression::Kind;

Expression d(const Expression& e, Var v) {
  if (!contains(e, v)) return constant(0);
  switch (e.kind()) {
    case K::Constant:
    case K::Parameter:
      return constant(0);
    case K::Variable:
      return constant(e.variable() == v ? 1 : 0);
    case K::Sum: {
      std::vector<Expression> terms;
      for (const auto& o : e.operands()) {
        if (contains(o, v)) terms.push_back(d(o, v));
      }
      return sum(std::move(terms));
    }
    case K::Product: {
      auto ops = e.operands();
      std::vector<Expression> terms;
      for (std::size_t i = 0; i < ops.size(); ++i) {
        if (!contains(ops[i], v)) continue;
        std::vector<Expression> f(ops.begin(), ops.end());
        f[i] = d(ops[i], v);
        terms.push_back(product(std::move(f)));
      }
      return sum(std::move(terms));
    }
    case K::Quotient: {
      const Expression& n = e.operand(0);
      const Expression& m = e.operand(1);
      if (!contains(m, v)) return quotient(d(n, v), m);
      return quotient(d(n, v) * m - n * d(m, v), pow(m, 2));
    }
    case K::Power: {
      const Expression& b = e.operand(0);
      const Expression& x = e.operand(1);
      if (!contains(x, v)) {
        return product({x, power(b, x - constant(1)), d(b, v)});
      }
      return e * (d(x, v) * ln(b) + x * d(b, v) / b);
    }
    case K::Neg:
      return neg(d(e.operand(0), v));
    case K::Function: {
      const Expression& u = e.operand(0);
      Expression du = d(u, v);
      switch (e.function()) {
        case Func::Exp: return e * du;
        case Func::Ln: return du / u;
        case Func::Sqrt: return du / (constant(2) * e);
        case Func::Sin: return apply(Func::Cos, u) * du;
        case Func::Cos: return neg(apply(Func::Sin, u) * du);
        case Func::Atan: return du / (constant(1) + pow(u, 2));
      }
    }
  }
  return constant(0);
}

}  // namespace

Expression differentiate_raw(const Expression& e, Var v) { return d(e, v); }

Expression differentiate(const Expression& e, Var v) { return simplify(d(e, v)); }

}  // namespace exode
