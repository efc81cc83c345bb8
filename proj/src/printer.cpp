#include <string>

#include "exode/expression.hpp"

namespace exode {

namespace {

using K = Expression::Kind;

std::string rational_text(const Rational& q) {
  std::string s = q.get_num().get_str();
  if (q.get_den() != 1) s += "/" + q.get_den().get_str();
  return s;
}

bool is_plain_atom(const Expression& e) {
  switch (e.kind()) {
    case K::Variable:
    case K::Parameter:
    case K::Function:
      return true;
    case K::Constant:
      return sgn(e.value()) >= 0 && e.value().get_den() == 1;
    default:
      return false;
  }
}

void print_expr(const Expression& e, std::string& out);
void print_term(const Expression& e, std::string& out);

void parenthesized(const Expression& e, std::string& out) {
  out += '(';
  print_expr(e, out);
  out += ')';
}

// Operand of '^' or unary '-'.
void print_atom(const Expression& e, std::string& out) {
  if (is_plain_atom(e)) {
    print_term(e, out);
  } else {
    parenthesized(e, out);
  }
}

// Right operand of '*' or '/'.
void print_factor_right(const Expression& e, std::string& out) {
  switch (e.kind()) {
    case K::Sum:
    case K::Product:
    case K::Quotient:
    case K::Neg:
      parenthesized(e, out);
      return;
    case K::Constant:
      if (!is_plain_atom(e)) {
        parenthesized(e, out);
        return;
      }
      break;
    default:
      break;
  }
  print_term(e, out);
}

// Left operand of '/', or first factor of a product.
void print_chain_left(const Expression& e, std::string& out, bool in_product) {
  if (e.is(K::Sum) || (in_product && e.is(K::Product))) {
    parenthesized(e, out);
  } else {
    print_term(e, out);
  }
}

void print_term(const Expression& e, std::string& out) {
  switch (e.kind()) {
    case K::Constant:
      out += rational_text(e.value());
      return;
    case K::Variable:
      out += to_string(e.variable());
      return;
    case K::Parameter:
      out += e.name();
      return;
    case K::Sum:
      parenthesized(e, out);
      return;
    case K::Product: {
      auto ops = e.operands();
      print_chain_left(ops[0], out, true);
      for (std::size_t i = 1; i < ops.size(); ++i) {
        out += '*';
        print_factor_right(ops[i], out);
      }
      return;
    }
    case K::Quotient:
      print_chain_left(e.operand(0), out, false);
      out += '/';
      print_factor_right(e.operand(1), out);
      return;
    case K::Power:
      print_atom(e.operand(0), out);
      out += '^';
      print_atom(e.operand(1), out);
      return;
    case K::Neg:
      out += '-';
      print_atom(e.operand(0), out);
      return;
    case K::Function:
      out += to_string(e.function());
      out += '(';
      print_expr(e.operand(0), out);
      out += ')';
      return;
  }
}

void print_expr(const Expression& e, std::string& out) {
  if (!e.is(K::Sum)) {
    print_term(e, out);
    return;
  }
  auto ops = e.operands();
  print_term(ops[0], out);
  for (std::size_t i = 1; i < ops.size(); ++i) {
    const Expression& t = ops[i];
    if (t.is(K::Neg)) {
      out += " - ";
      print_term(t.operand(0), out);
    } else if (t.is_constant() && sgn(t.value()) < 0) {
      out += " - ";
      out += rational_text(Rational(-t.value()));
    } else {
      out += " + ";
      print_term(t, out);
    }
  }
}

}  // namespace

std::string print(const Expression& e) {
  std::string out;
  print_expr(e, out);
  return out;
}

}  // namespace exode
