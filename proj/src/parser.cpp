// Recursive-descent parser for the expression grammar
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' atom)?
//   atom   := number | x | y | p | y' | identifier | function '(' expr ')'
//           | '(' expr ')' | '-' atom

#include <cctype>
#include <optional>

#include "exode/expression.hpp"

namespace exode {

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

namespace {

enum class Tok { Number, Ident, Var, Op, End };

struct Token {
  Tok kind = Tok::End;
  std::size_t offset = 0;
  char op = 0;
  std::string text;
  Rational number;
  Var var = Var::X;
};

bool is_function_name(std::string_view s, Func& f) {
  static constexpr Func all[] = {Func::Exp, Func::Ln, Func::Sqrt, Func::Sin, Func::Cos, Func::Atan};
  for (Func g : all) {
    if (to_string(g) == s) {
      f = g;
      return true;
    }
  }
  return false;
}

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  Token next() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    Token t;
    t.offset = pos_;
    if (pos_ >= s_.size()) return t;
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(t);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident(t);
    if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^' || c == '(' || c == ')') {
      t.kind = Tok::Op;
      t.op = c;
      ++pos_;
      return t;
    }
    if (c == '\'') throw ParseError("unexpected prime", pos_);
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

 private:
  Token number(Token t) {
    std::size_t start = pos_;
    std::string digits;
    long exp10 = 0;
    bool seen_digit = false;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      digits.push_back(s_[pos_++]);
      seen_digit = true;
    }
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        digits.push_back(s_[pos_++]);
        --exp10;
        seen_digit = true;
      }
    }
    if (!seen_digit) throw ParseError("malformed number", start);
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t epos = pos_++;
      bool negative = false;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) negative = s_[pos_++] == '-';
      std::string e;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) e.push_back(s_[pos_++]);
      if (e.empty() || e.size() > 6) throw ParseError("malformed number exponent", epos);
      exp10 += negative ? -std::stol(e) : std::stol(e);
    }
    if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
      throw ParseError("malformed number", start);
    }
    Integer mant(digits, 10);
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
    t.number = exp10 >= 0 ? Rational(mant * scale) : Rational(mant, scale);
    t.number.canonicalize();
    t.kind = Tok::Number;
    return t;
  }

  Token ident(Token t) {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    t.text = std::string(s_.substr(start, pos_ - start));
    if (pos_ < s_.size() && s_[pos_] == '\'') {
      if (t.text != "y") throw ParseError("prime is only allowed on y", pos_);
      if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '\'') {
        throw ParseError("second derivatives are not expressions", start);
      }
      ++pos_;
      t.kind = Tok::Var;
      t.var = Var::P;
      return t;
    }
    if (t.text == "x" || t.text == "y" || t.text == "p") {
      t.kind = Tok::Var;
      t.var = t.text == "x" ? Var::X : (t.text == "y" ? Var::Y : Var::P);
      return t;
    }
    t.kind = Tok::Ident;
    return t;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view s) : lex_(s) { advance(); }

  Expression parse_all() {
    Expression e = expr();
    if (cur_.kind != Tok::End) throw ParseError("unexpected trailing input", cur_.offset);
    return e;
  }

 private:
  void advance() {
    cur_ = peeked_ ? std::move(*peeked_) : lex_.next();
    peeked_.reset();
  }
  const Token& peek() {
    if (!peeked_) peeked_ = lex_.next();
    return *peeked_;
  }
  bool at_op(char c) const { return cur_.kind == Tok::Op && cur_.op == c; }

  Expression expr() {
    std::vector<Expression> terms;
    terms.push_back(term());
    while (at_op('+') || at_op('-')) {
      bool minus = cur_.op == '-';
      advance();
      Expression t = term();
      terms.push_back(minus ? neg(std::move(t)) : std::move(t));
    }
    return sum(std::move(terms));
  }

  Expression term() {
    Expression acc = factor();
    bool chain_product = false;
    // A leading number followed by `/number` (not raised to a power) is a
    // rational literal such as 3/2.
    if (acc.is_constant() && at_op('/') && peek().kind == Tok::Number) {
      advance();
      Rational den = cur_.number;
      std::size_t off = cur_.offset;
      advance();
      if (at_op('^')) {
        Expression d = power(constant(den), exponent_atom());
        acc = quotient(acc, d);
      } else {
        if (sgn(den) == 0) throw ParseError("division by zero literal", off);
        acc = constant(Rational(acc.value() / den));
      }
    }
    while (at_op('*') || at_op('/')) {
      char op = cur_.op;
      advance();
      Expression rhs = factor();
      if (op == '*') {
        if (chain_product) {
          std::vector<Expression> f(acc.operands().begin(), acc.operands().end());
          f.push_back(std::move(rhs));
          acc = product(std::move(f));
        } else {
          acc = product({acc, std::move(rhs)});
          chain_product = true;
        }
      } else {
        acc = quotient(acc, std::move(rhs));
        chain_product = false;
      }
    }
    return acc;
  }

  Expression exponent_atom() {
    advance();  // '^'
    return atom();
  }

  Expression factor() {
    Expression base = atom();
    if (at_op('^')) return power(std::move(base), exponent_atom());
    return base;
  }

  Expression atom() {
    switch (cur_.kind) {
      case Tok::Number: {
        Expression e = constant(cur_.number);
        advance();
        return e;
      }
      case Tok::Var: {
        Expression e = variable(cur_.var);
        advance();
        return e;
      }
      case Tok::Ident: {
        std::string name = cur_.text;
        std::size_t off = cur_.offset;
        advance();
        if (at_op('(')) {
          Func f;
          if (!is_function_name(name, f)) throw ParseError("unknown function '" + name + "'", off);
          advance();
          Expression arg = expr();
          if (!at_op(')')) throw ParseError("expected ')'", cur_.offset);
          advance();
          return apply(f, std::move(arg));
        }
        Func f;
        if (is_function_name(name, f)) throw ParseError("function '" + name + "' needs an argument", off);
        return parameter(std::move(name));
      }
      case Tok::Op:
        if (cur_.op == '(') {
          advance();
          Expression e = expr();
          if (!at_op(')')) throw ParseError("expected ')'", cur_.offset);
          advance();
          return e;
        }
        if (cur_.op == '-') {
          advance();
          return neg(atom());
        }
        throw ParseError(std::string("unexpected '") + cur_.op + "'", cur_.offset);
      case Tok::End:
        throw ParseError("unexpected end of input", cur_.offset);
    }
    throw ParseError("unexpected token", cur_.offset);
  }

  Lexer lex_;
  Token cur_;
  std::optional<Token> peeked_;
};

}  // namespace

Expression parse(std::string_view text) { return Parser(text).parse_all(); }

}  // namespace exode
