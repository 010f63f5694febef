#include "lpdo/parse.hpp"

#include <cctype>

namespace lpdo {

namespace {

struct Parser {
  const std::string& text;
  const ParamDeps& deps;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool accept(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos);
  }

  BigInt parse_integer() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) throw ParseError("expected integer", pos);
    return BigInt(text.substr(start, pos - start));
  }

  std::string parse_ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    return text.substr(start, pos - start);
  }

  Rational parse_exponent() {
    skip_ws();
    bool negative = accept('-');
    BigInt n = parse_integer();
    BigInt d = 1;
    // Consume "/den" only when a digit follows; otherwise the slash is a
    // term-level division.
    if (peek() == '/' && pos + 1 < text.size() &&
        std::isdigit(static_cast<unsigned char>(text[pos + 1]))) {
      ++pos;
      d = parse_integer();
      if (d == 0) throw ParseError("malformed rational: zero denominator", pos);
    }
    Rational e(n, d);
    return negative ? Rational(-e) : e;
  }

  Lpdo parse_sum() {
    Lpdo acc = parse_term();
    while (true) {
      if (accept('+'))
        acc = acc + parse_term();
      else if (accept('-'))
        acc = acc - parse_term();
      else
        return acc;
    }
  }

  Lpdo parse_term() {
    Lpdo acc = parse_factor();
    while (true) {
      if (accept('*')) {
        acc = compose(acc, parse_factor());
      } else if (accept('/')) {
        std::size_t at = pos;
        Lpdo rhs = parse_factor();
        if (!rhs.is_zero_operator() && rhs.order() > 0)
          throw ParseError("division by an operator of positive order", at);
        Expr f = rhs.coeff(0, 0);
        if (is_literal_zero(f)) throw ParseError("division by zero", at);
        acc = scale(pow(f, Rational(-1)), acc);
      } else {
        return acc;
      }
    }
  }

  Lpdo parse_factor() {
    // Unary minus binds looser than '^': -Dx^2 is -(Dx^2).
    if (peek() == '-') {
      ++pos;
      return neg(parse_factor());
    }
    Lpdo base = parse_atom();
    if (!accept('^')) return base;
    std::size_t at = pos;
    Rational e = parse_exponent();
    if (base.is_zero_operator() || base.order() == 0) return Lpdo::from_expr(pow(base.coeff(0, 0), e));
    if (!is_integer(e) || e < 0)
      throw ParseError("operator powers require a nonnegative integer exponent", at);
    long k = to_long(numer(e));
    Lpdo acc = Lpdo::identity();
    for (long i = 0; i < k; ++i) acc = compose(acc, base);
    return acc;
  }

  Lpdo parse_atom() {
    skip_ws();
    if (pos >= text.size()) throw ParseError("unexpected end of input", pos);
    char c = text[pos];
    if (c == '-') {
      ++pos;
      return neg(parse_factor());
    }
    if (c == '(') {
      ++pos;
      Lpdo inner = parse_sum();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return Lpdo::from_expr(make_num(Rational(parse_integer())));
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t at = pos;
      std::string id = parse_ident();
      if (id == "x") return Lpdo::from_expr(var_x());
      if (id == "y") return Lpdo::from_expr(var_y());
      if (id == "Dx") return Lpdo::dx();
      if (id == "Dy") return Lpdo::dy();
      if (id == "sqrt2") return Lpdo::from_expr(sqrt2());
      if (id == "pi") return Lpdo::from_expr(pi());
      if (peek() == '(') {
        FunId f;
        if (id == "sin")
          f = FunId::Sin;
        else if (id == "cos")
          f = FunId::Cos;
        else if (id == "exp")
          f = FunId::Exp;
        else if (id == "ln")
          f = FunId::Ln;
        else
          throw ParseError("unknown function '" + id + "'", at);
        expect('(');
        Lpdo arg = parse_sum();
        expect(')');
        if (!arg.is_zero_operator() && arg.order() > 0)
          throw ParseError("function of an operator argument", at);
        return Lpdo::from_expr(make_fun(f, arg.coeff(0, 0)));
      }
      return Lpdo::from_expr(make_param(deps.lookup(id)));
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos);
  }
};

}  // namespace

Lpdo parse_operator(const std::string& text, const ParamDeps& deps) {
  Parser p{text, deps};
  Lpdo out = p.parse_sum();
  if (!p.eof()) throw ParseError("trailing input", p.pos);
  return out;
}

Expr parse_expr(const std::string& text, const ParamDeps& deps) {
  Lpdo op = parse_operator(text, deps);
  if (!op.is_zero_operator() && op.order() > 0)
    throw ParseError("expected an expression, found an operator", 0);
  return op.coeff(0, 0);
}

}  // namespace lpdo
