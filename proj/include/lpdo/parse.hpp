#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "lpdo/expr.hpp"
#include "lpdo/lpdo.hpp"

namespace lpdo {

/// Parse error with the byte offset of the offending token.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t at)
      : std::runtime_error(msg + " at byte " + std::to_string(at)), offset(at) {}
  std::size_t offset;
};

/// Declared variable dependencies for named parameters; identifiers not
/// listed parse as true constants.
struct ParamDeps {
  std::map<std::string, std::pair<bool, bool>> deps;  // name -> (dep_x, dep_y)

  ParamInfo lookup(const std::string& name) const {
    ParamInfo p;
    p.name = name;
    if (auto it = deps.find(name); it != deps.end()) {
      p.dep_x = it->second.first;
      p.dep_y = it->second.second;
    }
    return p;
  }
};

/// Grammar (operators extend expressions with the atoms Dx, Dy):
///   sum      := term (('+'|'-') term)*
///   term     := factor (('*'|'/') factor)*
///   factor   := '-' factor | atom ('^' exponent)?
///   atom     := integer | 'sqrt2' | 'pi' | 'x' | 'y' | 'Dx' | 'Dy'
///             | ident | ident '(' sum ')' | '(' sum ')'
///   exponent := '-'? integer ('/' integer)?
/// '*' is operator composition (noncommutative); '/' requires an order-zero
/// divisor; '^' on an operator of positive order requires a nonnegative
/// integer exponent. Functions are sin, cos, exp, ln.
Lpdo parse_operator(const std::string& text, const ParamDeps& deps = {});

/// parse_operator restricted to order zero.
Expr parse_expr(const std::string& text, const ParamDeps& deps = {});

}  // namespace lpdo
