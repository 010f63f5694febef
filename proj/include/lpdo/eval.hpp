#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>

#include "lpdo/expr.hpp"

namespace lpdo {

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised for parameters with no binding (including opaque derivatives);
/// never converted to NaN by eval_or_nan.
struct UnboundParamError : EvalError {
  using EvalError::EvalError;
};

/// Evaluates at (x0, y0) with parameters bound by base name. Throws EvalError
/// on division by zero, ln of a non-positive value, a fractional power of a
/// negative value, an unbound parameter, or an opaque parameter derivative.
double eval(const Expr& e, double x0, double y0, const std::map<std::string, double>& params = {});

/// As eval, but maps any domain error to NaN. Unbound parameters still throw.
double eval_or_nan(const Expr& e, double x0, double y0,
                   const std::map<std::string, double>& params = {});

enum class ZeroVerdict { ProvenZero, NumericallyZero, ProvenNonzero };

const char* to_string(ZeroVerdict v);

/// Three-stage zero test: canonical equality, canonical equality after the
/// sin^2+cos^2 -> 1 rewrite, then evaluation at 32 deterministic pseudo-random
/// points with coordinates in +-[0.1, 3]. Parameters (including opaque
/// derivatives) are bound to independent pseudo-random values per point.
ZeroVerdict zero_verdict(const Expr& e);

/// True for ProvenZero and NumericallyZero.
bool is_zero(const Expr& e);

}  // namespace lpdo
