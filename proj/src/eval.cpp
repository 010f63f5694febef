#include "lpdo/eval.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace lpdo {

namespace {

// Parameter binder: receives the full occurrence (name + derivative orders).
using Binder = std::function<double(const ParamInfo&)>;

struct EvalCtx {
  double x;
  double y;
  const Binder& bind;
  double max_mag = 0.0;
};

double note(EvalCtx& ctx, double v) {
  double a = std::fabs(v);
  if (std::isfinite(a) && a > ctx.max_mag) ctx.max_mag = a;
  return v;
}

double pow_checked(double base, const Rational& e) {
  double de = to_double(e);
  if (base == 0.0) {
    if (e < 0) throw EvalError("division by zero");
    return 0.0;
  }
  if (base < 0.0) {
    if (is_integer(e)) return std::pow(base, de);
    // Odd denominators admit a real root with the sign of the base.
    BigInt d = denom(e);
    if (d % 2 != 0) {
      double mag = std::pow(-base, de);
      return numer(e) % 2 == 0 ? mag : -mag;
    }
    throw EvalError("fractional power of a negative value");
  }
  return std::pow(base, de);
}

double eval_node(const Expr& e, EvalCtx& ctx) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num: return note(ctx, to_double(n.rat));
    case Kind::Const: return note(ctx, std::numbers::pi_v<double>);
    case Kind::Var: return note(ctx, n.var == VarId::X ? ctx.x : ctx.y);
    case Kind::Param: return note(ctx, ctx.bind(n.param));
    case Kind::Fun: {
      double a = eval_node(n.arg, ctx);
      switch (n.fun) {
        case FunId::Sin: return note(ctx, std::sin(a));
        case FunId::Cos: return note(ctx, std::cos(a));
        case FunId::Exp: return note(ctx, std::exp(a));
        case FunId::Ln:
          if (a <= 0.0) throw EvalError("ln of a non-positive value");
          return note(ctx, std::log(a));
      }
      return 0.0;
    }
    case Kind::Mul: {
      double v = to_double(n.rat);
      for (const auto& [b, ex] : n.factors) v *= note(ctx, pow_checked(eval_node(b, ctx), ex));
      return note(ctx, v);
    }
    case Kind::Add: {
      double v = to_double(n.rat);
      for (const auto& [c, m] : n.terms) v += note(ctx, to_double(c) * eval_node(m, ctx));
      return note(ctx, v);
    }
  }
  return 0.0;
}

double eval_with(const Expr& e, double x0, double y0, const Binder& bind, double* max_mag) {
  EvalCtx ctx{x0, y0, bind};
  double v = eval_node(e, ctx);
  if (max_mag) *max_mag = ctx.max_mag;
  return v;
}

Binder map_binder(const std::map<std::string, double>& params) {
  return [&params](const ParamInfo& p) -> double {
    if (p.dx != 0 || p.dy != 0)
      throw UnboundParamError("cannot evaluate opaque derivative of parameter '" + p.name + "'");
    auto it = params.find(p.name);
    if (it == params.end()) throw UnboundParamError("unbound parameter '" + p.name + "'");
    return it->second;
  };
}

// splitmix64; fixed seeding keeps the verdicts reproducible run to run.
struct SplitMix64 {
  std::uint64_t s;
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // Magnitude in [0.1, 3], random sign.
  double sample() {
    double mag = 0.1 + 2.9 * uniform01();
    return (next() & 1) ? mag : -mag;
  }
};

}  // namespace

double eval(const Expr& e, double x0, double y0, const std::map<std::string, double>& params) {
  return eval_with(e, x0, y0, map_binder(params), nullptr);
}

double eval_or_nan(const Expr& e, double x0, double y0,
                   const std::map<std::string, double>& params) {
  try {
    return eval(e, x0, y0, params);
  } catch (const UnboundParamError&) {
    throw;
  } catch (const EvalError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

const char* to_string(ZeroVerdict v) {
  switch (v) {
    case ZeroVerdict::ProvenZero: return "proven-zero";
    case ZeroVerdict::NumericallyZero: return "numerically-zero";
    case ZeroVerdict::ProvenNonzero: return "proven-nonzero";
  }
  return "?";
}

ZeroVerdict zero_verdict(const Expr& e) {
  if (e.kind() == Kind::Num) return e.node().rat == 0 ? ZeroVerdict::ProvenZero : ZeroVerdict::ProvenNonzero;

  Expr t = trig_eliminate(e);
  if (t.kind() == Kind::Num)
    return t.node().rat == 0 ? ZeroVerdict::ProvenZero : ZeroVerdict::ProvenNonzero;

  constexpr int kNeeded = 32;
  constexpr int kMaxAttempts = 160;
  SplitMix64 rng{0x5eedf00d2026ULL};
  int valid = 0;
  for (int attempt = 0; attempt < kMaxAttempts && valid < kNeeded; ++attempt) {
    double px = rng.sample();
    double py = rng.sample();
    std::map<std::string, double> cache;
    Binder bind = [&](const ParamInfo& p) {
      std::string key = p.name + "#" + std::to_string(p.dx) + "#" + std::to_string(p.dy);
      auto [it, inserted] = cache.try_emplace(key, 0.0);
      if (inserted) it->second = rng.sample();
      return it->second;
    };
    double mag = 0.0;
    double v;
    try {
      v = eval_with(t, px, py, bind, &mag);
    } catch (const EvalError&) {
      continue;
    }
    if (!std::isfinite(v)) continue;
    ++valid;
    if (std::fabs(v) >= 1e-9 * (1.0 + mag)) return ZeroVerdict::ProvenNonzero;
  }
  if (valid == 0) return ZeroVerdict::ProvenNonzero;
  return ZeroVerdict::NumericallyZero;
}

bool is_zero(const Expr& e) { return zero_verdict(e) != ZeroVerdict::ProvenNonzero; }

}  // namespace lpdo
