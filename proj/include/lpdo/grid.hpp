#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "lpdo/factor.hpp"
#include "lpdo/lpdo.hpp"

namespace lpdo {

/// Uniform rectangular grid; nx/ny are sample counts per axis, endpoints
/// included (spacing (x1-x0)/(nx-1)).
struct GridSpec {
  double x0 = -10, x1 = 10;
  double y0 = -10, y1 = 10;
  int nx = 200, ny = 200;

  void validate() const;
  double x_at(int i) const { return x0 + (x1 - x0) * i / (nx - 1); }
  double y_at(int j) const { return y0 + (y1 - y0) * j / (ny - 1); }
};

/// Sampled values of an expression over a grid. Points where evaluation hits
/// a singularity hold NaN; norms ignore them but their count is reported.
struct GridField {
  GridSpec spec;
  Expr source;
  std::vector<double> values;  // row-major: values[i * ny + j], i indexing x

  double at(int i, int j) const { return values[static_cast<size_t>(i) * spec.ny + j]; }
};

struct FieldSummary {
  double max_abs = 0;
  double min_abs = 0;
  double mean_abs = 0;
  double argmax_x = 0;
  double argmax_y = 0;
  long nan_count = 0;
};

GridField sample(const Expr& e, const GridSpec& spec);
/// Fixed row-major reduction order; strict > comparison pins the argmax.
FieldSummary summarize(const GridField& f);

/// CSV with header "x,y,value", row-major, 17 significant digits, NaN as
/// "nan".
std::string to_csv(const GridField& f);
void write_csv(const GridField& f, const std::string& path);

/// Auxiliary operator: multiplies the masked coefficients by f. Every masked
/// key must be present.
Lpdo scale_operator(const Lpdo& a, const Expr& f, const std::vector<Lpdo::Key>& mask);

/// Samples inv[0] of the (possibly obstructed) left-factor extraction at the
/// given root.
GridField invariant_field(const Lpdo& a, const RootDirection& root, const GridSpec& spec);

/// One field per coefficient on which a and b differ. Requires equal key sets.
std::vector<std::pair<Lpdo::Key, GridField>> coefficient_deltas(const Lpdo& a, const Lpdo& b,
                                                                const GridSpec& spec);

/// Linear coefficients of a hyperbolic operator
///   Dx^2 - Dy^2 + a10*Dx + a01*Dy + a00
/// with a00 = b3*x + b2*y + b1, a10 = c3*x + c2*y + c1, a01 = d3*x + d2*y + d1
/// (index 3 multiplies x, index 2 multiplies y, index 1 the constant).
struct LinearCoeffs {
  std::array<Rational, 3> b{};  // b1, b2, b3
  std::array<Rational, 3> c{};
  std::array<Rational, 3> d{};

  std::array<Rational, 3> s() const {
    return {c[0] - d[0], c[1] - d[1], c[2] - d[2]};
  }
  Expr a00() const;
  Expr a10() const;
  Expr a01() const;
  Lpdo op() const;
};

struct RCheckResult {
  bool holds = false;
  double worst = 0;
  double at_x = 0;
  double at_y = 0;
};

/// Proximity check between a00 and the invariant-derived function
///   R = (s3 - s2)/2 + (s3*x + s2*y + s1)^2 / 4,  s_i = c_i - d_i:
/// holds iff sup |a00 - R| < eps over the grid.
RCheckResult r_function_check(const LinearCoeffs& lc, double eps, const GridSpec& spec);

/// Convenience scan: ranks candidate damping functions f by the sup-norm of
/// inv[0] of the operator scaled by f on the masked coefficients.
struct ScaleCandidateResult {
  Expr f;
  FieldSummary summary;
};
std::vector<ScaleCandidateResult> rank_scale_candidates(const Lpdo& a, const RootDirection& root,
                                                        const std::vector<Expr>& fs,
                                                        const std::vector<Lpdo::Key>& mask,
                                                        const GridSpec& spec);

}  // namespace lpdo
