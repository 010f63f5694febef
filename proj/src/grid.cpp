#include "lpdo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "lpdo/eval.hpp"

namespace lpdo {

void GridSpec::validate() const {
  if (!(x0 < x1) || !(y0 < y1)) throw std::domain_error("grid ranges must be nonempty");
  if (nx < 2 || ny < 2) throw std::domain_error("grid needs at least 2 samples per axis");
}

GridField sample(const Expr& e, const GridSpec& spec) {
  spec.validate();
  GridField f;
  f.spec = spec;
  f.source = e;
  f.values.resize(static_cast<size_t>(spec.nx) * spec.ny);
  for (int i = 0; i < spec.nx; ++i) {
    double xv = spec.x_at(i);
    for (int j = 0; j < spec.ny; ++j)
      f.values[static_cast<size_t>(i) * spec.ny + j] = eval_or_nan(e, xv, spec.y_at(j));
  }
  return f;
}

FieldSummary summarize(const GridField& f) {
  FieldSummary s;
  s.min_abs = std::numeric_limits<double>::infinity();
  double sum = 0;
  long count = 0;
  for (int i = 0; i < f.spec.nx; ++i) {
    for (int j = 0; j < f.spec.ny; ++j) {
      double v = f.at(i, j);
      if (std::isnan(v)) {
        ++s.nan_count;
        continue;
      }
      double a = std::fabs(v);
      if (a > s.max_abs) {
        s.max_abs = a;
        s.argmax_x = f.spec.x_at(i);
        s.argmax_y = f.spec.y_at(j);
      }
      s.min_abs = std::min(s.min_abs, a);
      sum += a;
      ++count;
    }
  }
  if (count == 0) s.min_abs = std::numeric_limits<double>::quiet_NaN();
  s.mean_abs = count ? sum / count : std::numeric_limits<double>::quiet_NaN();
  return s;
}

namespace {

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_csv(const GridField& f) {
  std::string out = "x,y,value\n";
  for (int i = 0; i < f.spec.nx; ++i) {
    for (int j = 0; j < f.spec.ny; ++j) {
      out += fmt17(f.spec.x_at(i));
      out += ',';
      out += fmt17(f.spec.y_at(j));
      out += ',';
      out += fmt17(f.at(i, j));
      out += '\n';
    }
  }
  return out;
}

void write_csv(const GridField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << to_csv(f);
}

Lpdo scale_operator(const Lpdo& a, const Expr& f, const std::vector<Lpdo::Key>& mask) {
  for (const auto& key : mask)
    if (is_literal_zero(a.coeff(key.first, key.second)))
      throw std::domain_error("masked coefficient (" + std::to_string(key.first) + "," +
                              std::to_string(key.second) + ") is absent");
  Lpdo out = a;
  for (const auto& key : mask) out.set(key.first, key.second, mul(f, a.coeff(key.first, key.second)));
  return out;
}

GridField invariant_field(const Lpdo& a, const RootDirection& root, const GridSpec& spec) {
  FactorizationReport rep = extract_left_factor(a, root);
  return sample(rep.invariants.back().value, spec);
}

std::vector<std::pair<Lpdo::Key, GridField>> coefficient_deltas(const Lpdo& a, const Lpdo& b,
                                                                const GridSpec& spec) {
  auto keys_of = [](const Lpdo& op) {
    std::vector<Lpdo::Key> ks;
    for (const auto& [key, c] : op.coeffs()) ks.push_back(key);
    return ks;
  };
  if (keys_of(a) != keys_of(b))
    throw std::domain_error("coefficient_deltas requires identical key sets");
  std::vector<std::pair<Lpdo::Key, GridField>> out;
  for (const auto& [key, c] : a.coeffs()) {
    Expr delta = sub(c, b.coeff(key.first, key.second));
    if (is_literal_zero(delta)) continue;
    out.emplace_back(key, sample(delta, spec));
  }
  return out;
}

Expr LinearCoeffs::a00() const {
  return add({make_num(b[2]) * var_x(), make_num(b[1]) * var_y(), make_num(b[0])});
}
Expr LinearCoeffs::a10() const {
  return add({make_num(c[2]) * var_x(), make_num(c[1]) * var_y(), make_num(c[0])});
}
Expr LinearCoeffs::a01() const {
  return add({make_num(d[2]) * var_x(), make_num(d[1]) * var_y(), make_num(d[0])});
}

Lpdo LinearCoeffs::op() const {
  Lpdo a;
  a.set(2, 0, make_int(1));
  a.set(0, 2, make_int(-1));
  a.set(1, 0, a10());
  a.set(0, 1, a01());
  a.set(0, 0, a00());
  return a;
}

RCheckResult r_function_check(const LinearCoeffs& lc, double eps, const GridSpec& spec) {
  if (!(eps > 0)) throw std::domain_error("eps must be positive");
  auto s = lc.s();
  Expr linear = add({make_num(s[2]) * var_x(), make_num(s[1]) * var_y(), make_num(s[0])});
  Expr r = add(make_num((s[2] - s[1]) / 2), div(pow(linear, Rational(2)), make_int(4)));
  GridField f = sample(sub(lc.a00(), r), spec);
  FieldSummary sm = summarize(f);
  RCheckResult res;
  res.worst = sm.max_abs;
  res.at_x = sm.argmax_x;
  res.at_y = sm.argmax_y;
  res.holds = sm.max_abs < eps;
  return res;
}

std::vector<ScaleCandidateResult> rank_scale_candidates(const Lpdo& a, const RootDirection& root,
                                                        const std::vector<Expr>& fs,
                                                        const std::vector<Lpdo::Key>& mask,
                                                        const GridSpec& spec) {
  std::vector<ScaleCandidateResult> out;
  for (const Expr& f : fs) {
    Lpdo scaled = scale_operator(a, f, mask);
    out.push_back({f, summarize(invariant_field(scaled, root, spec))});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ScaleCandidateResult& p, const ScaleCandidateResult& q) {
                     return p.summary.max_abs < q.summary.max_abs;
                   });
  return out;
}

}  // namespace lpdo
