#include "lpdo/cli.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <sstream>

#include "lpdo/json_io.hpp"
#include "lpdo/parse.hpp"

namespace lpdo::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_operand(const std::string& text) {
  if (text != "-") return text;
  std::ostringstream ss;
  ss << std::cin.rdbuf();
  return ss.str();
}

ParamDeps parse_deps(const std::vector<std::string>& decls) {
  ParamDeps deps;
  for (const std::string& d : decls) {
    auto colon = d.find(':');
    if (colon == std::string::npos) throw UsageError("--depends expects name:x|y|xy");
    std::string name = d.substr(0, colon);
    std::string which = d.substr(colon + 1);
    bool on_x = which.find('x') != std::string::npos;
    bool on_y = which.find('y') != std::string::npos;
    if (name.empty() || (!on_x && !on_y)) throw UsageError("--depends expects name:x|y|xy");
    deps.deps[name] = {on_x, on_y};
  }
  return deps;
}

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  if (text.empty()) return g;
  std::istringstream ss(text);
  char comma;
  if (!(ss >> g.x0 >> comma >> g.x1 >> comma >> g.y0 >> comma >> g.y1 >> comma >> g.nx >> comma >>
        g.ny))
    throw UsageError("--grid expects x0,x1,y0,y1,nx,ny");
  g.validate();
  return g;
}

std::vector<Lpdo::Key> parse_mask(const std::string& text) {
  std::vector<Lpdo::Key> mask;
  std::istringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ';')) {
    int j, k;
    char comma;
    std::istringstream ps(piece);
    if (!(ps >> j >> comma >> k)) throw UsageError("--mask expects j,k;j,k;...");
    mask.push_back({j, k});
  }
  if (mask.empty()) throw UsageError("--mask expects j,k;j,k;...");
  return mask;
}

RootDirection parse_root_text(const std::string& text, const ParamDeps& deps) {
  if (text == "inf") return RootDirection::at_infinity();
  return RootDirection::finite(parse_expr(text, deps));
}

LinearCoeffs parse_rcheck(const std::string& text) {
  LinearCoeffs lc;
  std::istringstream ss(text);
  std::string piece;
  std::array<std::array<Rational, 3>*, 3> slots{&lc.b, &lc.c, &lc.d};
  for (auto* slot : slots) {
    if (!std::getline(ss, piece, ';')) throw UsageError("--rcheck expects b1,b2,b3;c1,c2,c3;d1,d2,d3");
    std::istringstream ps(piece);
    for (int i = 0; i < 3; ++i) {
      std::string num;
      if (!std::getline(ps, num, ',')) throw UsageError("--rcheck expects three triples");
      Expr e = parse_expr(num);
      (*slot)[static_cast<size_t>(i)] = rational_value(e);
    }
  }
  return lc;
}

RootDirection select_root(const Lpdo& op, const std::vector<std::string>& root_texts,
                          const ParamDeps& deps) {
  if (!root_texts.empty()) {
    auto classified = classify_root(op, parse_root_text(root_texts.front(), deps));
    if (!classified) throw UsageError("--root is not a root of the principal symbol");
    return *classified;
  }
  RootAnalysis an = roots(op);
  if (an.roots.empty()) throw UsageError("no symbol roots found; supply --root");
  return an.roots.front();
}

struct Options {
  std::vector<std::string> operands;
  std::vector<std::string> root_texts;
  std::vector<std::string> riccati_texts;
  std::vector<std::string> depends;
  std::vector<std::string> scale_fs;
  std::string grid_text;
  std::string mask_text;
  std::string csv_path;
  std::string phi_text;
  std::string rcheck_text;
  double eps = 1e-2;
  bool all = false;
  bool json = false;
  bool laplace = false;
};

int run_factor(const Options& o, std::ostream& out) {
  ParamDeps deps = parse_deps(o.depends);
  Lpdo op = parse_operator(read_operand(o.operands.at(0)), deps);
  FactorOptions fo;
  fo.all = o.all;
  for (const auto& rt : o.root_texts) fo.user_roots.push_back(parse_root_text(rt, deps));
  for (const auto& rc : o.riccati_texts) fo.riccati_candidates.push_back(parse_expr(rc, deps));
  FactorizationResult result = full_factorization(op, fo);
  if (o.json) {
    out << to_json(result).dump(2) << "\n";
  } else {
    for (const auto& chain : result.chains) out << to_string(chain) << "\n";
    if (result.chains.empty()) {
      out << "no factorization found\n";
      for (const auto& rep : result.obstructions) out << report_text(rep);
      if (result.unresolved_roots) out << "unresolved symbol roots; supply --root\n";
    }
  }
  if (!result.chains.empty()) return 0;
  return result.unresolved_roots ? 3 : 1;
}

int run_invariants(const Options& o, std::ostream& out) {
  ParamDeps deps = parse_deps(o.depends);
  Lpdo op = parse_operator(read_operand(o.operands.at(0)), deps);
  std::vector<RootDirection> selected;
  if (o.root_texts.empty()) {
    selected = roots(op).roots;
  } else {
    for (const auto& rt : o.root_texts) {
      auto classified = classify_root(op, parse_root_text(rt, deps));
      if (!classified) throw UsageError("--root is not a root of the principal symbol");
      selected.push_back(*classified);
    }
  }
  Json reports = Json::array();
  for (const auto& root : selected) {
    FactorizationReport rep = root.multiplicity == 1 ? extract_left_factor(op, root)
                                                     : riccati_obstruction(op, root);
    if (o.json)
      reports.push_back(to_json(rep));
    else
      out << report_text(rep);
  }
  if (o.laplace) {
    auto [ah, bh] = laplace_invariants(op);
    if (o.json) {
      Json j{{"reports", reports}, {"laplace", {{"a_hat", to_string(ah)}, {"b_hat", to_string(bh)}}}};
      out << j.dump(2) << "\n";
      return 0;
    }
    out << "laplace: a_hat = " << to_string(ah) << ", b_hat = " << to_string(bh) << "\n";
  } else if (o.json) {
    out << reports.dump(2) << "\n";
  }
  return 0;
}

int run_approx(const Options& o, std::ostream& out) {
  GridSpec spec = parse_grid(o.grid_text);
  if (!o.rcheck_text.empty()) {
    LinearCoeffs lc = parse_rcheck(o.rcheck_text);
    RCheckResult res = r_function_check(lc, o.eps, spec);
    if (o.json) {
      Json j{{"holds", res.holds},
             {"worst", res.worst},
             {"at", Json::array({res.at_x, res.at_y})},
             {"eps", o.eps},
             {"grid", to_json(spec)}};
      out << j.dump(2) << "\n";
    } else {
      out << (res.holds ? "holds" : "fails") << ": sup|a00 - R| = " << res.worst << " at ("
          << res.at_x << ", " << res.at_y << "), eps = " << o.eps << "\n";
    }
    return 0;
  }

  ParamDeps deps = parse_deps(o.depends);
  Lpdo op = parse_operator(read_operand(o.operands.at(0)), deps);
  std::vector<Lpdo::Key> mask;
  if (!o.mask_text.empty()) {
    mask = parse_mask(o.mask_text);
  } else {
    for (const auto& [key, c] : op.coeffs())
      if (key.first + key.second < op.order()) mask.push_back(key);
  }
  RootDirection root = select_root(op, o.root_texts, deps);

  if (o.scale_fs.size() > 1) {
    std::vector<Expr> fs;
    for (const auto& t : o.scale_fs) fs.push_back(parse_expr(t, deps));
    auto ranked = rank_scale_candidates(op, root, fs, mask, spec);
    Json arr = Json::array();
    for (const auto& rc : ranked) {
      if (o.json)
        arr.push_back(Json{{"f", to_string(rc.f)}, {"max_abs", rc.summary.max_abs}});
      else
        out << "f = " << to_string(rc.f) << ": sup|inv[0]| = " << rc.summary.max_abs << "\n";
    }
    if (o.json) out << arr.dump(2) << "\n";
    return 0;
  }

  Lpdo target = op;
  Json deltas = Json::array();
  if (o.scale_fs.size() == 1) {
    target = scale_operator(op, parse_expr(o.scale_fs[0], deps), mask);
    for (const auto& [key, field] : coefficient_deltas(op, target, spec)) {
      Json d = summary_json(field);
      d["coefficient"] = std::to_string(key.first) + "," + std::to_string(key.second);
      deltas.push_back(d);
    }
  }
  GridField field = invariant_field(target, root, spec);
  if (!o.csv_path.empty()) write_csv(field, o.csv_path);
  if (o.json) {
    Json j;
    j["operator"] = to_json(target);
    j["root"] = to_json(root);
    j["invariant"] = summary_json(field);
    j["coefficient_deltas"] = deltas;
    out << j.dump(2) << "\n";
  } else {
    FieldSummary s = summarize(field);
    out << "operator: " << to_string(target) << "\n";
    out << "root: " << to_string(root) << "\n";
    out << "inv[0] = " << to_string(field.source) << "\n";
    out << "sup|inv[0]| = " << s.max_abs << " at (" << s.argmax_x << ", " << s.argmax_y
        << "), mean = " << s.mean_abs << ", nan = " << s.nan_count << "\n";
    for (const auto& d : deltas)
      out << "delta a_" << d["coefficient"].get<std::string>()
          << ": sup = " << d["max_abs"].get<double>() << "\n";
  }
  return 0;
}

int run_grid(const Options& o, std::ostream& out) {
  ParamDeps deps = parse_deps(o.depends);
  Expr e = parse_expr(read_operand(o.operands.at(0)), deps);
  GridSpec spec = parse_grid(o.grid_text);
  GridField field = sample(e, spec);
  if (!o.csv_path.empty()) write_csv(field, o.csv_path);
  if (o.json) {
    out << summary_json(field).dump(2) << "\n";
  } else {
    FieldSummary s = summarize(field);
    out << "sup = " << s.max_abs << " at (" << s.argmax_x << ", " << s.argmax_y
        << "), mean = " << s.mean_abs << ", nan = " << s.nan_count << "\n";
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bivariate linear partial differential operators: factorization into "
               "first-order factors, generalized invariants, gauge transformations, and "
               "grid diagnostics for approximate factorization."};
  app.name("lpdo");
  app.require_subcommand(1);

  Options o;
  auto add_common = [&](CLI::App* cmd, bool wants_operand) {
    if (wants_operand)
      cmd->add_option("operator", o.operands, "operator text ('-' reads stdin)")->expected(-1);
    cmd->add_flag("--json", o.json, "emit JSON");
    cmd->add_option("--depends", o.depends, "declare parameter dependencies, name:x|y|xy")
        ->type_size(1)->allow_extra_args(false);
  };

  CLI::App* parse_cmd = app.add_subcommand("parse", "parse and reprint in normal form");
  add_common(parse_cmd, true);

  CLI::App* factor_cmd = app.add_subcommand("factor", "factor into first-order factors");
  add_common(factor_cmd, true);
  factor_cmd->add_option("--root", o.root_texts, "user-supplied symbol root (expr or 'inf')")
      ->type_size(1)->allow_extra_args(false);
  factor_cmd->add_option("--riccati", o.riccati_texts, "candidate r for multiple roots")
      ->type_size(1)->allow_extra_args(false);
  factor_cmd->add_flag("--all", o.all, "enumerate all chains");

  CLI::App* inv_cmd = app.add_subcommand("invariants", "generalized invariants per root");
  add_common(inv_cmd, true);
  inv_cmd->add_option("--root", o.root_texts, "restrict to this root")->type_size(1)->allow_extra_args(false);
  inv_cmd->add_flag("--laplace", o.laplace, "also print the Laplace invariants");

  CLI::App* tr_cmd = app.add_subcommand("transpose", "formal adjoint");
  add_common(tr_cmd, true);

  CLI::App* gauge_cmd = app.add_subcommand("gauge", "conjugate by e^phi");
  add_common(gauge_cmd, true);
  gauge_cmd->add_option("--phi", o.phi_text, "gauge function phi")->required();

  CLI::App* compose_cmd = app.add_subcommand("compose", "compose two operators");
  add_common(compose_cmd, true);

  CLI::App* approx_cmd =
      app.add_subcommand("approx", "invariant fields, damped coefficients, proximity checks");
  add_common(approx_cmd, true);
  approx_cmd->add_option("--root", o.root_texts, "root for the invariant field")->type_size(1)->allow_extra_args(false);
  approx_cmd->add_option("--grid", o.grid_text, "x0,x1,y0,y1,nx,ny (default -10,10,-10,10,200,200)");
  approx_cmd->add_option("--scale-f", o.scale_fs, "damping function f (repeat to rank)")
      ->type_size(1)->allow_extra_args(false);
  approx_cmd->add_option("--mask", o.mask_text, "coefficients to damp, j,k;j,k");
  approx_cmd->add_option("--csv", o.csv_path, "write the sampled field as CSV");
  approx_cmd->add_option("--rcheck", o.rcheck_text,
                         "linear coefficients b1,b2,b3;c1,c2,c3;d1,d2,d3");
  approx_cmd->add_option("--eps", o.eps, "tolerance for --rcheck");

  CLI::App* grid_cmd = app.add_subcommand("grid", "sample an expression over a grid");
  add_common(grid_cmd, true);
  grid_cmd->add_option("--grid", o.grid_text, "x0,x1,y0,y1,nx,ny");
  grid_cmd->add_option("--csv", o.csv_path, "write CSV");

  std::vector<const char*> argv;
  argv.push_back("lpdo");
  for (const auto& a : args) argv.push_back(a.c_str());

  out << std::setprecision(17);

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    ParamDeps deps = parse_deps(o.depends);
    if (parse_cmd->parsed()) {
      Lpdo op = parse_operator(read_operand(o.operands.at(0)), deps);
      if (o.json)
        out << to_json(op).dump(2) << "\n";
      else
        out << to_string(op) << "\n";
      return 0;
    }
    if (factor_cmd->parsed()) return run_factor(o, out);
    if (inv_cmd->parsed()) return run_invariants(o, out);
    if (tr_cmd->parsed()) {
      Lpdo op = parse_operator(read_operand(o.operands.at(0)), deps);
      Lpdo t = transpose(op);
      out << (o.json ? to_json(t).dump(2) : to_string(t)) << "\n";
      return 0;
    }
    if (gauge_cmd->parsed()) {
      Lpdo op = parse_operator(read_operand(o.operands.at(0)), deps);
      Lpdo g = gauge_conjugate(op, parse_expr(o.phi_text, deps));
      out << (o.json ? to_json(g).dump(2) : to_string(g)) << "\n";
      return 0;
    }
    if (compose_cmd->parsed()) {
      if (o.operands.size() != 2) throw UsageError("compose expects two operators");
      Lpdo a = parse_operator(read_operand(o.operands[0]), deps);
      Lpdo b = parse_operator(read_operand(o.operands[1]), deps);
      Lpdo c = compose(a, b);
      out << (o.json ? to_json(c).dump(2) : to_string(c)) << "\n";
      return 0;
    }
    if (approx_cmd->parsed()) return run_approx(o, out);
    if (grid_cmd->parsed()) return run_grid(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range&) {
    err << "error: missing operator argument\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace lpdo::cli
