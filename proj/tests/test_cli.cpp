#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <sstream>

#include "lpdo/cli.hpp"
#include "lpdo/parse.hpp"

using namespace lpdo;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("parse subcommand") {
  Run r = run_cli({"parse", "Dx*Dy + x*Dx + 1"});
  CHECK(r.code == 0);
  CHECK(r.out == "Dx*Dy + x*Dx + 1\n");

  Run bad = run_cli({"parse", "sin("});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("byte") != std::string::npos);

  Run json = run_cli({"parse", "--json", "Dx*Dy + x*Dx + 1"});
  CHECK(json.code == 0);
  auto j = nlohmann::json::parse(json.out);
  CHECK(j["order"] == 2);
  CHECK(j["coeffs"]["1,0"] == "x");
}

TEST_CASE("factor subcommand") {
  Run a1 = run_cli({"factor", "Dx*Dy + x*Dx + 1"});
  CHECK(a1.code == 0);
  CHECK(a1.out == "[Dx][Dy + x]\n");

  Run sep = run_cli({"factor", "Dx*Dy"});
  CHECK(sep.code == 0);
  CHECK(sep.out == "[Dx][Dy]\n");

  Run obstructed = run_cli({"factor", "Dx^2 - Dy^2 + y*Dx + x*Dy + 1/2*(y^2-x^2) - 1"});
  CHECK(obstructed.code == 1);
  CHECK(obstructed.out.find("no factorization found") != std::string::npos);
  CHECK(obstructed.out.find("obstructed") != std::string::npos);

  Run unresolved = run_cli({"factor", "Dx^3 - sin(x)*Dy^3 + Dx"});
  CHECK(unresolved.code == 3);

  Run landau_plain =
      run_cli({"factor", "Dx^3 + x*Dx^2*Dy + 2*Dx^2 + (2*x+2)*Dx*Dy + Dx + (2+x)*Dy"});
  CHECK(landau_plain.code == 1);
  CHECK(landau_plain.out.find("Riccati residual") != std::string::npos);

  Run landau = run_cli({"factor", "Dx^3 + x*Dx^2*Dy + 2*Dx^2 + (2*x+2)*Dx*Dy + Dx + (2+x)*Dy",
                        "--riccati", "1 + 1/(x+C)", "--depends", "C:y"});
  CHECK(landau.code == 0);
  CHECK(landau.out.find("[Dx + x*Dy]") != std::string::npos);

  Run json = run_cli({"factor", "--json", "--all", "Dx*Dy + x*Dx + 1"});
  CHECK(json.code == 0);
  auto j = nlohmann::json::parse(json.out);
  CHECK(j["chains"].size() == 1);
  CHECK(j["chains"][0]["factors"][0] == "Dx");
}

TEST_CASE("invariants subcommand") {
  Run inv = run_cli({"invariants", "Dx^2 - Dy^2 + y*Dx + x*Dy + 1/4*(y^2-x^2) - 1"});
  CHECK(inv.code == 0);
  CHECK(inv.out.find("root 1: factored") != std::string::npos);
  CHECK(inv.out.find("root -1: obstructed") != std::string::npos);
  CHECK(inv.out.find("inv[0] = -2") != std::string::npos);

  Run lap = run_cli({"invariants", "--laplace", "Dx*Dy + x*Dx + 1"});
  CHECK(lap.code == 0);
  CHECK(lap.out.find("a_hat = 0") != std::string::npos);
  CHECK(lap.out.find("b_hat = 1") != std::string::npos);

  Run riccati = run_cli({"invariants", "--root", "0",
                         "Dx^3 + x*Dx^2*Dy + 2*Dx^2 + (2*x+2)*Dx*Dy + Dx + (2+x)*Dy"});
  CHECK(riccati.code == 0);
  CHECK(riccati.out.find("Riccati residual: -2*r + d/dx(r) + r^2 + 1") != std::string::npos);
}

TEST_CASE("transpose, gauge, compose subcommands") {
  Run t = run_cli({"transpose", "Dx"});
  CHECK(t.out == "-Dx\n");

  Run g = run_cli({"gauge", "--phi", "x", "Dx*Dy + x*Dx + 1"});
  CHECK(g.out == "Dx*Dy + x*Dx + Dy + x + 1\n");

  Run c = run_cli({"compose", "Dx - Dy + 1/2*(y+x)", "Dx + Dy + 1/2*(y-x)"});
  CHECK(c.code == 0);
  CHECK(parse_operator(c.out.substr(0, c.out.size() - 1)) ==
        parse_operator("Dx^2 - Dy^2 + y*Dx + x*Dy + 1/4*(y^2-x^2) - 1"));

  Run missing = run_cli({"compose", "Dx"});
  CHECK(missing.code == 2);
}

TEST_CASE("approx subcommand") {
  Run b = run_cli({"approx", "--json", "--grid", "10,100,10,100,60,60", "--scale-f",
                   "sin(1/(x*y))", "--mask", "1,0;0,1;0,0",
                   "Dx^2 - Dy^2 + sin(y)*Dx + cos(x)*Dy + 1/2*(sin(y)^2 - cos(x)^2)"});
  CHECK(b.code == 0);
  auto j = nlohmann::json::parse(b.out);
  double sup = j["invariant"]["max_abs"].get<double>();
  CHECK(sup > 1e-5);
  CHECK(sup < 2e-2);
  CHECK(j["coefficient_deltas"].size() == 3);

  Run rcheck = run_cli({"approx", "--rcheck", "0,0,0;1,2,3;1,2,3", "--eps", "1e-9"});
  CHECK(rcheck.code == 0);
  CHECK(rcheck.out.find("holds") != std::string::npos);

  Run rfail = run_cli({"approx", "--rcheck", "0,0,0;0,1,0;0,0,1", "--eps", "1e-3"});
  CHECK(rfail.code == 0);
  CHECK(rfail.out.find("fails") != std::string::npos);
}

TEST_CASE("grid subcommand") {
  Run g = run_cli({"grid", "--json", "--grid", "-10,10,-10,10,201,201", "1/4*(y^2 - x^2)"});
  CHECK(g.code == 0);
  auto j = nlohmann::json::parse(g.out);
  CHECK(j["max_abs"].get<double>() == doctest::Approx(25.0).epsilon(1e-12));
  CHECK(j["nan_count"] == 0);
}

TEST_CASE("deterministic output") {
  std::vector<std::string> args{"factor", "--json",
                                "Dx^2 - Dy^2 + y*Dx + x*Dy + 1/4*(y^2-x^2) - 1"};
  Run first = run_cli(args);
  Run second = run_cli(args);
  CHECK(first.out == second.out);
  CHECK(first.code == second.code);
}

TEST_CASE("golden operators round trip through parse") {
  const char* goldens[] = {
      "Dx*Dy + x*Dx + 1",
      "Dx^2 - Dy^2 + y*Dx + x*Dy + 1/4*(y^2-x^2) - 1",
      "Dx^3 + x*Dx^2*Dy + 2*Dx^2 + (2*x+2)*Dx*Dy + Dx + (2+x)*Dy",
      "Dx^2 - Dy^2 + sin(y)*Dx + cos(x)*Dy + 1/2*(sin(y)^2 - cos(x)^2)",
  };
  for (const char* text : goldens) {
    Lpdo op = parse_operator(text);
    CHECK(parse_operator(to_string(op)) == op);
  }
}

TEST_CASE("usage errors") {
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"bogus"}).code == 2);
  CHECK(run_cli({"factor"}).code == 2);
  CHECK(run_cli({"approx", "--rcheck", "1,2;3", "--eps", "0.1"}).code == 2);
  CHECK(run_cli({"grid", "--grid", "0,1,0", "x"}).code == 2);
  CHECK(run_cli({"--help"}).code == 0);
}
