#include "lpdo/json_io.hpp"

namespace lpdo {

Json to_json(const Lpdo& a) {
  Json coeffs = Json::object();
  for (const auto& [key, c] : a.coeffs())
    coeffs[std::to_string(key.first) + "," + std::to_string(key.second)] = to_string(c);
  Json j;
  j["text"] = to_string(a);
  j["coeffs"] = coeffs;
  if (!a.is_zero_operator()) j["order"] = a.order();
  return j;
}

Json to_json(const RootDirection& r) {
  Json j;
  j["kind"] = r.infinite ? "infinite" : "finite";
  j["omega"] = r.infinite ? Json(nullptr) : Json(to_string(r.omega));
  j["multiplicity"] = r.multiplicity;
  return j;
}

Json to_json(const FactorizationReport& rep) {
  Json j;
  j["root"] = to_json(rep.root);
  j["side"] = rep.side == FactorSide::Left ? "left" : "right";
  j["status"] = to_string(rep.status);
  j["factor"] = Json{{"alpha", to_string(rep.factor.alpha)},
                     {"beta", to_string(rep.factor.beta)},
                     {"p", to_string(rep.factor.p)},
                     {"text", to_string(rep.factor)}};
  j["cofactor"] = to_json(rep.cofactor);
  Json invs = Json::array();
  for (const auto& inv : rep.invariants)
    invs.push_back(Json{{"grade", inv.grade},
                        {"value", to_string(inv.value)},
                        {"verdict", to_string(inv.verdict)}});
  j["invariants"] = invs;
  j["riccati"] = rep.riccati ? Json(to_string(*rep.riccati)) : Json(nullptr);
  return j;
}

Json to_json(const FactorChain& chain) {
  Json factors = Json::array();
  for (const auto& f : chain.factors) factors.push_back(to_string(f));
  return Json{{"factors", factors}, {"text", to_string(chain)}};
}

Json to_json(const FactorizationResult& result) {
  Json chains = Json::array();
  for (const auto& c : result.chains) chains.push_back(to_json(c));
  Json obstructions = Json::array();
  for (const auto& o : result.obstructions) obstructions.push_back(to_json(o));
  return Json{{"chains", chains},
              {"obstructions", obstructions},
              {"unresolved_roots", result.unresolved_roots}};
}

Json to_json(const GridSpec& spec) {
  return Json{{"x0", spec.x0}, {"x1", spec.x1}, {"y0", spec.y0},
              {"y1", spec.y1}, {"nx", spec.nx}, {"ny", spec.ny}};
}

Json summary_json(const GridField& field) {
  FieldSummary s = summarize(field);
  Json j;
  j["max_abs"] = s.max_abs;
  j["min_abs"] = s.min_abs;
  j["mean_abs"] = s.mean_abs;
  j["argmax"] = Json::array({s.argmax_x, s.argmax_y});
  j["nan_count"] = s.nan_count;
  j["grid"] = to_json(field.spec);
  j["source"] = to_string(field.source);
  return j;
}

std::string report_text(const FactorizationReport& rep) {
  std::string s = "root " + to_string(rep.root) + ": " + to_string(rep.status) + "\n";
  if (rep.status == FactorStatus::Factored) {
    if (rep.side == FactorSide::Left)
      s += "  [" + to_string(rep.factor) + "] [" + to_string(rep.cofactor) + "]\n";
    else
      s += "  [" + to_string(rep.cofactor) + "] [" + to_string(rep.factor) + "]\n";
  }
  for (const auto& inv : rep.invariants)
    s += "  inv[" + std::to_string(inv.grade) + "] = " + to_string(inv.value) + "  (" +
         to_string(inv.verdict) + ")\n";
  if (rep.riccati) s += "  Riccati residual: " + to_string(*rep.riccati) + "\n";
  return s;
}

}  // namespace lpdo
