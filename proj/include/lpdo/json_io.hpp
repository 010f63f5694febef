#pragma once

#include <json.hpp>

#include "lpdo/factor.hpp"
#include "lpdo/grid.hpp"

namespace lpdo {

using Json = nlohmann::json;

Json to_json(const Lpdo& a);
Json to_json(const RootDirection& r);
Json to_json(const FactorizationReport& rep);
Json to_json(const FactorChain& chain);
Json to_json(const FactorizationResult& result);
Json to_json(const GridSpec& spec);
Json summary_json(const GridField& field);

/// Paper-style bracket rendering of reports and chains.
std::string report_text(const FactorizationReport& rep);

}  // namespace lpdo
