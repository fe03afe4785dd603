#pragma once

#include "pandora/adversary.hpp"
#include "pandora/contracts.hpp"
#include "pandora/designer.hpp"
#include "pandora/domain.hpp"
#include "pandora/indices.hpp"
#include "pandora/search.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace pandora::json {

using Json = nlohmann::json;

/// Number node; infinities become the strings "+inf" and "-inf", -0 becomes 0.
Json number(double x);

/// Sorted keys, two-space indent, doubles at 17 significant digits, trailing newline.
std::string dump_canonical(const Json& j);

/// Parses text; malformed input throws Error(Validation).
Json parse_text(const std::string& text);

// Strict readers: unknown or missing keys and wrong types throw Error(Validation).
Distribution read_distribution(const Json& j);
Project read_project(const Json& j);
std::vector<Project> read_projects(const Json& j);
UtilityFn read_utility(const Json& j);
Contract read_contract(const Json& j);
AdversaryGrid read_grid(const Json& j);

double read_number(const Json& j, const std::string& what);
std::uint64_t read_count(const Json& j, const std::string& what);

Json to_json(const Distribution& d);
Json to_json(const Project& p);
Json to_json(const UtilityFn& u);
Json to_json(const Contract& w);
Json to_json(const IndexResult& r);
Json to_json(const PayoffReport& r);
Json to_json(const SimulationEstimate& s);
Json to_json(const GuaranteeReport& g);
Json to_json(const OptimalityVerdict& v);
Json to_json(const StructureReport& s);
Json to_json(const MoralHazardDesign& d);
Json to_json(const RiskAverseDesign& d);
Json to_json(const MultiAgentPlan& p);
Json to_json(const EfficiencyReport& e);

/// Rejects keys outside `allowed`.
void require_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where);

} // namespace pandora::json
