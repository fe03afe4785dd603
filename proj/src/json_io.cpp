#include "pandora/json_io.hpp"

#include "pandora/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace pandora::json {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::Validation, what); }

void write(const Json& j, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(2 * depth), ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad + Json(it.key()).dump() + ": ";
            write(it.value(), out, depth + 1);
        }
        out += "\n" + close + "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += ",\n";
            out += pad;
            write(j[i], out, depth + 1);
        }
        out += "\n" + close + "]";
        return;
    }
    case Json::value_t::number_float: {
        const double x = j.get<double>();
        if (!std::isfinite(x)) {
            out += x > 0 ? "\"+inf\"" : (x < 0 ? "\"-inf\"" : "null");
            return;
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
        out += buf;
        return;
    }
    default: out += j.dump();
    }
}

Json numbers(std::span<const double> xs) {
    Json a = Json::array();
    for (double x : xs) a.push_back(number(x));
    return a;
}

std::vector<double> read_numbers(const Json& j, const std::string& what) {
    if (!j.is_array()) invalid(what + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : j) out.push_back(read_number(x, what));
    return out;
}

const Json& field(const Json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) invalid(where + " is missing \"" + key + "\"");
    return *it;
}

void require_object(const Json& j, const std::string& where) {
    if (!j.is_object()) invalid(where + " must be an object");
}

std::string read_kind(const Json& j, const std::string& where) {
    const Json& k = field(j, "kind", where);
    if (!k.is_string()) invalid(where + " kind must be a string");
    return k.get<std::string>();
}

} // namespace

Json number(double x) {
    if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
    if (std::isnan(x)) return nullptr;
    return x == 0.0 ? 0.0 : x;
}

std::string dump_canonical(const Json& j) {
    std::string out;
    write(j, out, 0);
    out += "\n";
    return out;
}

Json parse_text(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        invalid(std::string("malformed JSON: ") + e.what());
    }
}

void require_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    require_object(obj, where);
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
        if (!ok) invalid(where + " has unknown field \"" + it.key() + "\"");
    }
}

double read_number(const Json& j, const std::string& what) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "+inf" || s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    if (!j.is_number()) invalid(what + " must be a number");
    return j.get<double>();
}

std::uint64_t read_count(const Json& j, const std::string& what) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
        invalid(what + " must be a nonnegative integer");
    return j.get<std::uint64_t>();
}

Distribution read_distribution(const Json& j) {
    require_keys(j, {"support", "probs"}, "distribution");
    const auto ys = read_numbers(field(j, "support", "distribution"), "support");
    const auto ps = read_numbers(field(j, "probs", "distribution"), "probs");
    if (ys.size() != ps.size()) invalid("distribution support and probs differ in length");
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < ys.size(); ++i) pairs.emplace_back(ys[i], ps[i]);
    return make_distribution(pairs);
}

Project read_project(const Json& j) {
    require_keys(j, {"dist", "cost"}, "project");
    return Project(read_distribution(field(j, "dist", "project")), read_number(field(j, "cost", "project"), "cost"));
}

std::vector<Project> read_projects(const Json& j) {
    if (!j.is_array()) invalid("projects must be an array");
    std::vector<Project> out;
    for (const auto& p : j) out.push_back(read_project(p));
    return out;
}

UtilityFn read_utility(const Json& j) {
    require_object(j, "utility");
    const std::string kind = read_kind(j, "utility");
    if (kind == "identity") {
        require_keys(j, {"kind"}, "utility");
        return UtilityFn::identity();
    }
    if (kind == "power") {
        require_keys(j, {"kind", "exponent"}, "utility");
        return UtilityFn::power(read_number(field(j, "exponent", "utility"), "exponent"));
    }
    if (kind == "scaled_sqrt") {
        require_keys(j, {"kind", "scale"}, "utility");
        return UtilityFn::scaled_sqrt(read_number(field(j, "scale", "utility"), "scale"));
    }
    if (kind == "tabulated") {
        require_keys(j, {"kind", "breakpoints", "values"}, "utility");
        return UtilityFn::tabulated(read_numbers(field(j, "breakpoints", "utility"), "breakpoints"),
                                    read_numbers(field(j, "values", "utility"), "values"));
    }
    invalid("unknown utility kind \"" + kind + "\"");
}

Contract read_contract(const Json& j) {
    require_object(j, "contract");
    const std::string kind = read_kind(j, "contract");
    auto num = [&](const char* key) { return read_number(field(j, key, "contract"), key); };
    if (kind == "pure_debt") {
        require_keys(j, {"kind", "z"}, "contract");
        return Contract::pure_debt(num("z"));
    }
    if (kind == "debt_plus_equity") {
        require_keys(j, {"kind", "z", "alpha"}, "contract");
        return Contract::debt_plus_equity(num("z"), num("alpha"));
    }
    if (kind == "capped_earnout") {
        require_keys(j, {"kind", "z", "wbar"}, "contract");
        return Contract::capped_earnout(num("z"), num("wbar"));
    }
    if (kind == "linear") {
        require_keys(j, {"kind", "alpha"}, "contract");
        return Contract::linear(num("alpha"));
    }
    if (kind == "constant") {
        require_keys(j, {"kind", "value"}, "contract");
        return Contract::constant(num("value"));
    }
    if (kind == "piecewise") {
        require_keys(j, {"kind", "breakpoints", "values", "slopes"}, "contract");
        return Contract::piecewise(read_numbers(field(j, "breakpoints", "contract"), "breakpoints"),
                                   read_numbers(field(j, "values", "contract"), "values"),
                                   read_numbers(field(j, "slopes", "contract"), "slopes"));
    }
    invalid("unknown contract kind \"" + kind + "\"");
}

AdversaryGrid read_grid(const Json& j) {
    require_keys(j,
                 {"max_extra", "prizes", "limit_prizes", "costs", "probs", "max_support", "include_limits", "offset",
                  "full_pairs"},
                 "grid");
    AdversaryGrid g;
    if (j.contains("max_extra")) g.max_extra = read_count(j["max_extra"], "max_extra");
    if (j.contains("prizes")) g.prizes = read_numbers(j["prizes"], "prizes");
    if (j.contains("limit_prizes")) g.limit_prizes = read_numbers(j["limit_prizes"], "limit_prizes");
    if (j.contains("costs")) g.costs = read_numbers(j["costs"], "costs");
    if (j.contains("probs")) g.probs = read_numbers(j["probs"], "probs");
    if (j.contains("max_support")) g.max_support = read_count(j["max_support"], "max_support");
    if (j.contains("offset")) g.offset = read_number(j["offset"], "offset");
    for (const char* key : {"include_limits", "full_pairs"}) {
        if (!j.contains(key)) continue;
        if (!j[key].is_boolean()) invalid(std::string(key) + " must be a boolean");
    }
    if (j.contains("include_limits")) g.include_limits = j["include_limits"].get<bool>();
    if (j.contains("full_pairs")) g.full_pairs = j["full_pairs"].get<bool>();
    return g;
}

// ---------------------------------------------------------------------------

Json to_json(const Distribution& d) { return Json{{"support", numbers(d.support())}, {"probs", numbers(d.probs())}}; }

Json to_json(const Project& p) { return Json{{"dist", to_json(p.dist)}, {"cost", number(p.cost)}}; }

Json to_json(const UtilityFn& u) {
    switch (u.kind()) {
    case UtilityFn::Kind::identity: return Json{{"kind", "identity"}};
    case UtilityFn::Kind::power: return Json{{"kind", "power"}, {"exponent", number(u.parameter())}};
    case UtilityFn::Kind::scaled_sqrt: return Json{{"kind", "scaled_sqrt"}, {"scale", number(u.parameter())}};
    case UtilityFn::Kind::tabulated:
        return Json{{"kind", "tabulated"}, {"breakpoints", numbers(u.table_x())}, {"values", numbers(u.table_u())}};
    }
    return Json{{"kind", "identity"}};
}

Json to_json(const Contract& w) {
    const auto& p = w.params();
    switch (w.kind()) {
    case Contract::Kind::pure_debt: return Json{{"kind", "pure_debt"}, {"z", number(p.z)}};
    case Contract::Kind::debt_plus_equity:
        return Json{{"kind", "debt_plus_equity"}, {"z", number(p.z)}, {"alpha", number(p.alpha)}};
    case Contract::Kind::capped_earnout:
        return Json{{"kind", "capped_earnout"}, {"z", number(p.z)}, {"wbar", number(p.wbar)}};
    case Contract::Kind::linear: return Json{{"kind", "linear"}, {"alpha", number(p.alpha)}};
    case Contract::Kind::constant: return Json{{"kind", "constant"}, {"value", number(p.value)}};
    case Contract::Kind::piecewise: break;
    }
    return Json{{"kind", "piecewise"},
                {"breakpoints", numbers(w.breakpoints())},
                {"values", numbers(w.values())},
                {"slopes", numbers(w.slopes())}};
}

Json to_json(const IndexResult& r) {
    return Json{{"value", number(r.value)}, {"unique", r.unique}, {"never_sample", r.never_sample}};
}

Json to_json(const PayoffReport& r) {
    return Json{{"principal", number(r.principal)},
                {"agent", number(r.agent)},
                {"surplus", number(r.surplus)},
                {"presented_dist", to_json(r.presented_dist)}};
}

Json to_json(const SimulationEstimate& s) {
    return Json{{"principal_mean", number(s.principal_mean)},
                {"principal_std_error", number(s.principal_std_error)},
                {"agent_mean", number(s.agent_mean)},
                {"agent_std_error", number(s.agent_std_error)},
                {"episodes", s.episodes}};
}

Json to_json(const GuaranteeReport& g) {
    Json j{{"value", number(g.value)},
           {"attained", g.attained},
           {"witness", to_string(g.witness)},
           {"sets_evaluated", g.sets_evaluated}};
    if (g.witness == GuaranteeReport::Witness::safe_project) j["witness_x"] = number(g.witness_x);
    if (!g.extra_boxes.empty()) {
        Json boxes = Json::array();
        for (const auto& p : g.extra_boxes) boxes.push_back(to_json(p));
        j["extra_projects"] = boxes;
    }
    if (!g.epsilon_note.empty()) j["epsilon_note"] = g.epsilon_note;
    return j;
}

Json to_json(const OptimalityVerdict& v) {
    return Json{{"mdl", v.mdl}, {"fse", v.fse}, {"optimal", v.optimal}, {"s0", number(v.s0)}, {"r0", number(v.r0)}};
}

Json to_json(const StructureReport& s) {
    return Json{{"limited_liability", s.limited_liability},
                {"wage_monotone", s.wage_monotone},
                {"principal_monotone", s.principal_monotone},
                {"doubly_monotone", s.doubly_monotone},
                {"sup_left_derivative", number(s.sup_left_derivative)}};
}

Json to_json(const MoralHazardDesign& d) {
    return Json{{"k", number(d.k)},
                {"k_star", number(d.k_star)},
                {"z", number(d.z)},
                {"alpha", number(d.alpha)},
                {"contract", to_json(d.contract)}};
}

Json to_json(const RiskAverseDesign& d) {
    return Json{{"z_u", number(d.z_u)},
                {"w_bar_u", number(d.w_bar_u)},
                {"guarantee", number(d.guarantee)},
                {"verified", d.verified},
                {"contract", to_json(d.contract)}};
}

Json to_json(const MultiAgentPlan& p) {
    Json j{{"order", p.order},
           {"debts", numbers(p.debts)},
           {"stop_thresholds", numbers(p.stop_thresholds)},
           {"expected_principal", number(p.expected_principal)}};
    if (p.planner_value) j["planner_value"] = number(*p.planner_value);
    return j;
}

Json to_json(const EfficiencyReport& e) {
    Json j{{"condition", e.condition},
           {"r0", number(e.r0)},
           {"y_min", number(e.y_min)},
           {"audit_sets", e.audit_sets},
           {"shift_identity", e.shift_identity},
           {"order_preserved", e.order_preserved},
           {"stops_match", e.stops_match},
           {"max_surplus_gap", number(e.max_surplus_gap)}};
    if (e.counterexample) {
        j["counterexample"] = Json{{"extra_project", to_json(e.counterexample->extra_box)},
                                   {"planner_surplus", number(e.counterexample->planner_surplus)},
                                   {"agent_surplus", number(e.counterexample->agent_surplus)},
                                   {"gap", number(e.counterexample->gap)}};
    }
    return j;
}

} // namespace pandora::json
