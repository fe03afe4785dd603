#include "pandora/cli.hpp"

#include "pandora/adversary.hpp"
#include "pandora/designer.hpp"
#include "pandora/indices.hpp"
#include "pandora/json_io.hpp"
#include "pandora/search.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <vector>

namespace pandora::cli {

namespace fs = std::filesystem;
using json::Json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::Validation, what); }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) invalid("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// A flag value is inline JSON when it starts with '{' or '[', otherwise a file path.
Json load_json(const std::string& arg) {
    const auto first = arg.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (arg[first] == '{' || arg[first] == '['))
        return json::parse_text(arg);
    return json::parse_text(read_file(arg));
}

fs::path resolve_dir(const fs::path& explicit_dir) {
    if (!explicit_dir.empty()) return explicit_dir;
    if (const char* env = std::getenv("PANDORA_OUTPUT_DIR"); env && *env) return env;
    return {};
}

/// Writes through a temporary sibling and a rename so readers never see a partial file.
void write_atomic(const fs::path& target, const std::string& content) {
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
    }
    fs::rename(tmp, target);
}

struct Output {
    fs::path dir;
    std::string out_flag;
    std::string default_name;

    void emit(const std::string& content) const {
        if (!out_flag.empty()) {
            fs::path p(out_flag);
            if (p.is_relative() && !dir.empty()) p = dir / p;
            write_atomic(p, content);
        } else if (!dir.empty()) {
            write_atomic(dir / default_name, content);
        } else {
            std::cout << content;
        }
    }
};

void progress(bool quiet, const std::string& msg) {
    if (!quiet) std::cerr << msg << '\n';
}

Json guarantee_json(const Contract& w, const Project& box0, const UtilityFn& u, const std::string& method,
                    const AdversaryGrid& grid, bool quiet) {
    Json out;
    const bool dm = structure(w).doubly_monotone;
    if (method == "structural" || method == "both" || (method == "auto" && dm)) {
        if (!dm && method != "auto")
            throw Error(ErrorCode::NotDoublyMonotone, "structural method needs a doubly monotone contract");
        out["structural"] = json::to_json(guarantee(w, box0, u));
    }
    if (method == "brute" || method == "both" || (method == "auto" && !dm)) {
        const auto rep = brute_force_guarantee(w, box0, u, grid);
        progress(quiet, "brute force: " + std::to_string(rep.sets_evaluated) + " project sets evaluated");
        out["brute_force"] = json::to_json(rep);
    }
    if (out.empty()) invalid("unknown guarantee method \"" + method + "\"");
    return out;
}

/// Baseline family selector: {"kind": "debt" | "dpe" | "capped", "z": ...}.
BaselineDesign design_family(const Json& family, const Project& box0) {
    json::require_keys(family, {"kind", "z"}, "family");
    if (!family.contains("kind") || !family["kind"].is_string()) invalid("family needs a string kind");
    const std::string kind = family["kind"].get<std::string>();
    if (kind == "debt") {
        if (family.contains("z")) invalid("debt family takes no z");
        return pure_debt(box0);
    }
    if (!family.contains("z")) invalid(kind + " family needs z");
    const double z = json::read_number(family["z"], "z");
    if (kind == "dpe") return debt_plus_equity(box0, z);
    if (kind == "capped") return capped_earnout(box0, z);
    invalid("unknown family \"" + kind + "\"");
}

struct ScenarioResult {
    Json report;
    std::optional<Contract> contract;
};

Json baseline_report(const Json& sc, const Project& box0, const std::vector<Project>& extras, const UtilityFn& u,
                     std::optional<Contract>& contract, bool quiet) {
    Json rep;
    if (!contract) {
        const BaselineDesign d = design_family(sc.value("family", Json{{"kind", "debt"}}), box0);
        contract = d.contract;
        rep["design"] = Json{{"degenerate", d.degenerate}, {"cap_binding", d.cap_binding}};
    } else if (sc.contains("family")) {
        invalid("give either a contract or a family, not both");
    }
    const Contract& w = *contract;
    std::vector<Project> boxes{box0};
    boxes.insert(boxes.end(), extras.begin(), extras.end());

    rep["index"] = json::to_json(index(box0));
    rep["induced_index"] = json::to_json(induced_index(w, box0, u));
    rep["structure"] = json::to_json(structure(w));
    rep["verdict"] = json::to_json(classify_optimal(w, box0));
    rep["evaluation"] = json::to_json(evaluate_exact(w, boxes, u));
    rep["planner_value"] = json::number(planner_value(boxes));

    const std::string method = sc.contains("method") ? sc["method"].get<std::string>() : "auto";
    const AdversaryGrid grid = sc.contains("grid") ? json::read_grid(sc["grid"]) : AdversaryGrid{};
    rep["guarantee"] = guarantee_json(w, box0, u, method, grid, quiet);

    if (sc.contains("episodes")) {
        const auto seed = sc.contains("seed") ? json::read_count(sc["seed"], "seed") : 1;
        const auto n = json::read_count(sc["episodes"], "episodes");
        progress(quiet, "simulating " + std::to_string(n) + " episodes");
        rep["simulation"] = json::to_json(simulate(w, boxes, u, seed, n));
    }
    return rep;
}

ScenarioResult execute(const Json& sc, bool quiet) {
    json::require_keys(sc,
                       {"known_project", "known_projects", "extra_projects", "contract", "utility", "model", "family",
                        "grid", "method", "seed", "episodes", "outputs"},
                       "scenario");
    if (sc.contains("method") && !sc["method"].is_string()) invalid("method must be a string");

    std::vector<Project> known;
    if (sc.contains("known_project") && sc.contains("known_projects"))
        invalid("give known_project or known_projects, not both");
    if (sc.contains("known_project")) known.push_back(json::read_project(sc["known_project"]));
    if (sc.contains("known_projects")) known = json::read_projects(sc["known_projects"]);
    if (known.empty()) invalid("scenario needs a known project");

    const std::vector<Project> extras =
        sc.contains("extra_projects") ? json::read_projects(sc["extra_projects"]) : std::vector<Project>{};
    const UtilityFn u = sc.contains("utility") ? json::read_utility(sc["utility"]) : UtilityFn::identity();
    std::optional<Contract> contract;
    if (sc.contains("contract")) contract = json::read_contract(sc["contract"]);

    // model: "name" or {"name": {...}}
    std::string model = "baseline";
    Json params = Json::object();
    if (sc.contains("model")) {
        const Json& m = sc["model"];
        if (m.is_string()) {
            model = m.get<std::string>();
        } else if (m.is_object() && m.size() == 1) {
            model = m.begin().key();
            params = m.begin().value();
        } else {
            invalid("model must be a name or a single-key object");
        }
    }
    auto single_known = [&]() -> const Project& {
        if (known.size() != 1) invalid(model + " model takes exactly one known project");
        return known.front();
    };

    ScenarioResult res;
    Json& rep = res.report;
    rep["model"] = model;
    if (model == "baseline") {
        json::require_keys(params, {}, "baseline model");
        rep.update(baseline_report(sc, single_known(), extras, u, contract, quiet));
    } else if (model == "resampling") {
        json::require_keys(params, {}, "resampling model");
        const Project& box0 = single_known();
        if (!contract) contract = pure_debt(box0).contract;
        rep["index"] = json::to_json(index(box0));
        rep["resampling"] = json::to_json(evaluate_resampling(*contract, box0));
    } else if (model == "moral_hazard") {
        json::require_keys(params, {"k"}, "moral_hazard model");
        if (!params.contains("k")) invalid("moral_hazard model needs k");
        const Project& box0 = single_known();
        const double k = json::read_number(params["k"], "k");
        const MoralHazardDesign d = design_moral_hazard(box0, k);
        contract = d.contract;
        rep["design"] = json::to_json(d);
        rep["diversion_proof"] = diversion_proof(d.contract, k);
        rep["verdict"] = json::to_json(classify_optimal(d.contract, box0));
    } else if (model == "risk_averse") {
        json::require_keys(params, {"utility"}, "risk_averse model");
        if (!params.contains("utility")) invalid("risk_averse model needs a utility");
        const RiskAverseDesign d = design_risk_averse(single_known(), json::read_utility(params["utility"]));
        contract = d.contract;
        rep["design"] = json::to_json(d);
    } else if (model == "multi_agent") {
        json::require_keys(params, {}, "multi_agent model");
        rep["plan"] = json::to_json(plan_multi_agent(known));
    } else if (model == "efficiency") {
        json::require_keys(params, {"audit_sets"}, "efficiency model");
        const auto seed = sc.contains("seed") ? json::read_count(sc["seed"], "seed") : 1;
        const std::size_t sets = params.contains("audit_sets") ? json::read_count(params["audit_sets"], "audit_sets") : 64;
        rep["efficiency"] = json::to_json(efficiency_report(single_known(), seed, sets));
    } else {
        invalid("unknown model \"" + model + "\"");
    }
    if (contract) rep["contract"] = json::to_json(*contract);
    res.contract = contract;
    return res;
}

} // namespace

ExitCode exit_code(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::Validation:
    case ErrorCode::NegativePrize:
    case ErrorCode::ProbSumInvalid:
    case ErrorCode::EmptySupport:
    case ErrorCode::OutOfRange:
    case ErrorCode::InvalidArgument:
    case ErrorCode::ZOutOfRange:
    case ErrorCode::KTooLarge:
    case ErrorCode::NotDoublyMonotone: return kValidation;
    case ErrorCode::Infeasible:
    case ErrorCode::NeverSampled:
    case ErrorCode::NeverStops: return kInfeasible;
    case ErrorCode::BudgetExceeded: return kBudget;
    }
    return kOther;
}

std::string emit_plot_data(const Contract& w, double y_max, std::size_t n) {
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "plot needs at least 2 grid points");
    if (!(y_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "plot range must be positive");
    std::vector<double> ys;
    for (std::size_t i = 0; i < n; ++i) ys.push_back(y_max * static_cast<double>(i) / static_cast<double>(n - 1));
    for (double b : w.breakpoints())
        if (b <= y_max) ys.push_back(b);
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    std::string out = "y,wage,principal\n";
    char buf[96];
    for (double y : ys) {
        const double wy = w(y);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", y, wy, y - wy);
        out += buf;
    }
    return out;
}

namespace {

int run_scenario_impl(const fs::path& path, const RunOptions& opts) {
    const Json sc = json::parse_text(read_file(path));
    ScenarioResult res = execute(sc, opts.quiet);
    const fs::path dir = resolve_dir(opts.output_dir);

    // Build every artifact first so a failure leaves nothing behind.
    std::vector<std::pair<fs::path, std::string>> files;
    std::optional<std::string> to_stdout;
    auto place = [&](const std::string& p) {
        fs::path f(p);
        return f.is_relative() && !dir.empty() ? dir / f : f;
    };
    const Json outputs = sc.value("outputs", Json::object());
    json::require_keys(outputs, {"report", "plot"}, "outputs");
    const std::string report = json::dump_canonical(res.report);
    if (outputs.contains("report")) {
        if (!outputs["report"].is_string()) invalid("outputs.report must be a path");
        files.emplace_back(place(outputs["report"].get<std::string>()), report);
    } else if (!dir.empty()) {
        files.emplace_back(dir / (path.stem().string() + ".report.json"), report);
    } else {
        to_stdout = report;
    }
    if (outputs.contains("plot")) {
        const Json& p = outputs["plot"];
        json::require_keys(p, {"path", "y_max", "n"}, "outputs.plot");
        if (!p.contains("path") || !p["path"].is_string()) invalid("outputs.plot needs a path");
        if (!res.contract) invalid("plot requested but the scenario has no contract");
        const double y_max =
            p.contains("y_max") ? json::read_number(p["y_max"], "y_max") : 0.0;
        const std::size_t n = p.contains("n") ? json::read_count(p["n"], "n") : 101;
        double top = y_max;
        if (top <= 0.0) {
            const Json& kp = sc.contains("known_project") ? sc["known_project"] : sc["known_projects"][0];
            top = json::read_project(kp).dist.max_support();
        }
        files.emplace_back(place(p["path"].get<std::string>()), emit_plot_data(*res.contract, top, n));
    }
    for (const auto& [f, content] : files) {
        write_atomic(f, content);
        progress(opts.quiet, "wrote " + f.string());
    }
    if (to_stdout) std::cout << *to_stdout;
    return kOk;
}

int report_failure(const char* kind, const std::string& what, int code) {
    std::cerr << "error: " << kind << what << '\n';
    return code;
}

} // namespace

int run_scenario(const fs::path& path, const RunOptions& opts) {
    try {
        return run_scenario_impl(path, opts);
    } catch (const Error& e) {
        return report_failure("", e.what(), exit_code(e.code()));
    } catch (const Json::exception& e) {
        return report_failure("Validation: ", e.what(), kValidation);
    } catch (const std::exception& e) {
        return report_failure("", e.what(), kOther);
    }
}

int main(int argc, char** argv) {
    CLI::App app{"Robust contracts for delegated Pandora's-box search"};
    app.require_subcommand(1);
    app.fallthrough();
    bool quiet = false;
    std::string out_dir;
    app.add_flag("-q,--quiet", quiet, "Suppress progress messages on stderr");
    app.add_option("--output-dir", out_dir, "Directory for output files (default: $PANDORA_OUTPUT_DIR)");

    std::string project, contract, utility, projects, out, grid, method = "auto", model = "baseline",
                family = "debt";
    std::uint64_t seed = 1, episodes = 100000;
    double z = 0.0, k = 0.0, y_max = 100.0;
    std::size_t points = 101;
    bool resampling = false;

    auto add_out = [&](CLI::App* sub) { sub->add_option("-o,--out", out, "Output file (default: stdout)"); };

    auto* idx = app.add_subcommand("index", "Index of a project, optionally induced by a contract");
    idx->add_option("--project", project, "Project JSON or file")->required();
    idx->add_option("--contract", contract, "Contract JSON or file");
    idx->add_option("--utility", utility, "Utility JSON or file");
    add_out(idx);

    auto* ev = app.add_subcommand("evaluate", "Exact payoffs of the agent's optimal search");
    ev->add_option("--contract", contract, "Contract JSON or file")->required();
    ev->add_option("--projects", projects, "JSON array of projects, or file")->required();
    ev->add_option("--utility", utility, "Utility JSON or file");
    ev->add_flag("--resampling", resampling, "Single box that may be redrawn");
    add_out(ev);

    auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate of the search payoffs");
    sim->add_option("--contract", contract, "Contract JSON or file")->required();
    sim->add_option("--projects", projects, "JSON array of projects, or file")->required();
    sim->add_option("--utility", utility, "Utility JSON or file");
    sim->add_option("--seed", seed, "Generator seed");
    sim->add_option("--episodes", episodes, "Number of episodes")->check(CLI::PositiveNumber);
    add_out(sim);

    auto* gu = app.add_subcommand("guarantee", "Worst-case payoff guarantee of a contract");
    gu->add_option("--contract", contract, "Contract JSON or file")->required();
    gu->add_option("--known-project", project, "Known project JSON or file")->required();
    gu->add_option("--utility", utility, "Utility JSON or file");
    gu->add_option("--method", method, "structural, brute, both or auto")
        ->check(CLI::IsMember({"structural", "brute", "both", "auto"}));
    gu->add_option("--grid", grid, "Adversary grid overrides, JSON or file");
    add_out(gu);

    auto* de = app.add_subcommand("design", "Construct an optimal contract");
    de->add_option("--known-project", project, "Known project JSON or file");
    de->add_option("--known-projects", projects, "JSON array of projects for multi-agent");
    de->add_option("--model", model, "baseline, moral-hazard, risk-averse, multi-agent or efficiency")
        ->check(CLI::IsMember({"baseline", "moral-hazard", "risk-averse", "multi-agent", "efficiency"}));
    de->add_option("--family", family, "debt, dpe or capped")->check(CLI::IsMember({"debt", "dpe", "capped"}));
    de->add_option("--z", z, "Debt level for dpe and capped");
    de->add_option("--k", k, "Diversion rate for moral-hazard");
    de->add_option("--utility", utility, "Utility JSON or file for risk-averse");
    de->add_option("--seed", seed, "Audit seed for efficiency");
    add_out(de);

    auto* pl = app.add_subcommand("plot", "CSV of wage and principal payoff");
    pl->add_option("--contract", contract, "Contract JSON or file")->required();
    pl->add_option("--y-max", y_max, "Right end of the grid");
    pl->add_option("--n", points, "Uniform grid points");
    add_out(pl);

    auto* sc = app.add_subcommand("scenario", "Scenario files");
    sc->require_subcommand(1);
    sc->fallthrough();
    std::string scenario_file;
    auto* run = sc->add_subcommand("run", "Run a scenario file");
    run->add_option("file", scenario_file, "Scenario JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }

    try {
        const fs::path dir = resolve_dir(out_dir);
        const auto util = [&] { return utility.empty() ? UtilityFn::identity() : json::read_utility(load_json(utility)); };

        if (*run) return run_scenario(scenario_file, RunOptions{out_dir, quiet});

        if (*idx) {
            const Project p = json::read_project(load_json(project));
            const IndexResult r = contract.empty() ? index(p) : induced_index(json::read_contract(load_json(contract)), p, util());
            Output{dir, out, "index.json"}.emit(json::dump_canonical(json::to_json(r)));
        } else if (*ev) {
            const Contract w = json::read_contract(load_json(contract));
            const auto boxes = json::read_projects(load_json(projects));
            PayoffReport r;
            if (resampling) {
                if (boxes.size() != 1) invalid("resampling takes exactly one project");
                r = evaluate_resampling(w, boxes.front());
            } else {
                r = evaluate_exact(w, boxes, util());
            }
            Output{dir, out, "evaluate.json"}.emit(json::dump_canonical(json::to_json(r)));
        } else if (*sim) {
            const Contract w = json::read_contract(load_json(contract));
            const auto boxes = json::read_projects(load_json(projects));
            progress(quiet, "simulating " + std::to_string(episodes) + " episodes");
            const auto est = simulate(w, boxes, util(), seed, episodes);
            Output{dir, out, "simulate.json"}.emit(json::dump_canonical(json::to_json(est)));
        } else if (*gu) {
            const Contract w = json::read_contract(load_json(contract));
            const Project p = json::read_project(load_json(project));
            const AdversaryGrid g = grid.empty() ? AdversaryGrid{} : json::read_grid(load_json(grid));
            const Json rep = guarantee_json(w, p, util(), method, g, quiet);
            Output{dir, out, "guarantee.json"}.emit(json::dump_canonical(rep));
        } else if (*de) {
            Json rep;
            if (model == "multi-agent") {
                if (projects.empty()) invalid("multi-agent design needs --known-projects");
                rep = json::to_json(plan_multi_agent(json::read_projects(load_json(projects))));
            } else {
                if (project.empty()) invalid("design needs --known-project");
                const Project p = json::read_project(load_json(project));
                if (model == "baseline") {
                    Json fam{{"kind", family}};
                    if (family != "debt") {
                        if (de->count("--z") == 0) invalid(family + " family needs --z");
                        fam["z"] = z;
                    }
                    const BaselineDesign d = design_family(fam, p);
                    rep = Json{{"contract", json::to_json(d.contract)},
                               {"degenerate", d.degenerate},
                               {"cap_binding", d.cap_binding},
                               {"verdict", json::to_json(classify_optimal(d.contract, p))}};
                } else if (model == "moral-hazard") {
                    const MoralHazardDesign d = design_moral_hazard(p, k);
                    rep = json::to_json(d);
                    rep["diversion_proof"] = diversion_proof(d.contract, k);
                } else if (model == "risk-averse") {
                    if (utility.empty()) invalid("risk-averse design needs --utility");
                    rep = json::to_json(design_risk_averse(p, util()));
                } else {
                    rep = json::to_json(efficiency_report(p, seed));
                }
            }
            Output{dir, out, "design.json"}.emit(json::dump_canonical(rep));
        } else if (*pl) {
            const Contract w = json::read_contract(load_json(contract));
            Output{dir, out, "plot.csv"}.emit(emit_plot_data(w, y_max, points));
        }
        return kOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const Json::exception& e) {
        std::cerr << "error: Validation: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOther;
    }
}

} // namespace pandora::cli
