#include "fixtures.hpp"
#include "random_instances.hpp"

#include "pandora/cli.hpp"
#include "pandora/json_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pandora;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("pandora_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("canonical numbers") {
    CHECK(json::dump_canonical(json::number(0.1)) == "0.10000000000000001\n");
    CHECK(json::dump_canonical(json::number(40.0)) == "40\n");
    CHECK(json::dump_canonical(json::number(-0.0)) == "0\n");
    CHECK(json::dump_canonical(json::number(1.0 / 0.0)) == "\"+inf\"\n");
    CHECK(json::dump_canonical(json::Json{{"b", 1}, {"a", 2}}) == "{\n  \"a\": 2,\n  \"b\": 1\n}\n");
}

TEST_CASE("distribution round trip is byte identical") {
    gen::Rng rng(61);
    for (int t = 0; t < 100; ++t) {
        const auto d = gen::distribution(rng, gen::pick(rng, 1, 6));
        const std::string once = json::dump_canonical(json::to_json(d));
        const auto back = json::read_distribution(json::parse_text(once));
        CHECK(back == d);
        CHECK(json::dump_canonical(json::to_json(back)) == once);
    }
}

TEST_CASE("contract and utility round trips") {
    const std::vector<Contract> ws{Contract::pure_debt(80), Contract::debt_plus_equity(40, 1.0 / 3.0),
                                   Contract::capped_earnout(40, 20), Contract::linear(0.2), Contract::constant(10),
                                   Contract::piecewise({0.0, 10.0}, {0.0, 5.0}, {0.0, 0.5})};
    for (const auto& w : ws) {
        const auto j = json::to_json(w);
        const auto back = json::read_contract(j);
        CHECK(json::to_json(back) == j);
    }
    for (const auto& u : {UtilityFn::identity(), UtilityFn::power(0.5), UtilityFn::scaled_sqrt(2.0),
                          UtilityFn::tabulated({0.0, 10.0}, {0.0, 5.0})}) {
        CHECK(json::read_utility(json::to_json(u)) == u);
    }
}

TEST_CASE("strict parsing") {
    using json::Json;
    CHECK_THROWS_AS(json::read_contract(Json{{"kind", "pure_debt"}, {"z", 80}, {"extra", 1}}), Error);
    CHECK_THROWS_AS(json::read_contract(Json{{"kind", "bond"}}), Error);
    CHECK_THROWS_AS(json::read_contract(Json{{"kind", "pure_debt"}}), Error);
    CHECK_THROWS_AS(json::read_project(Json{{"dist", {{"support", {1}}, {"probs", {1}}}}}), Error);
    CHECK_THROWS_AS(json::read_distribution(Json{{"support", {1, 2}}, {"probs", {1}}}), Error);
    CHECK_THROWS_AS(json::read_distribution(Json{{"support", {"x"}}, {"probs", {1}}}), Error);
    CHECK_THROWS_AS(json::parse_text("{"), Error);
    try {
        json::read_utility(Json{{"kind", "identity"}, {"scale", 1}});
        FAIL("expected Validation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Validation);
    }
}

TEST_CASE("plot data") {
    const std::string csv = cli::emit_plot_data(Contract::pure_debt(80), 100.0, 6);
    CHECK(csv.rfind("y,wage,principal\n", 0) == 0);
    CHECK(csv.find("\n80,0,80\n") != std::string::npos);
    const std::string cap = cli::emit_plot_data(Contract::capped_earnout(40, 20), 100.0, 3);
    CHECK(cap.find("\n60,20,40\n") != std::string::npos);
    std::istringstream rows(cli::emit_plot_data(Contract::linear(0.2), 50.0, 11));
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) {
        double y = 0, w = 0, p = 0;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &y, &w, &p) == 3);
        CHECK(w == doctest::Approx(0.2 * y));
    }
    CHECK_THROWS_AS(cli::emit_plot_data(Contract::linear(0.2), 50.0, 1), Error);
}

TEST_CASE("exit codes") {
    CHECK(cli::exit_code(ErrorCode::Validation) == 2);
    CHECK(cli::exit_code(ErrorCode::ProbSumInvalid) == 2);
    CHECK(cli::exit_code(ErrorCode::Infeasible) == 3);
    CHECK(cli::exit_code(ErrorCode::BudgetExceeded) == 4);
}

TEST_CASE("scenario runs write deterministic reports") {
    const fs::path dir = scratch("baseline");
    const fs::path sc = dir / "baseline.json";
    std::ofstream(sc) << R"({"known_project":{"dist":{"support":[0,100],"probs":[0.5,0.5]},"cost":10},
        "contract":{"kind":"pure_debt","z":80},
        "outputs":{"report":"out/report.json","plot":{"path":"out/plot.csv","y_max":100,"n":11}}})";
    cli::RunOptions opts{dir, true};
    REQUIRE(cli::run_scenario(sc, opts) == 0);
    const auto rep = json::parse_text(slurp(dir / "out/report.json"));
    CHECK(rep["guarantee"]["structural"]["value"] == 40.0);
    CHECK(rep["guarantee"]["structural"]["witness"] == "known_only");
    const std::string first = slurp(dir / "out/report.json");
    REQUIRE(cli::run_scenario(sc, opts) == 0);
    CHECK(slurp(dir / "out/report.json") == first);
    CHECK(fs::exists(dir / "out/plot.csv"));
}

TEST_CASE("scenario models") {
    const fs::path dir = scratch("models");
    const fs::path sc = dir / "mh.json";
    std::ofstream(sc) << R"({"known_project":{"dist":{"support":[0,100],"probs":[0.5,0.5]},"cost":10},
        "model":{"moral_hazard":{"k":0.75}},"outputs":{"report":"mh.report.json"}})";
    REQUIRE(cli::run_scenario(sc, {dir, true}) == 0);
    const auto rep = json::parse_text(slurp(dir / "mh.report.json"));
    CHECK(rep["design"]["z"].get<double>() == doctest::Approx(20.0));
    CHECK(rep["design"]["alpha"] == 0.25);
}

TEST_CASE("scenario failures leave no output") {
    const fs::path dir = scratch("bad");
    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << R"({"known_project": )";
    CHECK(cli::run_scenario(bad, {dir, true}) == 2);
    const fs::path unknown = dir / "unknown.json";
    std::ofstream(unknown) << R"({"known_project":{"dist":{"support":[0,100],"probs":[0.5,0.5]},"cost":10},
        "colour":"red","outputs":{"report":"r.json"}})";
    CHECK(cli::run_scenario(unknown, {dir, true}) == 2);
    const fs::path infeasible = dir / "ra.json";
    std::ofstream(infeasible) << R"({"known_project":{"dist":{"support":[0,100],"probs":[0.5,0.5]},"cost":10},
        "model":{"risk_averse":{"utility":{"kind":"scaled_sqrt","scale":1}}},"outputs":{"report":"r.json"}})";
    CHECK(cli::run_scenario(infeasible, {dir, true}) == 3);
    const fs::path budget = dir / "budget.json";
    std::ofstream(budget) << R"({"known_project":{"dist":{"support":[0,100],"probs":[0.5,0.5]},"cost":10},
        "contract":{"kind":"pure_debt","z":80},"method":"brute","grid":{"max_extra":3},"outputs":{"report":"r.json"}})";
    CHECK(cli::run_scenario(budget, {dir, true}) == 4);
    CHECK_FALSE(fs::exists(dir / "r.json"));
}
