#include "fixtures.hpp"
#include "oracles.hpp"
#include "random_instances.hpp"

#include "pandora/detail/search_kernel.hpp"
#include "pandora/error.hpp"
#include "pandora/indices.hpp"
#include "pandora/search.hpp"

#include <doctest.h>

using namespace pandora;

TEST_CASE("evaluate_exact fixtures") {
    const auto a0 = fixture::a0();
    const auto w0 = Contract::pure_debt(80);

    const auto base = evaluate_exact(w0, {a0});
    CHECK(base.principal == doctest::Approx(40.0).epsilon(1e-15));
    CHECK(base.agent == doctest::Approx(0.0).scale(1.0));
    CHECK(base.surplus == doctest::Approx(40.0));
    CHECK(base.presented_dist == a0.dist);

    const auto lin = evaluate_exact(Contract::linear(0.2), {a0, Project(dirac(0.01), 0.0)});
    CHECK(lin.principal == doctest::Approx(0.008).epsilon(1e-12));
    CHECK(lin.presented_dist == dirac(0.01));

    // Free coin flip opened first; after a zero the agent is indifferent about
    // a0 and opens it in the principal's favor: 0.5 * 80 + 0.25 * 80.
    const auto two = evaluate_exact(w0, {a0, fixture::a0(0.0)});
    const auto oracle_two = oracle::HistorySearch(w0, {a0, fixture::a0(0.0)}).value();
    CHECK(two.principal == doctest::Approx(oracle_two.second));
    CHECK(two.principal == doctest::Approx(60.0));
}

TEST_CASE("planner value fixtures") {
    CHECK(planner_value({fixture::a0()}) == doctest::Approx(40.0));
    CHECK(planner_value({fixture::a0(), fixture::second_agent()}) == doctest::Approx(52.0));
    CHECK(planner_value({}) == 0.0);
}

TEST_CASE("empty set and outside option") {
    const auto r = evaluate_exact(Contract::constant(7.0), {});
    CHECK(r.principal == -7.0);
    CHECK(r.agent == 7.0);
    CHECK(r.presented_dist == dirac(0.0));
}

TEST_CASE("budget limits") {
    std::vector<Project> many(13, fixture::a0());
    CHECK_THROWS_AS(evaluate_exact(Contract::linear(0.5), many), Error);
    std::vector<std::pair<double, double>> atoms;
    for (int i = 0; i < 33; ++i) atoms.emplace_back(i, 1.0 / 33.0);
    try {
        evaluate_exact(Contract::linear(0.5), {Project(make_distribution(atoms), 1.0)});
        FAIL("expected BudgetExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BudgetExceeded);
    }
    std::vector<Project> twelve(12, Project(make_distribution({{0, .5}, {10, .5}}), 1.0));
    CHECK_NOTHROW(evaluate_exact(Contract::linear(0.5), twelve));
}

TEST_CASE("dynamic program agrees with the history oracle") {
    gen::Rng rng(31);
    for (int t = 0; t < 300; ++t) {
        std::vector<Project> boxes;
        const std::size_t n = gen::pick(rng, 1, 3);
        for (std::size_t i = 0; i < n; ++i) boxes.push_back(gen::project(rng, 1, 3));
        const Contract w = t % 3 == 0 ? gen::arbitrary(rng) : gen::doubly_monotone(rng);
        const UtilityFn u = t % 5 == 0 ? UtilityFn::scaled_sqrt(3.0) : UtilityFn::identity();
        const auto rep = evaluate_exact(w, boxes, u);
        const auto [agent, principal] = oracle::HistorySearch(w, boxes, u).value();
        CHECK(rep.agent == doctest::Approx(agent).epsilon(1e-9).scale(1.0));
        CHECK(rep.principal == doctest::Approx(principal).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("report invariants and kernel agreement") {
    gen::Rng rng(32);
    for (int t = 0; t < 200; ++t) {
        std::vector<Project> boxes;
        const std::size_t n = gen::pick(rng, 0, 3);
        for (std::size_t i = 0; i < n; ++i) boxes.push_back(gen::project(rng));
        const Contract w = t % 2 ? gen::arbitrary(rng) : gen::doubly_monotone(rng);
        const auto rep = evaluate_exact(w, boxes);
        CHECK(rep.agent >= -1e-9);
        CHECK(std::abs(rep.surplus - rep.principal - rep.agent) <= 1e-9);
        // principal payoff equals E[y - w(y)] under the presented law
        double pi = 0.0;
        for (std::size_t k = 0; k < rep.presented_dist.size(); ++k) {
            const double y = rep.presented_dist.support()[k];
            pi += rep.presented_dist.probs()[k] * (y - w(y));
        }
        CHECK(pi == doctest::Approx(rep.principal).epsilon(1e-9).scale(1.0));
        CHECK(planner_value(boxes) >= rep.surplus - 1e-9);

        std::vector<detail::PreparedBox> prepared;
        for (const auto& b : boxes) prepared.push_back(detail::prepare_box(w, b, UtilityFn::identity()));
        std::vector<const detail::PreparedBox*> ptrs;
        for (const auto& b : prepared) ptrs.push_back(&b);
        const detail::Prize outside{0.0, w(0.0), -w(0.0)};
        CHECK(detail::principal_value(ptrs, outside) == doctest::Approx(rep.principal).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("optimal contracts secure the known surplus on random sets") {
    gen::Rng rng(33);
    for (int t = 0; t < 100; ++t) {
        const Project box0 = gen::known_project(rng);
        const Contract w = gen::mdl_fse(rng, box0);
        std::vector<Project> boxes{box0};
        const std::size_t n = gen::pick(rng, 0, 3);
        for (std::size_t i = 0; i < n; ++i) boxes.push_back(gen::project(rng, 1, 2));
        CHECK(evaluate_exact(w, boxes).principal >= box0.surplus() - 1e-9);
    }
}

TEST_CASE("simulate fixtures") {
    const auto a0 = fixture::a0();
    const auto w0 = Contract::pure_debt(80);
    const auto est = simulate(w0, {a0}, UtilityFn::identity(), 1, 100000);
    CHECK(std::abs(est.principal_mean - 40.0) <= 3.0 * est.principal_std_error);
    CHECK(est.principal_std_error > 0.0);

    const auto empty = simulate(Contract::constant(3.0), {}, UtilityFn::identity(), 7, 1000);
    CHECK(empty.principal_mean == -3.0);
    CHECK(empty.agent_mean == 3.0);
    CHECK(empty.principal_std_error == 0.0);

    const auto again = simulate(w0, {a0}, UtilityFn::identity(), 1, 100000);
    CHECK(again.principal_mean == est.principal_mean);
    CHECK(again.agent_mean == est.agent_mean);
    const auto threaded = simulate(w0, {a0}, UtilityFn::identity(), 1, 100000, 4);
    CHECK(threaded.principal_mean == est.principal_mean);
    CHECK(threaded.principal_std_error == est.principal_std_error);
    CHECK_THROWS_AS(simulate(w0, {a0}, UtilityFn::identity(), 1, 0), Error);
}

TEST_CASE("resampling fixtures") {
    const auto a0 = fixture::a0();
    const auto w0 = Contract::pure_debt(80);
    const auto r = evaluate_resampling(w0, a0);
    CHECK(r.principal == 80.0);
    CHECK(r.agent == doctest::Approx(0.0).scale(1.0));
    CHECK(r.presented_dist == dirac(100.0));

    // A constant wage already pays more than the box is worth to the agent.
    const auto c = evaluate_resampling(Contract::constant(10.0), a0);
    CHECK(c.principal == -10.0);
    CHECK(c.agent == 10.0);

    const auto sure = evaluate_resampling(w0, Project(dirac(100.0), 10.0));
    CHECK(sure.principal == 80.0);
    CHECK(sure.agent == 10.0);

    // Debt at r0 leaves the principal exactly r0 on random boxes.
    gen::Rng rng(34);
    for (int t = 0; t < 100; ++t) {
        const Project box = gen::known_project(rng);
        const double r0 = index(box).value;
        const auto rep = evaluate_resampling(Contract::pure_debt(r0), box);
        CHECK(rep.principal == doctest::Approx(r0).epsilon(1e-12));
    }
}
