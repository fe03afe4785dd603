#include "fixtures.hpp"
#include "oracles.hpp"
#include "random_instances.hpp"

#include "pandora/indices.hpp"

#include <doctest.h>

#include <cmath>

using namespace pandora;

TEST_CASE("index values") {
    const auto r = index(fixture::a0());
    CHECK(r.value == 80.0);
    CHECK(r.unique);
    CHECK_FALSE(r.never_sample);

    const auto free = index(fixture::a0(0.0));
    CHECK(free.value == 100.0);
    CHECK_FALSE(free.unique);

    const auto costly = index(fixture::a0(60.0));
    CHECK(costly.value == -10.0);
    CHECK(costly.never_sample);

    CHECK(index(Project(dirac(50.0), 10.0)).value == 40.0);
}

TEST_CASE("induced index values") {
    const auto a0 = fixture::a0();
    CHECK(induced_index(Contract::pure_debt(80), a0).value == 0.0);
    CHECK(induced_index(Contract::linear(0.2), a0).value == 0.0);
    const auto ra = induced_index(Contract::pure_debt(80), a0, UtilityFn::scaled_sqrt(2.0));
    // For r < 0 the zero-wage atom also contributes 0.5 (0 - r), so the root is sqrt(20) - 10.
    const double expect = oracle::bisect_index({0.0, 2.0 * std::sqrt(20.0)}, {0.5, 0.5}, 10.0);
    CHECK(ra.value == doctest::Approx(expect).epsilon(1e-10));
    CHECK(ra.value == doctest::Approx(std::sqrt(20.0) - 10.0).epsilon(1e-14));
    CHECK(ra.never_sample);
}

TEST_CASE("scan agrees with bisection") {
    gen::Rng rng(21);
    for (int t = 0; t < 500; ++t) {
        const auto d = gen::distribution(rng, gen::pick(rng, 1, 8));
        const Project p(d, gen::uniform(rng, 0.01, 1.5) * d.mean() + 0.01);
        CHECK(index(p).value == doctest::Approx(oracle::bisect_index(p)).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("debt shift identity on random boxes") {
    gen::Rng rng(22);
    for (int t = 0; t < 200; ++t) {
        const Project box0 = gen::known_project(rng);
        const double r0 = index(box0).value;
        const Contract w0 = Contract::pure_debt(r0);
        const Project ai = gen::project_with_index(rng, r0 + gen::uniform(rng, 0.0, 50.0), 60.0);
        const double ri = index(ai).value;
        REQUIRE(ri >= r0);
        CHECK(std::abs(induced_index(w0, ai).value - (ri - r0)) <= 1e-12 * std::max(1.0, ri));
    }
}

TEST_CASE("index strictly decreases in cost while positive") {
    gen::Rng rng(23);
    for (int t = 0; t < 200; ++t) {
        const auto d = gen::distribution(rng, gen::pick(rng, 2, 5));
        const double c1 = gen::uniform(rng, 0.01, 0.5) * d.mean();
        const double c2 = c1 * gen::uniform(rng, 1.01, 1.5);
        const double r1 = index(Project(d, c1)).value;
        const double r2 = index(Project(d, c2)).value;
        if (r1 > 0.0) CHECK(r2 < r1);
    }
}

TEST_CASE("full extraction gives a zero induced index") {
    gen::Rng rng(24);
    for (int t = 0; t < 100; ++t) {
        const Project box0 = gen::known_project(rng);
        const Contract w = gen::mdl_fse(rng, box0);
        CHECK(std::abs(induced_index(w, box0).value) <= 1e-9);
    }
}
