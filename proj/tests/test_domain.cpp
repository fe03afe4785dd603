#include "fixtures.hpp"
#include "random_instances.hpp"

#include "pandora/domain.hpp"
#include "pandora/error.hpp"

#include <doctest.h>

using namespace pandora;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Validation;
}

} // namespace

TEST_CASE("make_distribution sorts, merges and validates") {
    const auto d = make_distribution({{100.0, 0.5}, {0.0, 0.5}});
    CHECK(d.support()[0] == 0.0);
    CHECK(d.support()[1] == 100.0);
    CHECK(d.probs()[0] == 0.5);
    CHECK(d.min_support() == 0.0);

    const auto m = make_distribution({{5.0, 0.5}, {5.0, 0.5}});
    REQUIRE(m.size() == 1);
    CHECK(m.probs()[0] == 1.0);

    const auto z = make_distribution({{1.0, 0.0}, {2.0, 1.0}});
    CHECK(z.size() == 1);

    CHECK(code_of([] { make_distribution({{1.0, 0.3}, {2.0, 0.3}}); }) == ErrorCode::ProbSumInvalid);
    CHECK(code_of([] { make_distribution({{-1.0, 1.0}}); }) == ErrorCode::NegativePrize);
    CHECK(code_of([] { make_distribution({{1.0, 0.0}}); }) == ErrorCode::EmptySupport);
    CHECK(code_of([] { make_distribution({{1.0, 1.2}, {2.0, -0.2}}); }) == ErrorCode::ProbSumInvalid);
    CHECK_NOTHROW(make_distribution({{1.0, 0.5}, {2.0, 0.5 + 5e-10}}));
}

TEST_CASE("expected_excess values") {
    const auto d = fixture::a0().dist;
    CHECK(expected_excess(d, 40.0) == doctest::Approx(30.0).epsilon(1e-15));
    CHECK(expected_excess(d, 0.0) == 50.0);
    CHECK(expected_excess(d, 100.0) == 0.0);
    CHECK(expected_excess(d, 250.0) == 0.0);
    CHECK(expected_excess(d, -7.0) == doctest::Approx(57.0));
}

TEST_CASE("expected_excess is convex, nonincreasing and 1-Lipschitz") {
    gen::Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        const auto d = gen::distribution(rng, gen::pick(rng, 1, 6));
        std::vector<double> zs;
        for (int i = 0; i <= 60; ++i) zs.push_back(-20.0 + 2.0 * i);
        for (std::size_t i = 0; i + 2 < zs.size(); ++i) {
            const double a = expected_excess(d, zs[i]);
            const double b = expected_excess(d, zs[i + 1]);
            const double c = expected_excess(d, zs[i + 2]);
            CHECK(b <= a + 1e-12);
            CHECK(a - b <= zs[i + 1] - zs[i] + 1e-12);
            CHECK(b <= 0.5 * (a + c) + 1e-9);
        }
        // slope -1 below the support
        const double lo = d.min_support();
        CHECK(expected_excess(d, lo - 3.0) - expected_excess(d, lo - 1.0) == doctest::Approx(2.0));
    }
}

TEST_CASE("utility evaluation and inverse") {
    const auto s = UtilityFn::scaled_sqrt(2.0);
    CHECK(s.apply(4.0) == 4.0);
    CHECK(s.invert(20.0) == doctest::Approx(100.0));
    CHECK(UtilityFn::identity().apply(7.3) == 7.3);
    CHECK(code_of([&] { s.invert(-1.0); }) == ErrorCode::OutOfRange);

    const auto p = UtilityFn::power(0.5);
    const auto t = UtilityFn::tabulated({0.0, 10.0, 50.0}, {0.0, 10.0, 30.0});
    for (const auto* u : {&s, &p, &t}) {
        for (int i = 0; i <= 1000; ++i) {
            const double x = 1000.0 * i;
            CHECK(u->invert(u->apply(x)) == doctest::Approx(x).epsilon(1e-12).scale(1.0));
        }
    }
    CHECK(t.apply(30.0) == doctest::Approx(20.0));
    CHECK(t.apply(90.0) == doctest::Approx(50.0));
}

TEST_CASE("utility validation rejects bad shapes") {
    CHECK(code_of([] { UtilityFn::power(1.5); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { UtilityFn::power(0.0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { UtilityFn::scaled_sqrt(-1.0); }) == ErrorCode::InvalidArgument);
    // convex table
    CHECK(code_of([] { UtilityFn::tabulated({0.0, 1.0, 2.0}, {0.0, 1.0, 3.0}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { UtilityFn::tabulated({0.0, 1.0}, {0.0, 0.0}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { UtilityFn::tabulated({1.0, 2.0}, {0.0, 1.0}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("discretizations") {
    const auto u = discretize_uniform(0.0, 100.0, 4);
    CHECK(u.size() == 4);
    CHECK(u.support()[0] == doctest::Approx(12.5));
    CHECK(u.mean() == doctest::Approx(50.0));
    const auto l = discretize_lognormal(0.0, 1.0, 5);
    CHECK(l.size() == 5);
    CHECK(l.support()[2] == doctest::Approx(1.0));
    CHECK(code_of([] { discretize_uniform(0.0, 1.0, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("project validation") {
    CHECK(code_of([] { Project(dirac(1.0), -1.0); }) == ErrorCode::InvalidArgument);
    CHECK(fixture::a0().surplus() == 40.0);
}
