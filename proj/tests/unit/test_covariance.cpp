#include <doctest.h>

#include <cmath>

#include "freeclt/covariance.hpp"

using namespace freeclt::covariance;
using freeclt::orthopoly::Basis;
using freeclt::orthopoly::FunctionalSeries;
using freeclt::hypothesis_error;

TEST_CASE("model invariants") {
    auto g = CovarianceModel::geometric(0.5);
    CHECK(g.r(0) == 1.0);
    CHECK(g.r(3) == g.r(-3));
    CHECK(g.r(4) == doctest::Approx(0.0625));

    auto p = CovarianceModel::power(1.5);
    CHECK(p.r(0) == 1.0);
    CHECK(p.r(1) == doctest::Approx(std::pow(2.0, -1.5)));

    auto t = CovarianceModel::tabulated({1.0, -0.5});
    CHECK(t.r(1) == -0.5);
    CHECK(t.r(2) == 0.0);
    CHECK(t.support() == 1);

    CHECK_THROWS_AS(CovarianceModel::geometric(1.0), std::invalid_argument);
    CHECK_THROWS_AS(CovarianceModel::power(0.0), std::invalid_argument);
    CHECK_THROWS_AS(CovarianceModel::tabulated({0.9}), std::invalid_argument);
    CHECK_THROWS_AS(CovarianceModel::tabulated({1.0, 1.5}), std::invalid_argument);
}

TEST_CASE("functional covariance") {
    auto g = CovarianceModel::geometric(0.5);
    auto u2 = FunctionalSeries::pure(Basis::Chebyshev, 2);
    auto h2 = FunctionalSeries::pure(Basis::Hermite, 2);
    CHECK(functional_covariance(u2, g, 1) == doctest::Approx(0.25));
    CHECK(functional_covariance(h2, g, 1) == doctest::Approx(0.5));

    auto white = CovarianceModel::tabulated({1.0});
    CHECK(functional_covariance(u2, white, 1) == 0.0);
    CHECK(functional_covariance(u2, white, 5) == 0.0);

    SUBCASE("value at zero is the coefficient mass") {
        FunctionalSeries mix(Basis::Hermite, {0, 0.5, 0.25, 0.125});
        double c0 = functional_covariance(mix, g, 0);
        CHECK(c0 == doctest::Approx(0.25 * 1 + 0.0625 * 2 + 0.015625 * 6));
    }
    SUBCASE("even in t and bounded by the lag-zero value") {
        FunctionalSeries mix(Basis::Chebyshev, {0, 0.3, 0, 0.7});
        auto tab = CovarianceModel::tabulated({1.0, -0.8, 0.3});
        double at0 = functional_covariance(mix, tab, 0);
        for (int t = -6; t <= 6; ++t) {
            CHECK(functional_covariance(mix, tab, t) ==
                  doctest::Approx(functional_covariance(mix, tab, -t)));
            CHECK(std::abs(functional_covariance(mix, tab, t)) <= at0 + 1e-15);
        }
    }
}

TEST_CASE("sigma squared") {
    auto g = CovarianceModel::geometric(0.5);
    auto u2 = FunctionalSeries::pure(Basis::Chebyshev, 2);
    auto h2 = FunctionalSeries::pure(Basis::Hermite, 2);

    SUBCASE("closed forms") {
        CHECK(sigma_squared(u2, g, World::Free).value == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
        CHECK(sigma_squared(h2, g, World::Classical).value ==
              doctest::Approx(10.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("geometric closed form equals brute truncation at T = 200") {
        FunctionalSeries mix(Basis::Chebyshev, {0, 0.5, 0.3, 0.1});
        double closed = sigma_squared(mix, g, World::Free).value;
        double brute = functional_covariance(mix, g, 0);
        for (int t = 1; t <= 200; ++t) brute += 2.0 * functional_covariance(mix, g, t);
        CHECK(closed == doctest::Approx(brute).epsilon(1e-10));
    }
    SUBCASE("degenerate tabulated input is flagged, not an error") {
        auto u1 = FunctionalSeries::pure(Basis::Chebyshev, 1);
        auto m = CovarianceModel::tabulated({1.0, -0.5});
        auto sig = sigma_squared(u1, m, World::Free);
        CHECK(sig.value == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
        CHECK(sig.zero_flagged);
    }
    SUBCASE("power decay truncation reports a small tail bound") {
        auto m = CovarianceModel::power(1.2);
        auto u2b = FunctionalSeries::pure(Basis::Chebyshev, 2);
        auto sig = sigma_squared(u2b, m, World::Free, 1e-8);
        CHECK(sig.tail_bound <= 1e-8);
        double brute = functional_covariance(u2b, m, 0);
        for (int t = 1; t <= 2000000; ++t) brute += 2.0 * functional_covariance(u2b, m, t);
        CHECK(sig.value == doctest::Approx(brute).epsilon(1e-6));
    }
    SUBCASE("non-summable input diverges with a hypothesis error") {
        auto u1 = FunctionalSeries::pure(Basis::Chebyshev, 1);
        auto m = CovarianceModel::power(0.6);
        CHECK_THROWS_AS(sigma_squared(u1, m, World::Free), hypothesis_error);
    }
    SUBCASE("basis must match the world") {
        CHECK_THROWS_AS(sigma_squared(u2, g, World::Classical), std::invalid_argument);
    }
}

TEST_CASE("summability check") {
    auto u1 = FunctionalSeries::pure(Basis::Chebyshev, 1);
    auto u2 = FunctionalSeries::pure(Basis::Chebyshev, 2);
    CHECK_FALSE(summability_check(u1, CovarianceModel::power(0.6)).summable);
    CHECK(summability_check(u2, CovarianceModel::power(0.6)).summable);
    CHECK(summability_check(u1, CovarianceModel::geometric(0.9)).summable);
    CHECK(summability_check(u2, CovarianceModel::geometric(0.9)).summable);
    CHECK(summability_check(u1, CovarianceModel::tabulated({1.0, 0.5})).summable);
}

TEST_CASE("psd check") {
    auto g = CovarianceModel::geometric(0.5);
    auto rep = psd_check(g, 64, 256);
    CHECK(rep.min_spectral_value > 0.0);
    CHECK_FALSE(rep.flagged);

    auto bad = CovarianceModel::tabulated({1.0, 0.9, 0.9});
    auto rep2 = psd_check(bad, 8, 256);
    CHECK(rep2.min_spectral_value < 0.0);
    CHECK(rep2.flagged);

    auto white = CovarianceModel::tabulated({1.0});
    auto rep3 = psd_check(white, 4, 64);
    CHECK(rep3.min_spectral_value == doctest::Approx(1.0));

    CHECK_THROWS_AS(psd_check(bad, 1, 64), std::invalid_argument);
}
