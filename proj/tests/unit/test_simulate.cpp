#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "freeclt/fft.hpp"
#include "freeclt/rng.hpp"
#include "freeclt/simulate.hpp"

using namespace freeclt;
using namespace freeclt::simulate;
using covariance::CovarianceModel;
using orthopoly::Basis;
using orthopoly::FunctionalSeries;

TEST_CASE("fft against a naive DFT") {
    rng::Gaussian g(99);
    std::vector<std::complex<double>> a(16);
    for (auto& v : a) v = {g.normal(), g.normal()};
    auto spec = a;
    fft::transform(spec, false);
    for (std::size_t k = 0; k < a.size(); ++k) {
        std::complex<double> naive = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            double ang = -2.0 * std::numbers::pi * static_cast<double>(j * k) / 16.0;
            naive += a[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        CHECK(std::abs(spec[k] - naive) < 1e-10);
    }
    auto back = spec;
    fft::transform(back, true);
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(std::abs(back[j] - a[j]) < 1e-12);
}

TEST_CASE("gaussian path sampling") {
    SUBCASE("fixed seed is bit-identical") {
        auto m = CovarianceModel::geometric(0.5);
        auto a = sample_gaussian_path(m, 64, 2024);
        auto b = sample_gaussian_path(m, 64, 2024);
        CHECK(a == b);
        auto c = sample_gaussian_path(m, 64, 2025);
        CHECK(a != c);
    }
    SUBCASE("white noise has near-zero lag-1 covariance") {
        auto m = CovarianceModel::tabulated({1.0});
        double lag1 = 0.0, var = 0.0;
        const int reps = 2000, n = 64;
        for (int r = 0; r < reps; ++r) {
            auto p = sample_gaussian_path(m, n, 7000 + static_cast<std::uint64_t>(r));
            for (int i = 0; i + 1 < n; ++i) {
                lag1 += p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i + 1)];
                var += p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i)];
            }
        }
        const double count = static_cast<double>(reps) * (n - 1);
        CHECK(std::abs(lag1 / count) < 3.0 / std::sqrt(count));
        CHECK(var / count == doctest::Approx(1.0).epsilon(0.02));
    }
    SUBCASE("geometric decay reproduces the lag-1 covariance") {
        auto m = CovarianceModel::geometric(0.5);
        double lag1 = 0.0;
        const int reps = 400;
        const int n = 4096;
        for (int r = 0; r < reps; ++r) {
            auto p = sample_gaussian_path(m, n, 31000 + static_cast<std::uint64_t>(r));
            double acc = 0.0;
            for (int i = 0; i + 1 < n; ++i)
                acc += p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i + 1)];
            lag1 += acc / (n - 1);
        }
        lag1 /= reps;
        CHECK(lag1 == doctest::Approx(0.5).epsilon(0.02));
    }
    SUBCASE("non-PSD tabulated models are rejected") {
        auto bad = CovarianceModel::tabulated({1.0, 0.9, 0.9});
        CHECK_THROWS_AS(sample_gaussian_path(bad, 64, 1), hypothesis_error);
    }
}

TEST_CASE("moving-average factorization") {
    SUBCASE("geometric closed form") {
        auto m = CovarianceModel::geometric(0.5);
        auto ma = ma_coefficients(m, 32);
        const double scale = std::sqrt(1.0 - 0.25);
        for (int q = 0; q <= 32; ++q)
            CHECK(ma.a[static_cast<std::size_t>(q)] ==
                  doctest::Approx(scale * std::pow(0.5, q)).epsilon(1e-6).scale(1.0));
        CHECK(ma.residual < 1e-4);
    }
    SUBCASE("white noise is the delta sequence") {
        auto ma = ma_coefficients(CovarianceModel::tabulated({1.0}), 8);
        CHECK(ma.a[0] == doctest::Approx(1.0).epsilon(1e-12));
        for (int q = 1; q <= 8; ++q)
            CHECK(std::abs(ma.a[static_cast<std::size_t>(q)]) < 1e-12);
    }
    SUBCASE("residual shrinks to reported tolerance at max_lag = 256") {
        auto ma = ma_coefficients(CovarianceModel::geometric(0.5), 256);
        CHECK(ma.residual < 1e-4);
    }
    SUBCASE("negative spectral density rejected") {
        CHECK_THROWS_AS(ma_coefficients(CovarianceModel::tabulated({1.0, 0.9, 0.9}), 16),
                        hypothesis_error);
    }
}

TEST_CASE("monte carlo distribution") {
    auto m = CovarianceModel::tabulated({1.0});
    auto h1 = FunctionalSeries::pure(Basis::Hermite, 1);
    auto rep = mc_distribution(h1, m, 64, 2000, 5150, 2);
    CHECK(rep.sigma2_ref == doctest::Approx(1.0));
    CHECK(std::abs(rep.sample_mean) < 0.1);
    CHECK(rep.sample_var == doctest::Approx(1.0).epsilon(0.1));
    CHECK(rep.ks_distance < 0.05);
    CHECK(rep.ks_distance >= 0.0);

    SUBCASE("independent of the thread count") {
        auto one = mc_distribution(h1, m, 32, 500, 42, 1);
        auto four = mc_distribution(h1, m, 32, 500, 42, 4);
        CHECK(one.sample_mean == four.sample_mean);
        CHECK(one.sample_var == four.sample_var);
        CHECK(one.ks_distance == four.ks_distance);
    }
    SUBCASE("exact i.i.d. CLT case stays under the loose KS band") {
        auto big = mc_distribution(h1, m, 256, 10000, 321, 4);
        CHECK(big.ks_distance < 0.02);
    }
    SUBCASE("hypothesis gating") {
        auto h2 = FunctionalSeries::pure(Basis::Hermite, 2);
        CHECK_THROWS_AS(mc_distribution(h2, CovarianceModel::power(0.4), 32, 10, 1, 1),
                        hypothesis_error);
        // sigma^2 = 0: Hermite H1 with tabulated [1, -0.5]
        CHECK_THROWS_AS(mc_distribution(h1, CovarianceModel::tabulated({1.0, -0.5}), 32, 10, 1, 1),
                        hypothesis_error);
        CHECK_THROWS_AS(
            mc_distribution(FunctionalSeries::pure(Basis::Chebyshev, 2), m, 32, 10, 1, 1),
            std::invalid_argument);
    }
}

TEST_CASE("stieltjes transforms") {
    SUBCASE("closed form at z = i") {
        auto s = stieltjes_semicircle({0.0, 1.0}, 1.0);
        CHECK(s.real() == doctest::Approx(0.0).scale(1.0));
        CHECK(s.imag() == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-12));
    }
    SUBCASE("asymptotic normalization S(iy) ~ -1/(iy)") {
        for (double y : {50.0, 100.0, 200.0}) {
            auto s = stieltjes_semicircle({0.0, y}, 1.0);
            std::complex<double> ref = -1.0 / std::complex<double>(0.0, y);
            CHECK(std::abs(s - ref) < 2.0 / (y * y * y));
        }
    }
    SUBCASE("matches quadrature of the semicircle density at 1 + i") {
        // x = 2 cos(theta) substitution: the integrand becomes smooth and
        // periodic, so the midpoint rule converges spectrally
        std::complex<double> z{1.0, 1.0};
        std::complex<double> ref = 0.0;
        const int q = 20000;
        for (int j = 0; j < q; ++j) {
            double th = std::numbers::pi * (j + 0.5) / q;
            double x = 2.0 * std::cos(th);
            double dens = std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi);
            double dx = 2.0 * std::sin(th) * std::numbers::pi / q;
            ref += dens / (x - z) * dx;
        }
        CHECK(std::abs(stieltjes_semicircle(z, 1.0) - ref) < 1e-8);
    }
    SUBCASE("empirical transform basics") {
        CHECK(std::abs(stieltjes_empirical({0.0}, {0.0, 1.0}) -
                       std::complex<double>(0.0, 1.0)) < 1e-15);
        auto sym = stieltjes_empirical({-1.0, 1.0}, {0.0, 1.0});
        CHECK(std::abs(sym.real()) < 1e-15);
        rng::Gaussian g(3);
        std::vector<double> eigs;
        for (int i = 0; i < 100; ++i) eigs.push_back(g.normal());
        for (double y : {0.1, 0.5, 2.0})
            CHECK(stieltjes_empirical(eigs, {0.3, y}).imag() > 0.0);  // Herglotz
        CHECK_THROWS_AS(stieltjes_empirical({}, {0.0, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(stieltjes_empirical({1.0}, {0.0, -1.0}), std::invalid_argument);
    }
    SUBCASE("domain errors") {
        CHECK_THROWS_AS(stieltjes_semicircle({0.0, -1.0}, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(stieltjes_semicircle({0.0, 1.0}, 0.0), std::invalid_argument);
    }
}

TEST_CASE("random matrix single-ensemble semicircle") {
    // one ensemble matrix: spectrum must follow the standard semicircle
    auto white = CovarianceModel::tabulated({1.0});
    auto u1 = FunctionalSeries::pure(Basis::Chebyshev, 1);
    auto rep = rmt_clt_check(u1, white, 1, 1024, 31337);
    CHECK(rep.empirical_moments[1] == doctest::Approx(1.0).epsilon(0.05));
    CHECK(rep.empirical_moments[3] == doctest::Approx(2.0).epsilon(0.05));
    CHECK(std::abs(rep.empirical_moments[0]) < 0.05);
    CHECK(std::abs(rep.empirical_moments[2]) < 0.05);
    CHECK(rep.sigma2_ref == doctest::Approx(1.0));
    for (const auto& s : rep.stieltjes_samples) CHECK(s.empirical.imag() > 0.0);
}

TEST_CASE("circulant embedding reproduces the covariance at lags <= 8") {
    auto g = CovarianceModel::geometric(0.5);
    const int reps = 10000, n = 64;
    double sum[9] = {0}, sumsq[9] = {0};
    for (int r = 0; r < reps; ++r) {
        auto p = sample_gaussian_path(g, n, 555000 + static_cast<std::uint64_t>(r));
        for (int t = 0; t <= 8; ++t) {
            double acc = 0.0;
            for (int i = 0; i + t < n; ++i)
                acc += p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i + t)];
            acc /= (n - t);
            sum[t] += acc;
            sumsq[t] += acc * acc;
        }
    }
    for (int t = 0; t <= 8; ++t) {
        double mean = sum[t] / reps;
        double se = std::sqrt((sumsq[t] / reps - mean * mean) / reps);
        CHECK(std::abs(mean - g.r(t)) < 5.0 * se);
    }
}

TEST_CASE("sample variance error shrinks over two reps doublings") {
    auto g = CovarianceModel::geometric(0.5);
    auto h2 = FunctionalSeries::pure(Basis::Hermite, 2);
    const double sigma2 = 10.0 / 3.0;
    double prev = 1e300;
    for (std::int64_t reps : {2500, 5000, 10000}) {
        auto rep = mc_distribution(h2, g, 256, reps, 1, 4);
        double err = std::abs(rep.sample_var - sigma2);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("rmt m2 error shrinks over two dim doublings") {
    auto g = CovarianceModel::geometric(0.5);
    auto u2 = FunctionalSeries::pure(Basis::Chebyshev, 2);
    const std::int64_t n = 4;
    double exact = 0.0;
    {
        // finite-N variance of N^{-1/2} S_N, the dim -> infinity limit of m2
        double sym = covariance::functional_covariance(u2, g, 0);
        double weighted = 0.0;
        for (std::int64_t t = 1; t <= n; ++t) {
            double rh = covariance::functional_covariance(u2, g, t);
            sym += 2.0 * rh;
            weighted += static_cast<double>(t) * rh;
        }
        exact = (static_cast<double>(n) * sym - 2.0 * weighted) / static_cast<double>(n);
    }
    double prev = 1e300;
    for (int dim : {256, 512, 1024}) {
        auto rep = rmt_clt_check(u2, g, n, dim, 5);
        double err = std::abs(rep.empirical_moments[1] - exact);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("KS distance decreases as N doubles for a rank-1 series") {
    auto g = CovarianceModel::geometric(0.5);
    FunctionalSeries mix(Basis::Hermite, {0, 1, 0, 0.4});
    double prev = 1e300;
    for (std::int64_t n : {64, 128, 256}) {
        auto rep = mc_distribution(mix, g, n, 20000, 11, 4);
        CHECK(rep.ks_distance <= prev);
        prev = rep.ks_distance;
    }
}

TEST_CASE("rmt smoke with dependence") {
    auto m = CovarianceModel::geometric(0.5);
    auto u2 = FunctionalSeries::pure(Basis::Chebyshev, 2);
    auto rep = rmt_clt_check(u2, m, 8, 256, 99);
    CHECK(rep.ma_residual < 1e-4);
    CHECK(rep.empirical_moments[1] > 0.5);  // variance near sigma^2, loose band at dim 256
    CHECK(rep.empirical_moments[1] < 3.0);
    CHECK(rep.eigenvalues.size() == 256);
    CHECK(std::abs(rep.reference_moments[1] - rep.sigma2_ref) < 1e-12);
    auto hist = eigenvalue_histogram(rep.eigenvalues, 16);
    CHECK(hist.size() == 16);
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < hist.size(); ++i) mass += hist[i].density;
    CHECK(mass > 0.0);
}
