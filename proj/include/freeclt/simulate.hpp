#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "freeclt/covariance.hpp"
#include "freeclt/orthopoly.hpp"

namespace freeclt::simulate {

using covariance::CovarianceModel;

// One exact draw of (X_1..X_N) with E[X_i X_{i+t}] = r(t): circulant
// embedding with nonnegative spectral weights, dense Cholesky of the
// Toeplitz matrix as fallback. Identical seeds give bit-identical paths.
std::vector<double> sample_gaussian_path(const CovarianceModel& m, std::int64_t n,
                                         std::uint64_t seed);

struct McReport {
    std::int64_t reps = 0;
    std::int64_t n = 0;
    double sample_mean = 0.0;
    double sample_var = 0.0;
    double sample_skew = 0.0;
    double sample_kurtosis = 0.0;  // excess
    double ks_distance = 0.0;      // vs N(0, sigma2_ref)
    double sigma2_ref = 0.0;
    std::uint64_t seed = 0;
};

// Monte Carlo for the classical CLT: reps independent draws of
// N^{-1/2} sum_i H(X_i), moments, and the Kolmogorov-Smirnov distance
// against N(0, sigma^2). Refuses sigma^2 = 0 and non-summable inputs.
McReport mc_distribution(const orthopoly::FunctionalSeries& s, const CovarianceModel& m,
                         std::int64_t n, std::int64_t reps, std::uint64_t seed,
                         unsigned threads = 1);

struct MaCoefficients {
    std::vector<double> a;  // a_0..a_max_lag
    double residual = 0.0;  // sum_{|t|<=max_lag/2} |sum_m a_m a_{m+t} - rho(t)|
};

// Minimum-phase moving-average factorization sum_m a_m a_{m+t} ~ rho(t) via
// cepstral spectral factorization; for geometric decay it reproduces
// a_m = sqrt(1-a^2) a^m.
MaCoefficients ma_coefficients(const CovarianceModel& m, int max_lag);

std::complex<double> stieltjes_semicircle(std::complex<double> z, double sigma);
std::complex<double> stieltjes_empirical(const std::vector<double>& eigenvalues,
                                         std::complex<double> z);

struct StieltjesSample {
    std::complex<double> z;
    std::complex<double> empirical;
    std::complex<double> reference;
};

struct SpectralReport {
    int dim = 0;
    std::int64_t n = 0;
    std::vector<double> empirical_moments;  // m_1..m_6
    std::vector<double> reference_moments;  // sigma-scaled semicircle
    std::vector<StieltjesSample> stieltjes_samples;
    double sigma2_ref = 0.0;
    double ma_residual = 0.0;
    std::vector<double> eigenvalues;  // spectrum of N^{-1/2} sum U(X_i)
    std::uint64_t seed = 0;
};

// Free CLT check by random-matrix approximation: X_i = sum_m a_m G_{i+m}
// over i.i.d. Hermitian Gaussian-ensemble matrices G_j (entry variance 1/d),
// spectrum of N^{-1/2} sum_i U(X_i) against the sigma-scaled semicircle.
SpectralReport rmt_clt_check(const orthopoly::FunctionalSeries& s, const CovarianceModel& m,
                             std::int64_t n, int dim, std::uint64_t seed);

struct HistogramBin {
    double center = 0.0;
    double density = 0.0;
};
std::vector<HistogramBin> eigenvalue_histogram(const std::vector<double>& eigenvalues, int bins);

}  // namespace freeclt::simulate
