#include "freeclt/simulate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "freeclt/common.hpp"
#include "freeclt/fft.hpp"
#include "freeclt/rng.hpp"

namespace freeclt::simulate {

using orthopoly::Basis;
using orthopoly::FunctionalSeries;

namespace {

// Horizon past which the covariance is numerically zero; drives the size of
// spectral grids and embeddings.
std::int64_t decay_horizon(const CovarianceModel& m, double tol, std::int64_t cap) {
    if (m.support() >= 0) return m.support();
    std::int64_t t = 1;
    while (t < cap && m.abs_tail_max(t) > tol) ++t;
    return t;
}

struct Embedding {
    std::size_t size = 0;
    std::vector<double> weights;  // sqrt(lambda_k / M), zero-clamped
    bool usable = false;
};

Embedding circulant_embedding(const CovarianceModel& m, std::int64_t n) {
    Embedding emb;
    emb.size = fft::next_pow2(static_cast<std::size_t>(2 * n));
    std::vector<std::complex<double>> c(emb.size);
    const std::size_t half = emb.size / 2;
    for (std::size_t j = 0; j < emb.size; ++j) {
        std::size_t d = j <= half ? j : emb.size - j;
        c[j] = m.r(static_cast<std::int64_t>(d));
    }
    fft::transform(c, false);
    double mx = 0.0, mn = 0.0;
    for (const auto& v : c) {
        mx = std::max(mx, v.real());
        mn = std::min(mn, v.real());
    }
    if (mn < -1e-8 * std::max(1.0, mx)) {
        emb.usable = false;
        return emb;
    }
    emb.weights.resize(emb.size);
    for (std::size_t k = 0; k < emb.size; ++k)
        emb.weights[k] = std::sqrt(std::max(0.0, c[k].real()) / static_cast<double>(emb.size));
    emb.usable = true;
    return emb;
}

std::vector<double> path_from_embedding(const Embedding& emb, std::int64_t n,
                                        std::uint64_t stream) {
    rng::Gaussian g(stream);
    std::vector<std::complex<double>> xi(emb.size);
    for (std::size_t k = 0; k < emb.size; ++k) {
        double a = g.normal();
        double b = g.normal();
        xi[k] = emb.weights[k] * std::complex<double>(a, b);
    }
    fft::transform(xi, false);
    std::vector<double> path(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) path[static_cast<std::size_t>(i)] = xi[static_cast<std::size_t>(i)].real();
    return path;
}

std::vector<double> path_from_cholesky(const CovarianceModel& m, std::int64_t n,
                                       std::uint64_t stream) {
    Eigen::MatrixXd cov(n, n);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j) cov(i, j) = m.r(i - j);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw hypothesis_error("sample_gaussian_path: covariance model is not positive "
                               "semidefinite (Cholesky failed)");
    rng::Gaussian g(stream);
    Eigen::VectorXd z(n);
    for (std::int64_t i = 0; i < n; ++i) z(i) = g.normal();
    Eigen::VectorXd x = llt.matrixL() * z;
    return std::vector<double>(x.data(), x.data() + n);
}

std::vector<double> sample_path_stream(const CovarianceModel& m, std::int64_t n,
                                       std::uint64_t stream, const Embedding& emb) {
    if (emb.usable) return path_from_embedding(emb, n, stream);
    return path_from_cholesky(m, n, stream);
}

double normal_cdf(double x, double sigma) {
    // std::erf is correctly rounded, far inside the 1e-7 CDF accuracy the
    // KS comparison needs.
    return 0.5 * std::erfc(-x / (sigma * std::numbers::sqrt2));
}

}  // namespace

std::vector<double> sample_gaussian_path(const CovarianceModel& m, std::int64_t n,
                                         std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_gaussian_path: N must be >= 1");
    Embedding emb = circulant_embedding(m, n);
    return sample_path_stream(m, n, rng::derive_stream(seed, 0), emb);
}

McReport mc_distribution(const FunctionalSeries& s, const CovarianceModel& m, std::int64_t n,
                         std::int64_t reps, std::uint64_t seed, unsigned threads) {
    if (s.basis != Basis::Hermite)
        throw std::invalid_argument("mc_distribution: series must be in the Hermite basis");
    if (n < 1 || reps < 1) throw std::invalid_argument("mc_distribution: need N >= 1, reps >= 1");
    auto summ = covariance::summability_check(s, m);
    if (!summ.summable)
        throw hypothesis_error("mc_distribution: covariance not summable at rank (" +
                               summ.witness + ")");
    auto sig = covariance::sigma_squared(s, m, covariance::World::Classical);
    if (sig.zero_flagged)
        throw hypothesis_error("mc_distribution: sigma^2 = " + std::to_string(sig.value) +
                               " violates the sigma^2 != 0 hypothesis");

    Embedding emb = circulant_embedding(m, n);
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> values(static_cast<std::size_t>(reps));

    const std::int64_t chunk = 256;
    const std::size_t n_chunks = static_cast<std::size_t>((reps + chunk - 1) / chunk);
    parallel_chunks(n_chunks, threads, [&](std::size_t ci) {
        const std::int64_t lo = static_cast<std::int64_t>(ci) * chunk;
        const std::int64_t hi = std::min<std::int64_t>(reps, lo + chunk);
        for (std::int64_t rep = lo; rep < hi; ++rep) {
            auto path = sample_path_stream(m, n, rng::derive_stream(seed, static_cast<std::uint64_t>(rep)), emb);
            double acc = 0.0;
            for (double x : path) acc += s.eval(x);
            values[static_cast<std::size_t>(rep)] = acc * inv_sqrt_n;
        }
    });

    McReport rep;
    rep.reps = reps;
    rep.n = n;
    rep.seed = seed;
    rep.sigma2_ref = sig.value;

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(reps);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(reps);
    m3 /= static_cast<double>(reps);
    m4 /= static_cast<double>(reps);
    rep.sample_mean = mean;
    rep.sample_var = m2 * static_cast<double>(reps) / static_cast<double>(std::max<std::int64_t>(1, reps - 1));
    rep.sample_skew = m3 / std::pow(m2, 1.5);
    rep.sample_kurtosis = m4 / (m2 * m2) - 3.0;

    std::sort(values.begin(), values.end());
    const double sigma = std::sqrt(std::abs(sig.value));
    double ks = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        double f = normal_cdf(values[i], sigma);
        double lo_ecdf = static_cast<double>(i) / static_cast<double>(reps);
        double hi_ecdf = static_cast<double>(i + 1) / static_cast<double>(reps);
        ks = std::max({ks, std::abs(f - lo_ecdf), std::abs(f - hi_ecdf)});
    }
    rep.ks_distance = ks;
    return rep;
}

MaCoefficients ma_coefficients(const CovarianceModel& m, int max_lag) {
    if (max_lag < 0) throw std::invalid_argument("ma_coefficients: max_lag must be >= 0");
    const std::int64_t horizon = decay_horizon(m, 1e-18, 1 << 16);
    const std::size_t grid =
        fft::next_pow2(std::max<std::size_t>(8 * (static_cast<std::size_t>(max_lag) + 1),
                                             std::max<std::size_t>(1024, static_cast<std::size_t>(2 * horizon))));

    // spectral density on the grid: FFT of the (periodized) covariance
    std::vector<std::complex<double>> f(grid);
    const std::size_t half = grid / 2;
    for (std::size_t j = 0; j < grid; ++j) {
        std::size_t d = j <= half ? j : grid - j;
        f[j] = m.r(static_cast<std::int64_t>(d));
    }
    fft::transform(f, false);
    double fmax = 0.0, fmin = std::numeric_limits<double>::infinity();
    for (auto& v : f) {
        v = v.real();
        fmax = std::max(fmax, v.real());
        fmin = std::min(fmin, v.real());
    }
    if (fmin < -1e-8 * std::max(1.0, fmax))
        throw hypothesis_error("ma_coefficients: spectral density negative (min " +
                               std::to_string(fmin) + "); model invalid");

    // cepstrum of log f; clamp away zeros of the density before the log
    const double floor_val = std::max(fmax, 1.0) * 1e-15;
    std::vector<std::complex<double>> cep(grid);
    for (std::size_t j = 0; j < grid; ++j)
        cep[j] = std::log(std::max(f[j].real(), floor_val));
    fft::transform(cep, false);
    for (auto& v : cep) v /= static_cast<double>(grid);

    // minimum-phase transfer: exp(cep_0/2 + sum_{t>=1} cep_t e^{2 pi i t x})
    std::vector<std::complex<double>> causal(grid, 0.0);
    causal[0] = cep[0] * 0.5;
    for (std::size_t t = 1; t < grid / 2; ++t) causal[t] = cep[t];
    fft::transform(causal, true);  // now holds (1/grid) sum ... e^{+2 pi i}
    std::vector<std::complex<double>> transfer(grid);
    for (std::size_t j = 0; j < grid; ++j)
        transfer[j] = std::exp(causal[j] * static_cast<double>(grid));

    // Fourier coefficients of the transfer function
    fft::transform(transfer, false);
    MaCoefficients out;
    out.a.resize(static_cast<std::size_t>(max_lag) + 1);
    for (int q = 0; q <= max_lag; ++q)
        out.a[static_cast<std::size_t>(q)] = transfer[static_cast<std::size_t>(q)].real() / static_cast<double>(grid);

    for (int t = 0; t <= max_lag / 2; ++t) {
        double conv = 0.0;
        for (int q = 0; q + t <= max_lag; ++q)
            conv += out.a[static_cast<std::size_t>(q)] * out.a[static_cast<std::size_t>(q + t)];
        out.residual += std::abs(conv - m.r(t)) * (t == 0 ? 1.0 : 2.0);
    }
    return out;
}

std::complex<double> stieltjes_semicircle(std::complex<double> z, double sigma) {
    if (!(z.imag() > 0.0))
        throw std::invalid_argument("stieltjes_semicircle: need Im z > 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("stieltjes_semicircle: need sigma > 0");
    const double s2 = sigma * sigma;
    std::complex<double> w = std::sqrt(z * z - 4.0 * s2);
    // branch with S(z) ~ -1/z at infinity, equivalently Im S > 0 on C+
    if (std::imag(-z + w) <= 0.0) w = -w;
    return (-z + w) / (2.0 * s2);
}

std::complex<double> stieltjes_empirical(const std::vector<double>& eigenvalues,
                                         std::complex<double> z) {
    if (eigenvalues.empty())
        throw std::invalid_argument("stieltjes_empirical: empty eigenvalue list");
    if (!(z.imag() > 0.0)) throw std::invalid_argument("stieltjes_empirical: need Im z > 0");
    std::complex<double> acc = 0.0;
    for (double lam : eigenvalues) acc += 1.0 / (lam - z);
    return acc / static_cast<double>(eigenvalues.size());
}

namespace {

using CMatrix = Eigen::MatrixXcd;

CMatrix sample_gue(int dim, std::uint64_t stream) {
    rng::Gaussian g(stream);
    CMatrix mat(dim, dim);
    const double diag_sd = 1.0 / std::sqrt(static_cast<double>(dim));
    const double off_sd = 1.0 / std::sqrt(2.0 * static_cast<double>(dim));
    for (int i = 0; i < dim; ++i) {
        mat(i, i) = g.normal() * diag_sd;
        for (int j = i + 1; j < dim; ++j) {
            std::complex<double> v(g.normal() * off_sd, g.normal() * off_sd);
            mat(i, j) = v;
            mat(j, i) = std::conj(v);
        }
    }
    return mat;
}

}  // namespace

SpectralReport rmt_clt_check(const FunctionalSeries& s, const CovarianceModel& m, std::int64_t n,
                             int dim, std::uint64_t seed) {
    if (s.basis != Basis::Chebyshev)
        throw std::invalid_argument("rmt_clt_check: series must be in the Chebyshev basis");
    if (n < 1) throw std::invalid_argument("rmt_clt_check: N must be >= 1");
    if (dim < 256) throw std::invalid_argument("rmt_clt_check: dim must be >= 256");

    // MA horizon: grow until the covariance residual is inside tolerance.
    MaCoefficients ma;
    int lag = 16;
    for (;;) {
        ma = ma_coefficients(m, lag);
        if (ma.residual < 1e-4 || lag >= 256) break;
        lag *= 2;
    }
    if (ma.residual >= 1e-4)
        throw numeric_error("rmt_clt_check: MA factorization residual " +
                            std::to_string(ma.residual) + " did not reach 1e-4");
    const int window = static_cast<int>(ma.a.size());
    const double mem_gb = static_cast<double>(window + 6) * static_cast<double>(dim) *
                          static_cast<double>(dim) * 16.0 / 1e9;
    if (mem_gb > 6.0)
        throw cap_error("rmt_clt_check: sliding window needs ~" + std::to_string(mem_gb) +
                        " GB; reduce dim or use a shorter-memory model");

    auto sig = covariance::sigma_squared(s, m, covariance::World::Free);

    // ring buffer of ensemble matrices G_i..G_{i+window-1}
    std::vector<CMatrix> ring(static_cast<std::size_t>(window));
    for (int j = 0; j < window; ++j)
        ring[static_cast<std::size_t>(j)] = sample_gue(dim, rng::derive_stream(seed, static_cast<std::uint64_t>(j)));

    CMatrix acc = CMatrix::Zero(dim, dim);
    CMatrix xi(dim, dim), ucur(dim, dim), uprev(dim, dim), unext(dim, dim);
    for (std::int64_t i = 0; i < n; ++i) {
        xi.setZero();
        for (int q = 0; q < window; ++q)
            xi += ma.a[static_cast<std::size_t>(q)] * ring[static_cast<std::size_t>((i + q) % window)];
        // Chebyshev recursion on matrices: U_0 = I, U_1 = X
        uprev = CMatrix::Identity(dim, dim);
        ucur = xi;
        if (s.max_degree() >= 1 && s.coeffs[1] != 0.0) acc += s.coeffs[1] * ucur;
        for (int k = 2; k <= s.max_degree(); ++k) {
            unext = xi * ucur - uprev;
            uprev.swap(ucur);
            ucur.swap(unext);
            if (s.coeffs[static_cast<std::size_t>(k)] != 0.0)
                acc += s.coeffs[static_cast<std::size_t>(k)] * ucur;
        }
        // advance the window: G_{i} leaves, G_{i+window} enters
        if (i + 1 < n) {
            ring[static_cast<std::size_t>(i % window)] =
                sample_gue(dim, rng::derive_stream(seed, static_cast<std::uint64_t>(i + window)));
        }
    }
    acc /= std::sqrt(static_cast<double>(n));

    Eigen::SelfAdjointEigenSolver<CMatrix> es(acc, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw numeric_error("rmt_clt_check: eigensolver failed");

    SpectralReport rep;
    rep.dim = dim;
    rep.n = n;
    rep.seed = seed;
    rep.sigma2_ref = sig.value;
    rep.ma_residual = ma.residual;
    rep.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + dim);

    rep.empirical_moments.assign(6, 0.0);
    for (double lam : rep.eigenvalues) {
        double p = 1.0;
        for (int q = 0; q < 6; ++q) {
            p *= lam;
            rep.empirical_moments[static_cast<std::size_t>(q)] += p;
        }
    }
    for (auto& v : rep.empirical_moments) v /= static_cast<double>(dim);

    // sigma-scaled semicircle moments: Catalan numbers on even orders
    const double sigma = std::sqrt(std::abs(sig.value));
    const double catalan[4] = {1.0, 1.0, 2.0, 5.0};
    rep.reference_moments.assign(6, 0.0);
    for (int p = 2; p <= 6; p += 2)
        rep.reference_moments[static_cast<std::size_t>(p - 1)] =
            catalan[p / 2] * std::pow(sigma, p);

    const std::complex<double> zs[] = {{0.0, 1.0}, {1.0, 1.0}, {-1.0, 1.0}, {0.0, 2.0}, {2.0, 1.0}};
    for (auto z : zs)
        rep.stieltjes_samples.push_back(
            {z, stieltjes_empirical(rep.eigenvalues, z), stieltjes_semicircle(z, sigma)});
    return rep;
}

std::vector<HistogramBin> eigenvalue_histogram(const std::vector<double>& eigenvalues, int bins) {
    if (eigenvalues.empty() || bins < 1) return {};
    auto [mn_it, mx_it] = std::minmax_element(eigenvalues.begin(), eigenvalues.end());
    double mn = *mn_it, mx = *mx_it;
    if (mx <= mn) mx = mn + 1.0;
    const double width = (mx - mn) / bins;
    std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
    for (int b = 0; b < bins; ++b)
        out[static_cast<std::size_t>(b)].center = mn + (b + 0.5) * width;
    for (double lam : eigenvalues) {
        int b = std::min(bins - 1, static_cast<int>((lam - mn) / width));
        out[static_cast<std::size_t>(b)].density += 1.0;
    }
    for (auto& bin : out)
        bin.density /= static_cast<double>(eigenvalues.size()) * width;
    return out;
}

}  // namespace freeclt::simulate
