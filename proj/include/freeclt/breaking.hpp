#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "freeclt/common.hpp"
#include "freeclt/partitions.hpp"

namespace freeclt::breaking {

// Bipartite graph of row vertices and partition-subset vertices; each table
// element is an edge with cost z_k = 1 - 1/p_k, k the cardinality of its
// subset. p = infinity encodes z = 1 exactly.
struct BreakingGraph {
    int rows = 0;
    int subsets = 0;
    struct Edge {
        int row = 0;
        int subset = 0;
        double cost = 0.0;
    };
    std::vector<Edge> edges;
};

BreakingGraph build_breaking_graph(const partitions::RowTable& t, const partitions::Partition& p,
                                   const std::map<int, double>& p_values);

inline constexpr int kAlphaEdgeCap = 24;

struct AlphaResult {
    double value = 0.0;
    std::vector<int> witness;  // indices of removed edges, one maximizer
};

// Optimal breaking alpha_G = max_{A subset E} [C(G \ A) - sum_{e in A} z_e],
// by exhaustive search over edge subsets (every vertex, isolated or not,
// counts as a component). Ties keep the smallest removal set.
AlphaResult alpha_g(const BreakingGraph& g, unsigned threads = 1);

struct Theorem53Row {
    int k = 0;
    int branch = 0;  // 1, 2 or 3 in the order of the case split
    double required_z = 0.0;
    double z = 0.0;
    bool ok = false;
};

struct Theorem53Report {
    int m = 0;
    std::vector<Theorem53Row> rows;
    bool all_ok = true;
};

// Cost threshold of the normal-convergence criterion per block size k:
//   z_k >= k/(2m(k-m))  when m+1 <= k < 2m,
//   z_k >= k/(2m)       when k(k-1) > 2m and k <= m+1,
//   z_k >= 1/k + 1/(2m) otherwise.
Theorem53Report theorem53_check(int m, const std::map<int, double>& p_values);
double theorem53_required_z(int m, int k, int* branch = nullptr);

// X_j = sum_r c_{j-r} xi_r with base cumulants d_k of the innovations.
struct LinearProcessSpec {
    std::vector<double> c_coeffs;   // c_0..c_L
    std::map<int, double> d;       // d_k per order
};

// f^(k)(x_1..x_{k-1}) = d_k c(x_1)...c(x_{k-1}) c(-x_1-...-x_{k-1}) with
// c(x) the finite Fourier transform of the coefficient vector.
std::complex<double> spectral_cumulant_linear(const LinearProcessSpec& spec, int k,
                                              const std::vector<double>& x);

struct SpectralVerification {
    double lhs = 0.0;      // direct convolution d_k sum_i prod c_{j_l - i}
    double rhs = 0.0;      // quadrature of the spectral integral
    double abs_err = 0.0;
    bool grid_warning = false;  // err > 1e-3: grid too coarse (reported, not fatal)
};

SpectralVerification verify_spectral_representation(const LinearProcessSpec& spec, int k,
                                                    const std::vector<std::int64_t>& j,
                                                    int quad_grid);

// Least-squares slope of log|y| against log x; the empirical scaling check
// behind the breaking exponent.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace freeclt::breaking
