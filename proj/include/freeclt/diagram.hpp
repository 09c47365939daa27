#pragma once

#include <cstdint>
#include <vector>

#include "freeclt/covariance.hpp"
#include "freeclt/orthopoly.hpp"
#include "freeclt/partitions.hpp"

namespace freeclt::diagram {

using covariance::CovarianceModel;
using covariance::World;

// One joint cumulant <P_{n_1}(X_{t_1}), ..., P_{n_k}(X_{t_k})> where P is
// Hermite (classical) or Chebyshev (free).
struct CumulantRequest {
    std::vector<int> degrees;
    std::vector<std::int64_t> times;
    World world = World::Classical;
    const CovarianceModel* model = nullptr;
};

// Evaluation limits shared by the heavy sums. max_evals counts innermost
// term evaluations; prune_tol is the absolute subtree cutoff of the
// translation-reduced J_N sum (0 disables pruning).
struct EvalOptions {
    double max_evals = 1e9;
    double prune_tol = 1e-16;
    unsigned threads = 1;
    int partition_cap = partitions::kDefaultEnumerationCap;
};

enum class SumStrategy { Auto, Direct, Reduced };

// Diagram sets grouped by edge matrix: the cumulant term of a diagram
// depends on its cross-row edge counts only.
struct DiagramGroup {
    partitions::EdgeMatrix edges;
    std::int64_t multiplicity = 0;
};

// Cached enumeration of the diagram class for a row table. connected_only
// is meaningful for the free world (Gamma'' vs Gamma').
const std::vector<DiagramGroup>& diagram_groups(const std::vector<int>& row_sizes, World world,
                                                bool connected_only, int cap);

// Sum over the world's diagram set of prod_blocks r(t_i - t_j). Odd total
// degree gives 0 (empty diagram set).
double joint_cumulant(const CumulantRequest& req, const EvalOptions& opts = {});

// Free moment formula: same sum over Gamma' (connectivity not required).
double joint_moment_free(const std::vector<int>& degrees, const std::vector<std::int64_t>& times,
                         const CovarianceModel& model, const EvalOptions& opts = {});

// J_N(gamma) = sum_{t_1..t_k = 1..N} prod_{i<j} r^{l_ij}(t_i - t_j).
double j_n(const partitions::EdgeMatrix& l, std::int64_t n, const CovarianceModel& model,
           SumStrategy strategy = SumStrategy::Auto, const EvalOptions& opts = {});

// Raw R-th cumulant of S_N = sum_{t<=N} H(X_t) (or U(X_t)), via
// multilinearity over degree tuples and J_N per diagram group. The caller
// normalizes by N^{R/2}.
double kappa_r_sn(const orthopoly::FunctionalSeries& s, const CovarianceModel& model,
                  std::int64_t n, int r, World world, const EvalOptions& opts = {});

// Closed-form variance identity
//   kappa_2(S_N) = N sum_{|t|<=N} r_H(t) - 2 sum_{t=1..N} t r_H(t).
double kappa2_sn_closed(const orthopoly::FunctionalSeries& s, const CovarianceModel& model,
                        std::int64_t n, World world);

inline constexpr int kOracleDegreeCap = 12;

// Independent verification path: expands polynomials to monomials, computes
// joint moments by Wick pairings (all pairings classically, non-crossing
// ones freely) and converts moments to cumulants by Moebius inversion over
// the full / non-crossing partition lattice.
double oracle_cumulant(const CumulantRequest& req);

// kappa_R(N^{-1/2} S_N) table over a list of N values, R = 2..r_max.
struct CumulantScan {
    std::vector<std::int64_t> n_values;
    int r_max = 2;
    World world = World::Classical;
    double sigma2_ref = 0.0;
    // row-major: value[ni][r-2] = kappa_r(S_N) / N^{r/2}
    std::vector<std::vector<double>> normalized;
    std::vector<std::vector<double>> raw;
};

CumulantScan clt_scan(const orthopoly::FunctionalSeries& s, const CovarianceModel& model,
                      const std::vector<std::int64_t>& n_values, int r_max, World world,
                      const EvalOptions& opts = {});

}  // namespace freeclt::diagram
