#include "freeclt/breaking.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace freeclt::breaking {

using partitions::Partition;
using partitions::RowTable;

BreakingGraph build_breaking_graph(const RowTable& t, const Partition& p,
                                   const std::map<int, double>& p_values) {
    if (p.ground_size() != t.total())
        throw std::invalid_argument("build_breaking_graph: partition does not match table");
    BreakingGraph g;
    g.rows = t.rows();
    g.subsets = static_cast<int>(p.blocks().size());
    for (int bi = 0; bi < g.subsets; ++bi) {
        const auto& block = p.blocks()[static_cast<std::size_t>(bi)];
        const int card = static_cast<int>(block.size());
        auto it = p_values.find(card);
        if (it == p_values.end())
            throw std::invalid_argument("build_breaking_graph: no p value for block size " +
                                        std::to_string(card));
        const double pk = it->second;
        if (!(pk >= 1.0))
            throw std::invalid_argument("build_breaking_graph: p values must be >= 1");
        const double cost = std::isinf(pk) ? 1.0 : 1.0 - 1.0 / pk;
        for (int e : block) g.edges.push_back({t.row_of(e), bi, cost});
    }
    return g;
}

namespace {

struct SmallUf {
    int parent[64];
    int count;
    void init(int n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
        count = n;
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[a] = b;
            --count;
        }
    }
};

struct AlphaSearch {
    const BreakingGraph* g;
    int n_vertices;
    double best;
    std::uint32_t best_mask;

    // Depth-first over edges, sharing the union-find prefix; visiting the
    // keep branch first makes the all-keep subset (A = empty) the first
    // leaf, so ties resolve toward the smallest removal.
    void run(int idx, SmallUf uf, double removed_cost, std::uint32_t mask) {
        if (idx == static_cast<int>(g->edges.size())) {
            double alpha = static_cast<double>(uf.count) - removed_cost;
            if (alpha > best + 1e-15) {
                best = alpha;
                best_mask = mask;
            }
            return;
        }
        const auto& e = g->edges[static_cast<std::size_t>(idx)];
        SmallUf kept = uf;
        kept.unite(e.row, g->rows + e.subset);
        run(idx + 1, kept, removed_cost, mask);
        run(idx + 1, uf, removed_cost + e.cost, mask | (1u << idx));
    }
};

}  // namespace

AlphaResult alpha_g(const BreakingGraph& g, unsigned threads) {
    const int ne = static_cast<int>(g.edges.size());
    if (ne > kAlphaEdgeCap)
        throw cap_error("alpha_g: " + std::to_string(ne) + " edges exceed the exhaustive cap " +
                        std::to_string(kAlphaEdgeCap));
    const int nv = g.rows + g.subsets;
    if (nv > 64) throw cap_error("alpha_g: too many vertices");

    // split the first few edge decisions across chunks
    int split = 0;
    while (split < ne && (1 << split) < 64) ++split;
    split = std::min(split, ne);
    const std::size_t n_chunks = static_cast<std::size_t>(1) << split;

    std::vector<double> chunk_best(n_chunks, -1e300);
    std::vector<std::uint32_t> chunk_mask(n_chunks, 0);

    parallel_chunks(n_chunks, threads, [&](std::size_t ci) {
        AlphaSearch search;
        search.g = &g;
        search.n_vertices = nv;
        search.best = -1e300;
        search.best_mask = 0;
        SmallUf uf;
        uf.init(nv);
        double removed = 0.0;
        std::uint32_t mask = 0;
        for (int idx = 0; idx < split; ++idx) {
            const auto& e = g.edges[static_cast<std::size_t>(idx)];
            if (ci & (static_cast<std::size_t>(1) << idx)) {
                removed += e.cost;
                mask |= (1u << idx);
            } else {
                uf.unite(e.row, g.rows + e.subset);
            }
        }
        search.run(split, uf, removed, mask);
        chunk_best[ci] = search.best;
        chunk_mask[ci] = search.best_mask;
    });

    double best = -1e300;
    std::uint32_t best_mask = 0;
    for (std::size_t ci = 0; ci < n_chunks; ++ci) {
        // chunk 0 (keep-all prefix) comes first; strict inequality keeps the
        // earliest, hence smallest, removal set on ties
        if (chunk_best[ci] > best + 1e-15) {
            best = chunk_best[ci];
            best_mask = chunk_mask[ci];
        }
    }

    AlphaResult out;
    out.value = best;
    for (int idx = 0; idx < ne; ++idx)
        if (best_mask & (1u << idx)) out.witness.push_back(idx);
    return out;
}

double theorem53_required_z(int m, int k, int* branch) {
    if (m < 1) throw std::invalid_argument("theorem53: m must be >= 1");
    if (k < 2) throw std::invalid_argument("theorem53: k must be >= 2");
    const double dm = static_cast<double>(m), dk = static_cast<double>(k);
    if (m + 1 <= k && k < 2 * m) {
        if (branch) *branch = 2;
        return dk / (2.0 * dm * (dk - dm));
    }
    if (k * (k - 1) > 2 * m && k <= m + 1) {
        if (branch) *branch = 1;
        return dk / (2.0 * dm);
    }
    if (branch) *branch = 3;
    return 1.0 / dk + 1.0 / (2.0 * dm);
}

Theorem53Report theorem53_check(int m, const std::map<int, double>& p_values) {
    Theorem53Report rep;
    rep.m = m;
    for (const auto& [k, pk] : p_values) {
        if (k < 2) throw std::invalid_argument("theorem53_check: block sizes start at k = 2");
        if (!(pk >= 1.0)) throw std::invalid_argument("theorem53_check: p values must be >= 1");
        Theorem53Row row;
        row.k = k;
        row.required_z = theorem53_required_z(m, k, &row.branch);
        row.z = std::isinf(pk) ? 1.0 : 1.0 - 1.0 / pk;
        row.ok = row.z >= row.required_z - 1e-12;
        rep.all_ok = rep.all_ok && row.ok;
        rep.rows.push_back(row);
    }
    return rep;
}

namespace {

std::complex<double> transfer(const LinearProcessSpec& spec, double x) {
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < spec.c_coeffs.size(); ++j) {
        const double ang = 2.0 * std::numbers::pi * static_cast<double>(j) * x;
        acc += spec.c_coeffs[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    return acc;
}

double base_cumulant(const LinearProcessSpec& spec, int k) {
    auto it = spec.d.find(k);
    if (it == spec.d.end())
        throw std::invalid_argument("linear process: base cumulant d_" + std::to_string(k) +
                                    " not specified");
    return it->second;
}

}  // namespace

std::complex<double> spectral_cumulant_linear(const LinearProcessSpec& spec, int k,
                                              const std::vector<double>& x) {
    if (k < 2) throw std::invalid_argument("spectral_cumulant_linear: k must be >= 2");
    if (static_cast<int>(x.size()) != k - 1)
        throw std::invalid_argument("spectral_cumulant_linear: need k-1 frequencies");
    std::complex<double> acc = base_cumulant(spec, k);
    double sum = 0.0;
    for (double xi : x) {
        acc *= transfer(spec, xi);
        sum += xi;
    }
    acc *= transfer(spec, -sum);
    return acc;
}

SpectralVerification verify_spectral_representation(const LinearProcessSpec& spec, int k,
                                                    const std::vector<std::int64_t>& j,
                                                    int quad_grid) {
    if (k < 2 || k > 4) throw std::invalid_argument("verify_spectral_representation: k in {2,3,4}");
    if (static_cast<int>(j.size()) != k)
        throw std::invalid_argument("verify_spectral_representation: need k time indices");
    if (quad_grid < 2) throw std::invalid_argument("verify_spectral_representation: grid too small");

    const int L = static_cast<int>(spec.c_coeffs.size()) - 1;
    // lhs: d_k sum_i prod_l c_{j_l - i} over the support window
    std::int64_t lo = *std::max_element(j.begin(), j.end()) - L;
    std::int64_t hi = *std::min_element(j.begin(), j.end());
    double lhs = 0.0;
    for (std::int64_t i = lo; i <= hi; ++i) {
        double prod = 1.0;
        for (std::int64_t jl : j) {
            std::int64_t d = jl - i;
            prod *= (d >= 0 && d <= L) ? spec.c_coeffs[static_cast<std::size_t>(d)] : 0.0;
        }
        lhs += prod;
    }
    lhs *= base_cumulant(spec, k);

    // rhs: uniform-grid quadrature on [0,1)^{k-1} (trapezoid = exact midpoint
    // sum for periodic integrands)
    std::complex<double> rhs = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(k - 1), 0);
    std::vector<double> x(static_cast<std::size_t>(k - 1), 0.0);
    const double h = 1.0 / static_cast<double>(quad_grid);
    for (;;) {
        for (int q = 0; q < k - 1; ++q) x[static_cast<std::size_t>(q)] = idx[static_cast<std::size_t>(q)] * h;
        std::complex<double> f = spectral_cumulant_linear(spec, k, x);
        double phase = 0.0;
        for (int q = 0; q < k - 1; ++q)
            phase += x[static_cast<std::size_t>(q)] *
                     static_cast<double>(j[static_cast<std::size_t>(q)] - j[static_cast<std::size_t>(k - 1)]);
        const double ang = 2.0 * std::numbers::pi * phase;
        rhs += f * std::complex<double>(std::cos(ang), std::sin(ang));
        int pos = k - 2;
        while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == quad_grid) {
            idx[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    for (int q = 0; q < k - 1; ++q) rhs *= h;

    SpectralVerification out;
    out.lhs = lhs;
    out.rhs = rhs.real();
    out.abs_err = std::abs(lhs - out.rhs);
    out.grid_warning = out.abs_err > 1e-3;
    return out;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("log_log_slope: need matching lists of length >= 2");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(std::abs(y[i]) > 0.0))
            throw std::invalid_argument("log_log_slope: need positive x and nonzero y");
        double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace freeclt::breaking
