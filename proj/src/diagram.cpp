#include "freeclt/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace freeclt::diagram {

using partitions::EdgeMatrix;
using partitions::Partition;
using partitions::RowTable;

namespace {

void check_request(const CumulantRequest& req) {
    if (req.degrees.empty()) throw std::invalid_argument("cumulant request: need k >= 1 slots");
    if (req.degrees.size() != req.times.size())
        throw std::invalid_argument("cumulant request: degrees and times differ in length");
    for (int d : req.degrees)
        if (d < 1) throw std::invalid_argument("cumulant request: degrees must be >= 1");
    if (req.model == nullptr) throw std::invalid_argument("cumulant request: missing model");
}

struct GroupKey {
    std::vector<int> sizes;
    World world;
    bool connected;
    bool operator<(const GroupKey& o) const {
        if (sizes != o.sizes) return sizes < o.sizes;
        if (world != o.world) return world < o.world;
        return connected < o.connected;
    }
};

std::map<GroupKey, std::vector<DiagramGroup>>& group_cache() {
    static std::map<GroupKey, std::vector<DiagramGroup>> cache;
    return cache;
}
std::mutex& group_mutex() {
    static std::mutex m;
    return m;
}

std::vector<DiagramGroup> build_groups(const std::vector<int>& sizes, World world, bool connected,
                                       int cap) {
    RowTable table(sizes);
    std::vector<Partition> diagrams =
        world == World::Classical ? partitions::enumerate_classical_diagrams(table, cap)
                                  : partitions::enumerate_free_diagrams(table, connected, cap);
    std::map<std::vector<int>, std::int64_t> counts;
    for (const auto& p : diagrams) ++counts[partitions::edge_matrix(p, table).l];
    std::vector<DiagramGroup> out;
    out.reserve(counts.size());
    for (auto& [l, mult] : counts) {
        DiagramGroup g;
        g.edges.k = static_cast<int>(sizes.size());
        g.edges.l = l;
        g.multiplicity = mult;
        out.push_back(std::move(g));
    }
    return out;
}

// prod_{i<j} r(t_i - t_j)^{l_ij} for one edge matrix.
double group_term(const EdgeMatrix& l, const std::vector<std::int64_t>& times,
                  const CovarianceModel& model) {
    double prod = 1.0;
    for (int i = 0; i < l.k; ++i)
        for (int j = i + 1; j < l.k; ++j) {
            int e = l.at(i, j);
            if (e == 0) continue;
            double rij = model.r(times[static_cast<std::size_t>(i)] -
                                 times[static_cast<std::size_t>(j)]);
            for (int q = 0; q < e; ++q) prod *= rij;
        }
    return prod;
}

void validate_edge_matrix(const EdgeMatrix& l) {
    if (l.k < 1 || l.k > 6)
        throw std::invalid_argument("J_N: edge matrix dimension must be 1..6");
    if (static_cast<int>(l.l.size()) != l.k * l.k)
        throw std::invalid_argument("J_N: edge matrix storage size mismatch");
    for (int i = 0; i < l.k; ++i) {
        if (l.at(i, i) != 0) throw std::invalid_argument("J_N: edge matrix diagonal must be zero");
        for (int j = 0; j < l.k; ++j) {
            if (l.at(i, j) < 0) throw std::invalid_argument("J_N: negative edge count");
            if (l.at(i, j) != l.at(j, i)) throw std::invalid_argument("J_N: edge matrix not symmetric");
        }
        if (l.row_sum(i) == 0)
            throw std::invalid_argument("J_N: row " + std::to_string(i) +
                                        " has no edges (row sum must equal n_i > 0)");
    }
}

double ipow(double x, int e) {
    double p = 1.0;
    for (int q = 0; q < e; ++q) p *= x;
    return p;
}

// ---- direct O(N^k) evaluation ----------------------------------------

double j_n_direct(const EdgeMatrix& l, std::int64_t n, const CovarianceModel& model) {
    const int k = l.k;
    std::vector<std::int64_t> t(static_cast<std::size_t>(k), 1);
    TreeSum acc;
    // odometer over [1,N]^k with running partial products per level
    std::vector<double> partial(static_cast<std::size_t>(k) + 1, 1.0);
    int level = 0;
    while (level >= 0) {
        if (level == k) {
            acc.add(partial[static_cast<std::size_t>(k)]);
            --level;
            ++t[static_cast<std::size_t>(level)];
            continue;
        }
        std::int64_t& ti = t[static_cast<std::size_t>(level)];
        if (ti > n) {
            ti = 1;
            --level;
            if (level >= 0) ++t[static_cast<std::size_t>(level)];
            continue;
        }
        double p = partial[static_cast<std::size_t>(level)];
        for (int j = 0; j < level && p != 0.0; ++j) {
            int e = l.at(level, j);
            if (e == 0) continue;
            p *= ipow(model.r(ti - t[static_cast<std::size_t>(j)]), e);
        }
        // a vanished prefix cannot recover: |r| <= 1
        if (std::abs(p) < 1e-300) {
            ++ti;
            continue;
        }
        partial[static_cast<std::size_t>(level) + 1] = p;
        ++level;
        if (level < k) t[static_cast<std::size_t>(level)] = 1;
    }
    return acc.total();
}

// ---- translation-reduced evaluation -----------------------------------
//
// Substituting s_i = t_i - t_root collapses the k-fold sum to k-1 offset
// variables with the multiplicity weight N - (max s - min s). Rows are
// visited in BFS order from the root so every level has an already-assigned
// anchor row, whose covariance factor bounds the scan range.

struct ReducedPlan {
    std::vector<int> order;    // BFS order, order[0] = root
    std::vector<int> anchor;   // anchor[m] = index into order[] of the anchor row
    std::vector<std::int64_t> bound;  // scan half-width per level m >= 1
    std::vector<double> rest_mass;    // rest_mass[m] = prod_{m'>=m} level sums
};

std::vector<std::vector<int>> connected_components(const EdgeMatrix& l) {
    std::vector<int> comp(static_cast<std::size_t>(l.k), -1);
    std::vector<std::vector<int>> comps;
    for (int s = 0; s < l.k; ++s) {
        if (comp[static_cast<std::size_t>(s)] != -1) continue;
        std::vector<int> stack{s}, members;
        comp[static_cast<std::size_t>(s)] = static_cast<int>(comps.size());
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (int w = 0; w < l.k; ++w)
                if (l.at(v, w) > 0 && comp[static_cast<std::size_t>(w)] == -1) {
                    comp[static_cast<std::size_t>(w)] = comp[static_cast<std::size_t>(s)];
                    stack.push_back(w);
                }
        }
        std::sort(members.begin(), members.end());
        comps.push_back(std::move(members));
    }
    return comps;
}

ReducedPlan make_plan(const EdgeMatrix& l, std::int64_t n, const CovarianceModel& model,
                      double prune_tol) {
    const int k = l.k;
    ReducedPlan plan;
    plan.order.reserve(static_cast<std::size_t>(k));
    plan.anchor.assign(static_cast<std::size_t>(k), -1);
    std::vector<bool> seen(static_cast<std::size_t>(k), false);
    // root = last row, matching s_i = t_i - t_k
    plan.order.push_back(k - 1);
    seen[static_cast<std::size_t>(k - 1)] = true;
    for (std::size_t head = 0; head < plan.order.size(); ++head) {
        int v = plan.order[head];
        for (int w = 0; w < k; ++w)
            if (l.at(v, w) > 0 && !seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = true;
                plan.anchor[plan.order.size()] = static_cast<int>(head);
                plan.order.push_back(w);
            }
    }
    if (static_cast<int>(plan.order.size()) != k)
        throw std::logic_error("J_N reduced: edge matrix not connected");

    // Per-level absolute sums sum_{|d|<N} |r(d)|^{l_anchor} and scan bounds.
    std::vector<double> level_sum(static_cast<std::size_t>(k), 1.0);
    plan.bound.assign(static_cast<std::size_t>(k), 0);
    for (int m = 1; m < k; ++m) {
        int v = plan.order[static_cast<std::size_t>(m)];
        int u = plan.order[static_cast<std::size_t>(plan.anchor[static_cast<std::size_t>(m)])];
        int e = l.at(v, u);
        double s = ipow(std::abs(model.r(0)), e);
        for (std::int64_t d = 1; d < n; ++d) s += 2.0 * ipow(std::abs(model.r(d)), e);
        level_sum[static_cast<std::size_t>(m)] = s;
        plan.bound[static_cast<std::size_t>(m)] = n - 1;
    }
    plan.rest_mass.assign(static_cast<std::size_t>(k) + 1, 1.0);
    for (int m = k - 1; m >= 1; --m)
        plan.rest_mass[static_cast<std::size_t>(m)] =
            plan.rest_mass[static_cast<std::size_t>(m) + 1] * level_sum[static_cast<std::size_t>(m)];

    if (prune_tol > 0.0) {
        for (int m = 1; m < k; ++m) {
            int v = plan.order[static_cast<std::size_t>(m)];
            int u = plan.order[static_cast<std::size_t>(plan.anchor[static_cast<std::size_t>(m)])];
            int e = l.at(v, u);
            // cut once the anchor-factor tail mass cannot move the total
            double cut = prune_tol /
                         (static_cast<double>(n) * plan.rest_mass[static_cast<std::size_t>(m) + 1]);
            double tail = 0.0;
            std::int64_t b = n - 1;
            // walk inward from the far end accumulating the envelope tail
            while (b >= 1) {
                tail += 2.0 * ipow(model.abs_tail_max(b), e);
                if (tail >= cut) break;
                --b;
            }
            plan.bound[static_cast<std::size_t>(m)] = std::min<std::int64_t>(b + 1, n - 1);
        }
    }
    return plan;
}

double plan_cost(const ReducedPlan& plan, std::int64_t n) {
    double cost = 1.0;
    for (std::size_t m = 1; m < plan.order.size(); ++m)
        cost *= static_cast<double>(
            std::min<std::int64_t>(2 * plan.bound[m] + 1, 2 * n - 1));
    return cost;
}

struct ReducedContext {
    const EdgeMatrix* l;
    std::int64_t n;
    const CovarianceModel* model;
    const ReducedPlan* plan;
    double prune_tol;
};

void reduced_recurse(const ReducedContext& ctx, int level, std::vector<std::int64_t>& offsets,
                     double partial, std::int64_t lo_spread, std::int64_t hi_spread,
                     TreeSum& acc) {
    const int k = ctx.l->k;
    if (level == k) {
        double weight = static_cast<double>(ctx.n - (hi_spread - lo_spread));
        acc.add(partial * weight);
        return;
    }
    if (ctx.prune_tol > 0.0 &&
        std::abs(partial) * ctx.plan->rest_mass[static_cast<std::size_t>(level)] *
                static_cast<double>(ctx.n) <
            ctx.prune_tol)
        return;
    const int v = ctx.plan->order[static_cast<std::size_t>(level)];
    const int anchor_pos = ctx.plan->anchor[static_cast<std::size_t>(level)];
    const std::int64_t s_anchor = offsets[static_cast<std::size_t>(anchor_pos)];
    const std::int64_t b = ctx.plan->bound[static_cast<std::size_t>(level)];
    const std::int64_t lo = std::max<std::int64_t>(s_anchor - b, -(ctx.n - 1));
    const std::int64_t hi = std::min<std::int64_t>(s_anchor + b, ctx.n - 1);
    for (std::int64_t s = lo; s <= hi; ++s) {
        std::int64_t nlo = std::min(lo_spread, s), nhi = std::max(hi_spread, s);
        if (nhi - nlo >= ctx.n) continue;  // weight would be zero
        double p = partial;
        for (int m = 0; m < level && p != 0.0; ++m) {
            int w = ctx.plan->order[static_cast<std::size_t>(m)];
            int e = ctx.l->at(v, w);
            if (e == 0) continue;
            p *= ipow(ctx.model->r(s - offsets[static_cast<std::size_t>(m)]), e);
        }
        if (p == 0.0) continue;
        offsets[static_cast<std::size_t>(level)] = s;
        reduced_recurse(ctx, level + 1, offsets, p, nlo, nhi, acc);
    }
}

double j_n_reduced(const EdgeMatrix& l, std::int64_t n, const CovarianceModel& model,
                   const EvalOptions& opts) {
    ReducedPlan plan = make_plan(l, n, model, opts.prune_tol);
    if (plan_cost(plan, n) > opts.max_evals)
        throw cap_error("J_N: reduced sum cost exceeds budget of " +
                        std::to_string(opts.max_evals) + " evaluations; use smaller N or k");
    ReducedContext ctx{&l, n, &model, &plan, opts.prune_tol};

    // Level-1 scan domain (anchored at the root, offset 0), split into fixed
    // chunks so the result does not depend on the thread count.
    const std::int64_t b = plan.bound[1];
    const std::int64_t lo = std::max<std::int64_t>(-b, -(n - 1));
    const std::int64_t hi = std::min<std::int64_t>(b, n - 1);
    const std::int64_t span = hi - lo + 1;
    const std::int64_t chunk_width = 512;
    const std::size_t n_chunks = static_cast<std::size_t>((span + chunk_width - 1) / chunk_width);
    std::vector<double> chunk_totals(n_chunks, 0.0);

    parallel_chunks(n_chunks, opts.threads, [&](std::size_t ci) {
        const int k = l.k;
        const std::int64_t clo = lo + static_cast<std::int64_t>(ci) * chunk_width;
        const std::int64_t chi = std::min(hi, clo + chunk_width - 1);
        std::vector<std::int64_t> offsets(static_cast<std::size_t>(k), 0);
        TreeSum acc;
        const int v = plan.order[1];
        for (std::int64_t s = clo; s <= chi; ++s) {
            double p = ipow(model.r(s), l.at(v, plan.order[0]));
            if (p == 0.0) continue;
            offsets[1] = s;
            reduced_recurse(ctx, 2, offsets, p, std::min<std::int64_t>(0, s),
                            std::max<std::int64_t>(0, s), acc);
        }
        chunk_totals[ci] = acc.total();
    });

    TreeSum total;
    for (double v : chunk_totals) total.add(v);
    return total.total();
}

}  // namespace

const std::vector<DiagramGroup>& diagram_groups(const std::vector<int>& row_sizes, World world,
                                                bool connected_only, int cap) {
    GroupKey key{row_sizes, world, world == World::Classical ? true : connected_only};
    std::lock_guard<std::mutex> lock(group_mutex());
    auto& cache = group_cache();
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, build_groups(row_sizes, world, key.connected, cap)).first;
    return it->second;
}

double joint_cumulant(const CumulantRequest& req, const EvalOptions& opts) {
    check_request(req);
    int total = std::accumulate(req.degrees.begin(), req.degrees.end(), 0);
    if (total % 2 != 0) return 0.0;
    const auto& groups = diagram_groups(req.degrees, req.world, true, opts.partition_cap);
    TreeSum acc;
    for (const auto& g : groups)
        acc.add(static_cast<double>(g.multiplicity) * group_term(g.edges, req.times, *req.model));
    return acc.total();
}

double joint_moment_free(const std::vector<int>& degrees, const std::vector<std::int64_t>& times,
                         const CovarianceModel& model, const EvalOptions& opts) {
    CumulantRequest req{degrees, times, World::Free, &model};
    check_request(req);
    int total = std::accumulate(degrees.begin(), degrees.end(), 0);
    if (total % 2 != 0) return 0.0;
    const auto& groups = diagram_groups(degrees, World::Free, false, opts.partition_cap);
    TreeSum acc;
    for (const auto& g : groups)
        acc.add(static_cast<double>(g.multiplicity) * group_term(g.edges, times, model));
    return acc.total();
}

double j_n(const EdgeMatrix& l, std::int64_t n, const CovarianceModel& model,
           SumStrategy strategy, const EvalOptions& opts) {
    validate_edge_matrix(l);
    if (n < 1) throw std::invalid_argument("J_N: N must be >= 1");

    // disconnected edge matrices factorize over components
    auto comps = connected_components(l);
    if (comps.size() > 1) {
        double prod = 1.0;
        for (const auto& c : comps) {
            EdgeMatrix sub;
            sub.k = static_cast<int>(c.size());
            sub.l.assign(static_cast<std::size_t>(sub.k) * sub.k, 0);
            for (int i = 0; i < sub.k; ++i)
                for (int j = 0; j < sub.k; ++j)
                    sub.at(i, j) = l.at(c[static_cast<std::size_t>(i)], c[static_cast<std::size_t>(j)]);
            prod *= j_n(sub, n, model, strategy, opts);
        }
        return prod;
    }

    const double direct_cost = std::pow(static_cast<double>(n), l.k);
    switch (strategy) {
        case SumStrategy::Direct:
            if (direct_cost > opts.max_evals)
                throw cap_error("J_N: direct sum needs " + std::to_string(direct_cost) +
                                " evaluations, over budget " + std::to_string(opts.max_evals) +
                                "; use smaller N or k, or the reduced strategy");
            return j_n_direct(l, n, model);
        case SumStrategy::Reduced:
            return j_n_reduced(l, n, model, opts);
        case SumStrategy::Auto:
        default:
            if (direct_cost <= std::min(opts.max_evals, 1e7)) return j_n_direct(l, n, model);
            return j_n_reduced(l, n, model, opts);
    }
}

namespace {

void check_series_world(const orthopoly::FunctionalSeries& s, World world, const char* op) {
    const auto expected =
        world == World::Classical ? orthopoly::Basis::Hermite : orthopoly::Basis::Chebyshev;
    if (s.basis != expected)
        throw std::invalid_argument(std::string(op) + ": series basis does not match world " +
                                    covariance::world_name(world));
}

}  // namespace

double kappa_r_sn(const orthopoly::FunctionalSeries& s, const CovarianceModel& model,
                  std::int64_t n, int r, World world, const EvalOptions& opts) {
    check_series_world(s, world, "kappa_r_sn");
    if (r < 2) throw std::invalid_argument("kappa_r_sn: R must be >= 2");
    if (n < 1) throw std::invalid_argument("kappa_r_sn: N must be >= 1");

    std::vector<int> support;
    for (int k = 1; k <= s.max_degree(); ++k)
        if (s.coeffs[static_cast<std::size_t>(k)] != 0.0) support.push_back(k);
    if (support.empty()) return 0.0;

    std::map<std::vector<int>, double> j_cache;
    TreeSum acc;
    std::vector<int> tuple(static_cast<std::size_t>(r), 0);
    std::vector<std::size_t> idx(static_cast<std::size_t>(r), 0);
    for (;;) {
        for (int i = 0; i < r; ++i) tuple[static_cast<std::size_t>(i)] = support[idx[static_cast<std::size_t>(i)]];
        int total = std::accumulate(tuple.begin(), tuple.end(), 0);
        if (total % 2 == 0) {
            double cprod = 1.0;
            for (int d : tuple) cprod *= s.coeffs[static_cast<std::size_t>(d)];
            const auto& groups = diagram_groups(tuple, world, true, opts.partition_cap);
            double inner = 0.0;
            for (const auto& g : groups) {
                auto it = j_cache.find(g.edges.l);
                double jv;
                if (it != j_cache.end()) {
                    jv = it->second;
                } else {
                    jv = j_n(g.edges, n, model, SumStrategy::Reduced, opts);
                    j_cache.emplace(g.edges.l, jv);
                }
                inner += static_cast<double>(g.multiplicity) * jv;
            }
            acc.add(cprod * inner);
        }
        // odometer over support^R
        int pos = r - 1;
        while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == support.size()) {
            idx[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return acc.total();
}

double kappa2_sn_closed(const orthopoly::FunctionalSeries& s, const CovarianceModel& model,
                        std::int64_t n, World world) {
    check_series_world(s, world, "kappa2_sn_closed");
    if (n < 1) throw std::invalid_argument("kappa2_sn_closed: N must be >= 1");
    double sum_sym = covariance::functional_covariance(s, model, 0);
    double sum_weighted = 0.0;
    for (std::int64_t t = 1; t <= n; ++t) {
        double rh = covariance::functional_covariance(s, model, t);
        sum_sym += 2.0 * rh;
        sum_weighted += static_cast<double>(t) * rh;
    }
    return static_cast<double>(n) * sum_sym - 2.0 * sum_weighted;
}

// ---- oracle: Wick moments + Moebius inversion -------------------------

namespace {

std::int64_t catalan_number(int n) {
    static const std::vector<std::int64_t> table = [] {
        std::vector<std::int64_t> c{1};
        for (int i = 1; i <= 16; ++i) {
            std::int64_t v = 0;
            for (int j = 0; j < i; ++j) v += c[static_cast<std::size_t>(j)] * c[static_cast<std::size_t>(i - 1 - j)];
            c.push_back(v);
        }
        return c;
    }();
    return table.at(static_cast<std::size_t>(n));
}

// All set partitions of {0..k-1} as block lists, via restricted growth strings.
std::vector<std::vector<std::vector<int>>> set_partitions(int k) {
    std::vector<std::vector<std::vector<int>>> out;
    std::vector<int> rgs(static_cast<std::size_t>(k), 0);
    for (;;) {
        int nb = *std::max_element(rgs.begin(), rgs.end()) + 1;
        std::vector<std::vector<int>> blocks(static_cast<std::size_t>(nb));
        for (int i = 0; i < k; ++i) blocks[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])].push_back(i);
        out.push_back(std::move(blocks));
        // next restricted growth string
        int pos = k - 1;
        for (; pos > 0; --pos) {
            int mx = 0;
            for (int i = 0; i < pos; ++i) mx = std::max(mx, rgs[static_cast<std::size_t>(i)]);
            if (rgs[static_cast<std::size_t>(pos)] <= mx) break;
        }
        if (pos == 0) break;
        ++rgs[static_cast<std::size_t>(pos)];
        for (int i = pos + 1; i < k; ++i) rgs[static_cast<std::size_t>(i)] = 0;
    }
    return out;
}

bool blocks_noncrossing(const std::vector<std::vector<int>>& blocks, int k) {
    std::vector<int> owner(static_cast<std::size_t>(k), -1);
    for (int b = 0; b < static_cast<int>(blocks.size()); ++b)
        for (int e : blocks[static_cast<std::size_t>(b)]) owner[static_cast<std::size_t>(e)] = b;
    std::vector<int> remaining(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) remaining[b] = static_cast<int>(blocks[b].size());
    std::vector<int> seen(blocks.size(), 0);
    std::vector<int> stack;
    for (int e = 0; e < k; ++e) {
        int b = owner[static_cast<std::size_t>(e)];
        if (seen[static_cast<std::size_t>(b)] == 0)
            stack.push_back(b);
        else if (stack.empty() || stack.back() != b)
            return false;
        if (++seen[static_cast<std::size_t>(b)] == remaining[static_cast<std::size_t>(b)]) stack.pop_back();
    }
    return true;
}

// Kreweras complement of a non-crossing partition of {0..k-1}: bars i and j
// (i < j) are joined iff the elements {i+1..j} form a union of blocks.
std::vector<std::vector<int>> kreweras_complement(const std::vector<std::vector<int>>& blocks,
                                                  int k) {
    std::vector<int> owner(static_cast<std::size_t>(k), -1);
    for (int b = 0; b < static_cast<int>(blocks.size()); ++b)
        for (int e : blocks[static_cast<std::size_t>(b)]) owner[static_cast<std::size_t>(e)] = b;
    std::vector<int> parent(static_cast<std::size_t>(k));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x)
            x = parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    };
    std::vector<int> block_sizes(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) block_sizes[b] = static_cast<int>(blocks[b].size());
    for (int i = 0; i < k; ++i) {
        std::vector<int> inside(blocks.size(), 0);
        int open = 0;
        for (int j = i + 1; j < k; ++j) {
            int b = owner[static_cast<std::size_t>(j)];
            if (inside[static_cast<std::size_t>(b)] == 0) ++open;
            if (++inside[static_cast<std::size_t>(b)] == block_sizes[static_cast<std::size_t>(b)]) --open;
            if (open == 0) parent[static_cast<std::size_t>(find(i))] = find(j);
        }
    }
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < k; ++i) groups[find(i)].push_back(i);
    std::vector<std::vector<int>> out;
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    return out;
}

double moebius_full(int blocks) {
    double sign = blocks % 2 == 1 ? 1.0 : -1.0;
    double fact = 1.0;
    for (int i = 2; i <= blocks - 1; ++i) fact *= static_cast<double>(i);
    return sign * fact;
}

double moebius_nc(const std::vector<std::vector<int>>& blocks, int k) {
    double mu = 1.0;
    for (const auto& v : kreweras_complement(blocks, k)) {
        int sz = static_cast<int>(v.size());
        double sign = sz % 2 == 1 ? 1.0 : -1.0;
        mu *= sign * static_cast<double>(catalan_number(sz - 1));
    }
    return mu;
}

using MomentCache = std::map<std::vector<std::int64_t>, double>;

// E of a Gaussian monomial word: sum over all pairings of letters. The word
// is kept sorted (classical moments are permutation invariant) so the memo
// hits across monomial tuples and lattice blocks.
double gaussian_word_moment(const std::vector<std::int64_t>& letters,
                            const CovarianceModel& model, MomentCache& cache) {
    if (letters.empty()) return 1.0;
    if (letters.size() % 2 != 0) return 0.0;
    auto it = cache.find(letters);
    if (it != cache.end()) return it->second;
    std::int64_t first = letters.front();
    double acc = 0.0;
    for (std::size_t j = 1; j < letters.size(); ++j) {
        std::vector<std::int64_t> rest;
        rest.reserve(letters.size() - 2);
        for (std::size_t q = 1; q < letters.size(); ++q)
            if (q != j) rest.push_back(letters[q]);
        acc += model.r(first - letters[j]) * gaussian_word_moment(rest, model, cache);
    }
    cache.emplace(letters, acc);
    return acc;
}

// phi of a semicircular word: interval DP over non-crossing pairings.
double semicircular_word_moment(const std::vector<std::int64_t>& letters,
                                const CovarianceModel& model) {
    const int n = static_cast<int>(letters.size());
    if (n == 0) return 1.0;
    if (n % 2 != 0) return 0.0;
    // f[i][j] = moment of letters[i..j] inclusive
    std::vector<std::vector<double>> f(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
    auto get = [&](int i, int j) -> double {
        if (i > j) return 1.0;
        return f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    };
    for (int len = 2; len <= n; len += 2)
        for (int i = 0; i + len - 1 < n; ++i) {
            int j = i + len - 1;
            double v = 0.0;
            for (int p = i + 1; p <= j; p += 2)
                v += model.r(letters[static_cast<std::size_t>(i)] - letters[static_cast<std::size_t>(p)]) *
                     get(i + 1, p - 1) * get(p + 1, j);
            f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
        }
    return f[0][static_cast<std::size_t>(n - 1)];
}

// Joint cumulant of monomial slots X_{t_i}^{d_i} by Moebius inversion.
double monomial_cumulant(const std::vector<int>& degs, const std::vector<std::int64_t>& times,
                         World world, const CovarianceModel& model, MomentCache& cache) {
    const int k = static_cast<int>(degs.size());
    auto parts = set_partitions(k);
    double acc = 0.0;
    for (const auto& blocks : parts) {
        if (world == World::Free && !blocks_noncrossing(blocks, k)) continue;
        double mu = world == World::Free ? moebius_nc(blocks, k)
                                         : moebius_full(static_cast<int>(blocks.size()));
        double prod = mu;
        for (const auto& b : blocks) {
            std::vector<std::int64_t> word;
            for (int slot : b)
                for (int q = 0; q < degs[static_cast<std::size_t>(slot)]; ++q)
                    word.push_back(times[static_cast<std::size_t>(slot)]);
            double m;
            if (world == World::Free) {
                m = semicircular_word_moment(word, model);
            } else {
                std::sort(word.begin(), word.end());
                m = gaussian_word_moment(word, model, cache);
            }
            prod *= m;
            if (prod == 0.0) break;
        }
        acc += prod;
    }
    return acc;
}

}  // namespace

double oracle_cumulant(const CumulantRequest& req) {
    check_request(req);
    int total = std::accumulate(req.degrees.begin(), req.degrees.end(), 0);
    if (total > kOracleDegreeCap)
        throw cap_error("oracle_cumulant: total degree " + std::to_string(total) +
                        " exceeds cap " + std::to_string(kOracleDegreeCap));
    const auto basis = req.world == World::Classical ? orthopoly::Basis::Hermite
                                                     : orthopoly::Basis::Chebyshev;
    const int k = static_cast<int>(req.degrees.size());
    std::vector<std::vector<double>> monos;
    monos.reserve(static_cast<std::size_t>(k));
    for (int d : req.degrees) monos.push_back(orthopoly::monomial_coefficients(basis, d));

    // iterate monomial degree tuples with nonzero coefficients
    std::vector<int> d(static_cast<std::size_t>(k), 0);
    double acc = 0.0;
    MomentCache cache;
    std::function<void(int, double)> rec = [&](int slot, double coeff) {
        if (slot == k) {
            acc += coeff * monomial_cumulant(d, req.times, req.world, *req.model, cache);
            return;
        }
        const auto& mc = monos[static_cast<std::size_t>(slot)];
        for (int deg = 0; deg < static_cast<int>(mc.size()); ++deg) {
            double c = mc[static_cast<std::size_t>(deg)];
            if (c == 0.0) continue;
            d[static_cast<std::size_t>(slot)] = deg;
            rec(slot + 1, coeff * c);
        }
    };
    rec(0, 1.0);
    return acc;
}

CumulantScan clt_scan(const orthopoly::FunctionalSeries& s, const CovarianceModel& model,
                      const std::vector<std::int64_t>& n_values, int r_max, World world,
                      const EvalOptions& opts) {
    if (r_max < 2) throw std::invalid_argument("clt_scan: Rmax must be >= 2");
    if (n_values.empty()) throw std::invalid_argument("clt_scan: need at least one N");
    auto summ = covariance::summability_check(s, model);
    if (!summ.summable)
        throw hypothesis_error("clt_scan: covariance not summable at rank (" + summ.witness + ")");
    auto sig = covariance::sigma_squared(s, model, world);
    if (sig.zero_flagged)
        throw hypothesis_error("clt_scan: sigma^2 = " + std::to_string(sig.value) +
                               " violates the sigma^2 != 0 hypothesis");

    CumulantScan scan;
    scan.n_values = n_values;
    scan.r_max = r_max;
    scan.world = world;
    scan.sigma2_ref = sig.value;
    for (std::int64_t n : n_values) {
        std::vector<double> raw_row, norm_row;
        for (int r = 2; r <= r_max; ++r) {
            double raw = kappa_r_sn(s, model, n, r, world, opts);
            raw_row.push_back(raw);
            norm_row.push_back(raw / std::pow(static_cast<double>(n), r / 2.0));
        }
        scan.raw.push_back(std::move(raw_row));
        scan.normalized.push_back(std::move(norm_row));
    }
    return scan;
}

}  // namespace freeclt::diagram
