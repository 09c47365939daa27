#include "freeclt/partitions.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace freeclt::partitions {

RowTable::RowTable(std::vector<int> row_sizes) : sizes_(std::move(row_sizes)) {
    if (sizes_.empty()) throw std::invalid_argument("RowTable: need at least one row");
    for (int n : sizes_)
        if (n < 1) throw std::invalid_argument("RowTable: row sizes must be positive");
    total_ = std::accumulate(sizes_.begin(), sizes_.end(), 0);
    row_of_.assign(static_cast<std::size_t>(total_) + 1, -1);
    int e = 1;
    for (int i = 0; i < rows(); ++i)
        for (int a = 0; a < sizes_[i]; ++a) row_of_[e++] = i;
}

Partition::Partition(std::vector<std::vector<int>> blocks, int ground_size)
    : blocks_(std::move(blocks)), m_(ground_size) {
    for (auto& b : blocks_) {
        if (b.empty()) throw std::invalid_argument("Partition: empty block");
        std::sort(b.begin(), b.end());
    }
    std::sort(blocks_.begin(), blocks_.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    block_of_.assign(static_cast<std::size_t>(m_) + 1, -1);
    int covered = 0;
    for (int bi = 0; bi < static_cast<int>(blocks_.size()); ++bi) {
        for (int e : blocks_[bi]) {
            if (e < 1 || e > m_) throw std::invalid_argument("Partition: element out of range");
            if (block_of_[e] != -1) throw std::invalid_argument("Partition: blocks not disjoint");
            block_of_[e] = bi;
            ++covered;
        }
    }
    if (covered != m_) throw std::invalid_argument("Partition: blocks do not cover {1..M}");
}

bool Partition::is_pair_partition() const {
    for (const auto& b : blocks_)
        if (b.size() != 2) return false;
    return true;
}

std::string Partition::to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        if (i) os << ',';
        os << '[';
        for (std::size_t j = 0; j < blocks_[i].size(); ++j) {
            if (j) os << ',';
            os << blocks_[i][j];
        }
        os << ']';
    }
    os << ']';
    return os.str();
}

int EdgeMatrix::row_sum(int i) const {
    int s = 0;
    for (int j = 0; j < k; ++j) s += at(i, j);
    return s;
}

namespace {

// Generates matchings by always pairing the smallest unmatched element, so
// blocks come out in canonical order. `row_of` (optional) prunes same-row
// pairs, which is exactly the inhomogeneity condition for pair partitions.
void matchings_rec(std::vector<int>& partner, int m, const std::vector<int>* row_of,
                   std::vector<std::vector<int>>& blocks,
                   const std::function<void(const std::vector<std::vector<int>>&)>& emit) {
    int a = 0;
    for (int e = 1; e <= m; ++e)
        if (partner[e] == 0) {
            a = e;
            break;
        }
    if (a == 0) {
        emit(blocks);
        return;
    }
    for (int b = a + 1; b <= m; ++b) {
        if (partner[b] != 0) continue;
        if (row_of && (*row_of)[a] == (*row_of)[b]) continue;
        partner[a] = b;
        partner[b] = a;
        blocks.push_back({a, b});
        matchings_rec(partner, m, row_of, blocks, emit);
        blocks.pop_back();
        partner[a] = 0;
        partner[b] = 0;
    }
}

std::vector<Partition> enumerate_matchings(int m, const std::vector<int>* row_of, int cap) {
    if (m < 0) throw std::invalid_argument("enumerate_pair_partitions: negative M");
    if (m % 2 != 0) return {};
    if (m > cap)
        throw cap_error("enumerate_pair_partitions: M=" + std::to_string(m) +
                        " exceeds enumeration cap " + std::to_string(cap));
    std::vector<Partition> out;
    if (m == 0) return out;
    std::vector<int> partner(static_cast<std::size_t>(m) + 1, 0);
    std::vector<std::vector<int>> blocks;
    matchings_rec(partner, m, row_of, blocks,
                  [&](const std::vector<std::vector<int>>& bs) { out.emplace_back(bs, m); });
    return out;
}

std::vector<int> row_of_vector(const RowTable& t) {
    std::vector<int> r(static_cast<std::size_t>(t.total()) + 1, -1);
    for (int e = 1; e <= t.total(); ++e) r[e] = t.row_of(e);
    return r;
}

void check_sizes(const Partition& p, const RowTable& t, const char* op) {
    if (p.ground_size() != t.total())
        throw std::invalid_argument(std::string(op) + ": partition ground set (" +
                                    std::to_string(p.ground_size()) + ") does not match table total (" +
                                    std::to_string(t.total()) + ")");
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<Partition> enumerate_pair_partitions(int m, int cap) {
    return enumerate_matchings(m, nullptr, cap);
}

bool is_noncrossing(const Partition& p) {
    // Stack scan: each element must extend the innermost open block.
    const int m = p.ground_size();
    std::vector<int> seen(p.blocks().size(), 0);
    std::vector<int> stack;
    for (int e = 1; e <= m; ++e) {
        int b = p.block_of(e);
        if (seen[b] == 0) {
            stack.push_back(b);
        } else if (stack.empty() || stack.back() != b) {
            return false;
        }
        if (++seen[b] == static_cast<int>(p.blocks()[b].size())) stack.pop_back();
    }
    return true;
}

bool is_nonhomogeneous(const Partition& p, const RowTable& t) {
    check_sizes(p, t, "is_nonhomogeneous");
    for (const auto& b : p.blocks()) {
        int row = t.row_of(b.front());
        bool inside = true;
        for (int e : b)
            if (t.row_of(e) != row) {
                inside = false;
                break;
            }
        if (inside) return false;
    }
    return true;
}

bool is_inhomogeneous(const Partition& p, const RowTable& t) {
    check_sizes(p, t, "is_inhomogeneous");
    std::vector<int> hits(t.rows());
    for (const auto& b : p.blocks()) {
        std::fill(hits.begin(), hits.end(), 0);
        for (int e : b)
            if (++hits[t.row_of(e)] > 1) return false;
    }
    return true;
}

bool is_connected(const Partition& p, const RowTable& t) {
    check_sizes(p, t, "is_connected");
    UnionFind uf(t.rows());
    for (const auto& b : p.blocks()) {
        int r0 = t.row_of(b.front());
        for (int e : b) uf.unite(r0, t.row_of(e));
    }
    int root = uf.find(0);
    for (int i = 1; i < t.rows(); ++i)
        if (uf.find(i) != root) return false;
    return true;
}

std::vector<Partition> enumerate_classical_diagrams(const RowTable& t, int cap) {
    auto rows = row_of_vector(t);
    auto inhom = enumerate_matchings(t.total(), &rows, cap);
    std::vector<Partition> out;
    out.reserve(inhom.size());
    for (auto& p : inhom)
        if (is_connected(p, t)) out.push_back(std::move(p));
    return out;
}

std::vector<Partition> enumerate_free_diagrams(const RowTable& t, bool connected_only, int cap) {
    auto rows = row_of_vector(t);
    auto inhom = enumerate_matchings(t.total(), &rows, cap);
    std::vector<Partition> out;
    for (auto& p : inhom) {
        if (!is_noncrossing(p)) continue;
        if (connected_only && !is_connected(p, t)) continue;
        out.push_back(std::move(p));
    }
    return out;
}

EdgeMatrix edge_matrix(const Partition& p, const RowTable& t) {
    check_sizes(p, t, "edge_matrix");
    EdgeMatrix em;
    em.k = t.rows();
    em.l.assign(static_cast<std::size_t>(em.k) * em.k, 0);
    for (const auto& b : p.blocks()) {
        if (b.size() != 2) throw std::invalid_argument("edge_matrix: partition is not a pair partition");
        int i = t.row_of(b[0]), j = t.row_of(b[1]);
        if (i == j) throw std::invalid_argument("edge_matrix: block inside a single row");
        ++em.at(i, j);
        ++em.at(j, i);
    }
    return em;
}

}  // namespace freeclt::partitions
