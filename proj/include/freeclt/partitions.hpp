#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "freeclt/common.hpp"

namespace freeclt::partitions {

// Row structure of the diagram table: k rows of sizes n_1..n_k. Element
// (row i, position a) has the 1-based linear index sum(n_j, j<i) + a.
class RowTable {
  public:
    explicit RowTable(std::vector<int> row_sizes);

    int rows() const { return static_cast<int>(sizes_.size()); }
    int size(int row) const { return sizes_[row]; }
    const std::vector<int>& sizes() const { return sizes_; }
    int total() const { return total_; }

    // Row index (0-based) of a 1-based element.
    int row_of(int element) const { return row_of_[element]; }

  private:
    std::vector<int> sizes_;
    std::vector<int> row_of_;  // indexed 1..total
    int total_ = 0;
};

// A set partition of {1..M} in canonical form: blocks internally sorted,
// blocks ordered by their minimum element. Canonical form makes the
// serialization unique, so partitions compare by value.
class Partition {
  public:
    Partition(std::vector<std::vector<int>> blocks, int ground_size);

    const std::vector<std::vector<int>>& blocks() const { return blocks_; }
    int ground_size() const { return m_; }
    bool is_pair_partition() const;

    // 0-based block id of a 1-based element.
    int block_of(int element) const { return block_of_[element]; }

    std::string to_string() const;  // e.g. "[[1,4],[2,3]]"
    bool operator==(const Partition& o) const {
        return m_ == o.m_ && blocks_ == o.blocks_;
    }

  private:
    std::vector<std::vector<int>> blocks_;
    std::vector<int> block_of_;
    int m_ = 0;
};

// Symmetric matrix of cross-row edge counts of a pair partition; diagonal
// is zero and row sums reproduce the row sizes.
struct EdgeMatrix {
    int k = 0;
    std::vector<int> l;  // row-major k*k

    int at(int i, int j) const { return l[static_cast<std::size_t>(i) * k + j]; }
    int& at(int i, int j) { return l[static_cast<std::size_t>(i) * k + j]; }
    int row_sum(int i) const;
    bool operator==(const EdgeMatrix& o) const { return k == o.k && l == o.l; }
};

inline constexpr int kDefaultEnumerationCap = 16;

// All perfect matchings of {1..M}: (M-1)!! of them, canonical order.
// Odd M yields the empty list; M beyond the cap throws cap_error.
std::vector<Partition> enumerate_pair_partitions(int m,
                                                 int cap = kDefaultEnumerationCap);

bool is_noncrossing(const Partition& p);
bool is_nonhomogeneous(const Partition& p, const RowTable& t);
bool is_inhomogeneous(const Partition& p, const RowTable& t);
bool is_connected(const Partition& p, const RowTable& t);

// Pair partitions that are inhomogeneous and connected w.r.t. t: the set
// Gamma of the classical diagram formula.
std::vector<Partition> enumerate_classical_diagrams(const RowTable& t,
                                                    int cap = kDefaultEnumerationCap);

// Non-crossing, non-homogeneous pair partitions (Gamma' when
// connected_only is false, Gamma'' when true).
std::vector<Partition> enumerate_free_diagrams(const RowTable& t, bool connected_only,
                                               int cap = kDefaultEnumerationCap);

// Cross-row edge counts of an inhomogeneous pair partition.
EdgeMatrix edge_matrix(const Partition& p, const RowTable& t);

}  // namespace freeclt::partitions
