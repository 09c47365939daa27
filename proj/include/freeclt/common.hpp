#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace freeclt {

// Error taxonomy shared by all modules. The CLI maps these onto exit codes
// (cap -> 3, hypothesis -> 4, numeric -> 5); contract violations use
// std::invalid_argument and map to usage errors.
struct cap_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct hypothesis_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Pairwise (binary-counter) summation: error grows O(log n) instead of O(n),
// result independent of chunking as long as push order is fixed.
class TreeSum {
  public:
    void add(double x) {
        std::uint64_t c = count_++;
        for (; c & 1u; c >>= 1) {
            x += levels_.back();
            levels_.pop_back();
        }
        levels_.push_back(x);
    }
    double total() const {
        double s = 0.0;
        for (double v : levels_) s += v;
        return s;
    }
    void reset() {
        levels_.clear();
        count_ = 0;
    }

  private:
    std::vector<double> levels_;
    std::uint64_t count_ = 0;
};

// Runs fn(chunk_index) for chunk_index in [0, n_chunks) on up to n_threads
// workers. Chunk decomposition is the caller's job, so results stay
// deterministic for any thread count: workers never share accumulators.
inline void parallel_chunks(std::size_t n_chunks, unsigned n_threads,
                            const std::function<void(std::size_t)>& fn) {
    if (n_threads <= 1 || n_chunks <= 1) {
        for (std::size_t i = 0; i < n_chunks; ++i) fn(i);
        return;
    }
    unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(n_threads, n_chunks));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&fn, &next, n_chunks] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n_chunks) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

inline unsigned default_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

}  // namespace freeclt
