#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace freeclt::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream id for (seed, index): replications and matrix draws get independent
// generators, so results do not depend on scheduling.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 0x51cc2b1fb3d1e917ULL));
}

// Deterministic normal deviates: mt19937_64 is fully specified by the
// standard and Box-Muller avoids the implementation-defined
// std::normal_distribution, so identical seeds give identical paths on any
// platform.
class Gaussian {
  public:
    explicit Gaussian(std::uint64_t seed) : eng_(seed) {}

    double uniform() {  // (0, 1]
        return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double rad = std::sqrt(-2.0 * std::log(u1));
        double ang = 6.283185307179586476925286766559 * u2;
        spare_ = rad * std::sin(ang);
        have_spare_ = true;
        return rad * std::cos(ang);
    }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace freeclt::rng
