#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace freeclt::fft {

bool is_power_of_two(std::size_t n);
std::size_t next_pow2(std::size_t n);

// In-place radix-2 transform, size must be a power of two. Forward uses
// e^{-2 pi i jk/n}; inverse includes the 1/n factor.
void transform(std::vector<std::complex<double>>& a, bool inverse);

}  // namespace freeclt::fft
