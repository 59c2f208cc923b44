#pragma once

#include <complex>
#include <vector>

namespace mixedts::detail {

/// Unnormalized forward DFT, X_m = sum_j x_j exp(-2 pi i j m / M), via FFTW.
std::vector<std::complex<double>> forward_dft(const std::vector<std::complex<double>>& in);

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace mixedts::detail
