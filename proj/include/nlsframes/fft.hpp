#pragma once

#include <complex>
#include <vector>

namespace nlsframes {

// In-place radix-2 FFT; n must be a power of two. Forward uses e^{-i k x}
// convention; inverse includes the 1/n factor.
void fft(std::vector<std::complex<double>>& a, bool inverse);

bool is_power_of_two(std::size_t n);

// Wavenumbers for a periodic grid of n points over length L, FFT ordering
// (0, 1, ..., n/2-1, -n/2, ..., -1) * 2*pi/L.
std::vector<double> fft_wavenumbers(std::size_t n, double L);

}  // namespace nlsframes
