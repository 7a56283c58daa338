#pragma once

// Thin wrapper over FFTW for the small odd/even sizes used here.  Plans are
// created once per (size, direction) under a lock and executed through the
// new-array interface, which is thread safe.

#include <complex>
#include <cstddef>
#include <span>

namespace sevsteps::detail {

/// out[j] = sum_n in[n] exp(+2 pi i j n / N)
void fft_backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);
/// out[n] = sum_j in[j] exp(-2 pi i j n / N)   (unnormalised)
void fft_forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

}  // namespace sevsteps::detail
