// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hrx {

using cplx = std::complex<double>;
using ComplexVec = std::vector<cplx>;

bool is_power_of_two(std::size_t n);

/// In-place iterative radix-2 transform. The inverse applies the 1/N scaling.
/// Throws ConfigError if the length is not a power of two.
void fft_inplace(std::span<cplx> x, bool inverse = false);

/// Unnormalized forward DFT: X[k] = sum_n x[n] e^{-j 2 pi k n / N}.
ComplexVec fft(std::span<const cplx> x, std::size_t size);

/// Exact inverse of fft(), including the 1/N factor.
ComplexVec ifft(std::span<const cplx> x, std::size_t size);

}  // namespace hrx
