// SPDX-License-Identifier: Apache-2.0
#include "hrx/mathdsp/fft.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "hrx/errors.hpp"

namespace hrx {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_inplace(std::span<cplx> x, bool inverse) {
    const std::size_t n = x.size();
    if (!is_power_of_two(n)) {
        throw ConfigError("fft size " + std::to_string(n) + " is not a power of two");
    }

    // bit reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        for (std::size_t k = 0; k < half; ++k) {
            // twiddles evaluated directly to avoid drift from a recurrence
            const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                                 static_cast<double>(len);
            const cplx w(std::cos(angle), std::sin(angle));
            for (std::size_t start = 0; start < n; start += len) {
                const cplx u = x[start + k];
                const cplx v = x[start + k + half] * w;
                x[start + k] = u + v;
                x[start + k + half] = u - v;
            }
        }
    }

    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& v : x) v *= scale;
    }
}

namespace {

ComplexVec transform(std::span<const cplx> x, std::size_t size, bool inverse) {
    if (x.size() != size) {
        throw ConfigError("fft input length " + std::to_string(x.size()) +
                          " does not match size " + std::to_string(size));
    }
    ComplexVec out(x.begin(), x.end());
    fft_inplace(out, inverse);
    return out;
}

}  // namespace

ComplexVec fft(std::span<const cplx> x, std::size_t size) { return transform(x, size, false); }

ComplexVec ifft(std::span<const cplx> x, std::size_t size) { return transform(x, size, true); }

}  // namespace hrx
