#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace gaitline::dft {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 Cooley-Tukey, unnormalized forward transform.
inline void fft_pow2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

/// Forward DFT of a real signal, X_k = sum_n x[n] exp(-2*pi*i*k*n/N).
/// Power-of-two lengths take the fast path; anything else falls back to the
/// direct sum (slices are 128 long in practice, so this rarely matters).
inline std::vector<std::complex<double>> spectrum(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    if (n == 0) return out;
    if (is_power_of_two(n)) {
        for (std::size_t i = 0; i < n; ++i) out[i] = {x[i], 0.0};
        fft_pow2(out);
        return out;
    }
    for (std::size_t k = 0; k < n; ++k) {
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double ang = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(i) /
                         static_cast<double>(n);
            re += x[i] * std::cos(ang);
            im += x[i] * std::sin(ang);
        }
        out[k] = {re, im};
    }
    return out;
}

}  // namespace gaitline::dft
