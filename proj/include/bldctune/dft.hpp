#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "bldctune/math_util.hpp"

namespace bldctune {

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// In-place iterative radix-2 Cooley-Tukey, size must be a power of two.
inline void fft_radix2(std::vector<std::complex<double>>& data, bool inverse) {
    const std::size_t n = data.size();
    if (n < 2) {
        return;
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(data[i], data[j]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = (inverse ? kTwoPi : -kTwoPi) / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = data[i + j];
                const std::complex<double> v = data[i + j + len / 2] * w;
                data[i + j] = u + v;
                data[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        for (auto& x : data) {
            x /= static_cast<double>(n);
        }
    }
}

/// Chirp phase exp(sign * i*pi*k^2/n) with k^2 reduced mod 2n in integer
/// arithmetic so the phase stays accurate for large k.
inline std::complex<double> chirp(std::uint64_t k, std::uint64_t n, double sign) {
    const std::uint64_t k_mod = k % (2 * n);
    const std::uint64_t k2 = (k_mod * k_mod) % (2 * n);
    const double phase = sign * kPi * static_cast<double>(k2) / static_cast<double>(n);
    return {std::cos(phase), std::sin(phase)};
}

/// Bluestein's algorithm: forward DFT of arbitrary length via a padded
/// circular convolution evaluated with radix-2 FFTs.
inline std::vector<std::complex<double>> fft_bluestein(
    const std::vector<std::complex<double>>& input) {
    const std::size_t n = input.size();
    std::size_t m = 1;
    while (m < 2 * n - 1) {
        m <<= 1;
    }

    std::vector<std::complex<double>> a(m, {0.0, 0.0});
    std::vector<std::complex<double>> b(m, {0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        const auto w = chirp(k, n, -1.0);
        a[k] = input[k] * w;
        const auto w_conj = std::conj(w);
        b[k] = w_conj;
        if (k != 0) {
            b[m - k] = w_conj;
        }
    }

    fft_radix2(a, false);
    fft_radix2(b, false);
    for (std::size_t i = 0; i < m; ++i) {
        a[i] *= b[i];
    }
    fft_radix2(a, true);

    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = a[k] * chirp(k, n, -1.0);
    }
    return out;
}

}  // namespace detail

/// Forward DFT, X_k = sum_n x_n exp(-2*pi*i*k*n/N), any length.
inline std::vector<std::complex<double>> fft(
    const std::vector<std::complex<double>>& input) {
    if (input.size() < 2) {
        return input;
    }
    if (detail::is_power_of_two(input.size())) {
        auto data = input;
        detail::fft_radix2(data, false);
        return data;
    }
    return detail::fft_bluestein(input);
}

inline std::vector<std::complex<double>> fft_real(const std::vector<double>& input) {
    std::vector<std::complex<double>> data(input.size());
    for (std::size_t i = 0; i < input.size(); ++i) {
        data[i] = {input[i], 0.0};
    }
    return fft(data);
}

}  // namespace bldctune
