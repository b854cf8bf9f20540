#ifndef CVPHY_DFT_HPP
#define CVPHY_DFT_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "cvphy/signal.hpp"

namespace cvphy {

// DFT convention used everywhere in this library:
//   forward:  X[k] = sum_n x[n] exp(-j 2 pi k n / N)        (unnormalized)
//   inverse:  x[n] = (1/N) sum_k X[k] exp(+j 2 pi k n / N)
// Parseval under this convention: sum |x|^2 == (1/N) sum |X|^2.

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 Cooley-Tukey. sign = -1 forward, +1 inverse
// (without the 1/N factor).
inline void fft_radix2(ComplexSignal& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const Complex wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            Complex w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Complex u = a[i + k];
                const Complex v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Direct O(N^2) transform for non power-of-two lengths.
inline ComplexSignal dft_direct(const ComplexSignal& x, int sign) {
    const std::size_t n = x.size();
    ComplexSignal out(n);
    for (std::size_t k = 0; k < n; ++k) {
        Complex acc(0.0, 0.0);
        for (std::size_t m = 0; m < n; ++m) {
            const double ang =
                sign * 2.0 * M_PI * static_cast<double>(k) * static_cast<double>(m) /
                static_cast<double>(n);
            acc += x[m] * Complex(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

inline ComplexSignal transform(const ComplexSignal& x, int sign) {
    if (x.empty()) throw std::invalid_argument("dft: empty input");
    if (is_power_of_two(x.size())) {
        ComplexSignal a = x;
        fft_radix2(a, sign);
        return a;
    }
    return dft_direct(x, sign);
}

} // namespace detail

/// Unnormalized forward DFT.
inline ComplexSignal dft(const ComplexSignal& x) { return detail::transform(x, -1); }

/// Inverse DFT carrying the 1/N factor, so inverse_dft(dft(x)) == x.
inline ComplexSignal inverse_dft(const ComplexSignal& x) {
    ComplexSignal out = detail::transform(x, +1);
    const double inv = 1.0 / static_cast<double>(out.size());
    for (Complex& v : out) v *= inv;
    return out;
}

} // namespace cvphy

#endif
