#ifndef CVPHY_SIGNAL_HPP
#define CVPHY_SIGNAL_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cvphy {

using Complex = std::complex<double>;

/// One-dimensional sequence of complex baseband samples. Used for both
/// time-domain and frequency-domain signals throughout the library.
using ComplexSignal = std::vector<Complex>;

/// Row-major complex matrix; rows are OFDM symbols, columns subcarriers.
struct ComplexMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    ComplexSignal data;

    ComplexMatrix() = default;
    ComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

    Complex& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const Complex& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::size_t size() const { return data.size(); }
};

inline bool is_finite(const Complex& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}

/// Boundary check for externally supplied signals: nonempty, all samples finite.
inline void validate_signal(const ComplexSignal& x, const char* what) {
    if (x.empty())
        throw std::invalid_argument(std::string(what) + ": empty signal");
    for (const Complex& v : x)
        if (!is_finite(v))
            throw std::invalid_argument(std::string(what) + ": non-finite sample");
}

inline double mean_power(const ComplexSignal& x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (const Complex& v : x) acc += std::norm(v);
    return acc / static_cast<double>(x.size());
}

inline double mean_amplitude(const ComplexSignal& x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (const Complex& v : x) acc += std::abs(v);
    return acc / static_cast<double>(x.size());
}

} // namespace cvphy

#endif
