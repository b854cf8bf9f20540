#ifndef CVPHY_TENSOR_HPP
#define CVPHY_TENSOR_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cvphy {

/// Dense C x H x W real tensor, row-major in (channel, row, col).
struct Tensor3 {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> v;

    Tensor3() = default;
    Tensor3(int c, int h, int w, double fill = 0.0)
        : channels(c), height(h), width(w),
          v(static_cast<std::size_t>(c) * h * w, fill) {
        if (c < 1 || h < 1 || w < 1)
            throw std::invalid_argument("Tensor3: dimensions must be >= 1");
    }

    double& at(int c, int i, int j) {
        return v[(static_cast<std::size_t>(c) * height + i) * width + j];
    }
    const double& at(int c, int i, int j) const {
        return v[(static_cast<std::size_t>(c) * height + i) * width + j];
    }

    bool same_shape(const Tensor3& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }

    std::size_t size() const { return v.size(); }
};

using FeatureMap = Tensor3;

inline void check_same_shape(const Tensor3& a, const Tensor3& b, const char* what) {
    if (!a.same_shape(b)) throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

} // namespace cvphy

#endif
