#ifndef CVPHY_METRICS_HPP
#define CVPHY_METRICS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cvphy/kernels.hpp"
#include "cvphy/rng.hpp"
#include "cvphy/tensor.hpp"

namespace cvphy {

/// C x H x W pixel tensor with a declared peak value (255 by default).
struct Image {
    Tensor3 pixels;
    double peak = 255.0;

    void validate() const {
        if (!(peak > 0.0)) throw std::invalid_argument("Image: peak must be > 0");
    }
};

inline double mse(const Image& a, const Image& b) {
    check_same_shape(a.pixels, b.pixels, "mse");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.pixels.v.size(); ++i) {
        const double d = a.pixels.v[i] - b.pixels.v[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.pixels.v.size());
}

/// 10 log10(peak^2 / mse); identical images return +infinity.
inline double psnr(const Image& a, const Image& b, double peak) {
    if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be > 0");
    const double d = mse(a, b);
    if (d == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / d);
}

inline double psnr(const Image& a, const Image& b) { return psnr(a, b, a.peak); }

namespace detail {

struct WindowStats {
    double mean_a = 0.0, mean_b = 0.0, var_a = 0.0, var_b = 0.0, cov = 0.0;
};

// Statistics over one (channel, block) window; partial border blocks included.
inline WindowStats window_stats(const Tensor3& a, const Tensor3& b, int c, int i0, int j0,
                                int win) {
    WindowStats s;
    const int i1 = std::min(i0 + win, a.height);
    const int j1 = std::min(j0 + win, a.width);
    const double n = static_cast<double>((i1 - i0) * (j1 - j0));
    for (int i = i0; i < i1; ++i)
        for (int j = j0; j < j1; ++j) {
            s.mean_a += a.at(c, i, j);
            s.mean_b += b.at(c, i, j);
        }
    s.mean_a /= n;
    s.mean_b /= n;
    for (int i = i0; i < i1; ++i)
        for (int j = j0; j < j1; ++j) {
            const double da = a.at(c, i, j) - s.mean_a;
            const double db = b.at(c, i, j) - s.mean_b;
            s.var_a += da * da;
            s.var_b += db * db;
            s.cov += da * db;
        }
    s.var_a /= n;
    s.var_b /= n;
    s.cov /= n;
    return s;
}

// 2x average-pool downsampling (odd trailing rows/columns pooled partially).
inline Image downsample2(const Image& img) {
    const Tensor3& x = img.pixels;
    const int h = (x.height + 1) / 2;
    const int w = (x.width + 1) / 2;
    Image out;
    out.peak = img.peak;
    out.pixels = Tensor3(x.channels, h, w);
    for (int c = 0; c < x.channels; ++c)
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                double acc = 0.0;
                int cnt = 0;
                for (int di = 0; di < 2; ++di)
                    for (int dj = 0; dj < 2; ++dj) {
                        const int ii = 2 * i + di;
                        const int jj = 2 * j + dj;
                        if (ii < x.height && jj < x.width) {
                            acc += x.at(c, ii, jj);
                            ++cnt;
                        }
                    }
                out.pixels.at(c, i, j) = acc / cnt;
            }
    return out;
}

} // namespace detail

/**
 * Mean SSIM over non-overlapping windows (per channel, pooled across all
 * channels). c1 and c2 are the usual stabilizers; the convenience overload
 * derives them from the declared peak as (0.01 peak)^2 and (0.03 peak)^2.
 */
inline double ssim(const Image& a, const Image& b, double c1, double c2, int window) {
    check_same_shape(a.pixels, b.pixels, "ssim");
    if (window < 1) throw std::invalid_argument("ssim: window must be >= 1");
    if (window > a.pixels.height || window > a.pixels.width)
        throw std::invalid_argument("ssim: window larger than image");
    double total = 0.0;
    long count = 0;
    for (int c = 0; c < a.pixels.channels; ++c)
        for (int i0 = 0; i0 < a.pixels.height; i0 += window)
            for (int j0 = 0; j0 < a.pixels.width; j0 += window) {
                const detail::WindowStats s =
                    detail::window_stats(a.pixels, b.pixels, c, i0, j0, window);
                const double num = (2.0 * s.mean_a * s.mean_b + c1) * (2.0 * s.cov + c2);
                const double den = (s.mean_a * s.mean_a + s.mean_b * s.mean_b + c1) *
                                   (s.var_a + s.var_b + c2);
                total += num / den;
                ++count;
            }
    return total / static_cast<double>(count);
}

inline double ssim(const Image& a, const Image& b, int window = 8) {
    a.validate();
    const double c1 = (0.01 * a.peak) * (0.01 * a.peak);
    const double c2 = (0.03 * a.peak) * (0.03 * a.peak);
    return ssim(a, b, c1, c2, window);
}

/**
 * Unweighted geometric mean of SSIM over `scales` dyadic scales with 2x
 * average-pool downsampling between them. A negative product keeps its sign
 * (sgn(prod) |prod|^(1/M)), so the value stays in [-1, 1] and the single-scale
 * case reduces to ssim exactly.
 */
inline double ms_ssim(const Image& a, const Image& b, int scales, int window = 8) {
    if (scales < 1) throw std::invalid_argument("ms_ssim: scales must be >= 1");
    check_same_shape(a.pixels, b.pixels, "ms_ssim");
    const int shrink = 1 << (scales - 1);
    if (a.pixels.height / shrink < 1 || a.pixels.width / shrink < 1)
        throw std::invalid_argument("ms_ssim: image too small for the requested scales");
    Image ca = a;
    Image cb = b;
    double product = 1.0;
    for (int s = 0; s < scales; ++s) {
        const int win = std::min({window, ca.pixels.height, ca.pixels.width});
        product *= ssim(ca, cb, win);
        if (s + 1 < scales) {
            ca = detail::downsample2(ca);
            cb = detail::downsample2(cb);
        }
    }
    const double sign = product < 0.0 ? -1.0 : 1.0;
    return sign * std::pow(std::abs(product), 1.0 / static_cast<double>(scales));
}

/// One feature stage: a convolution (rectified) plus per-channel weights.
struct ExtractorLayer {
    Conv2dKernel conv;
    std::vector<double> channel_weights;
};

/**
 * Pluggable feature extractor for the perceptual distance. Layers apply in
 * sequence; features of layer i are the rectified outputs. Pretrained
 * perceptual weights are out of scope; the seeded extractor exists to
 * exercise the formula deterministically.
 */
struct FeatureExtractor {
    std::vector<ExtractorLayer> layers;

    /// Single identity layer with unit weights: lpips == channels * mse.
    static FeatureExtractor identity(int channels) {
        FeatureExtractor fx;
        ExtractorLayer l;
        l.conv = Conv2dKernel(1, channels, channels);
        for (int c = 0; c < channels; ++c) l.conv.at(0, 0, c, c) = 1.0;
        l.channel_weights.assign(static_cast<std::size_t>(channels), 1.0);
        fx.layers.push_back(std::move(l));
        return fx;
    }

    /// Three fixed random-seeded 3x3 convolution layers.
    static FeatureExtractor seeded(std::uint64_t seed, int in_channels, int feature_channels = 4) {
        SeededRng rng(seed);
        FeatureExtractor fx;
        int cin = in_channels;
        for (int i = 0; i < 3; ++i) {
            ExtractorLayer l;
            l.conv = Conv2dKernel::random(rng, 3, cin, feature_channels);
            const double scale = 1.0 / std::sqrt(9.0 * cin);
            for (double& v : l.conv.w) v *= scale;
            l.channel_weights.resize(static_cast<std::size_t>(feature_channels));
            for (double& v : l.channel_weights) v = 0.5 + rng.uniform();
            fx.layers.push_back(std::move(l));
            cin = feature_channels;
        }
        return fx;
    }
};

namespace detail {

inline FeatureMap relu(FeatureMap x) {
    for (double& v : x.v) v = v > 0.0 ? v : 0.0;
    return x;
}

} // namespace detail

/**
 * Perceptual distance: sum over layers of the spatially averaged squared
 * channel-weighted feature difference,
 *   sum_i 1/(H_i W_i) sum_{h,w} | w_i o (y_i - yhat_i) |^2.
 */
inline double lpips(const Image& a, const Image& b, const FeatureExtractor& fx) {
    check_same_shape(a.pixels, b.pixels, "lpips");
    if (fx.layers.empty()) throw std::invalid_argument("lpips: extractor has no layers");
    FeatureMap fa = a.pixels;
    FeatureMap fb = b.pixels;
    double total = 0.0;
    for (const ExtractorLayer& layer : fx.layers) {
        if (fa.channels != layer.conv.in_channels)
            throw std::invalid_argument("lpips: extractor incompatible with image channels");
        fa = detail::relu(conv2d(fa, layer.conv));
        fb = detail::relu(conv2d(fb, layer.conv));
        if (static_cast<int>(layer.channel_weights.size()) != fa.channels)
            throw std::invalid_argument("lpips: channel weight length mismatch");
        double layer_acc = 0.0;
        for (int i = 0; i < fa.height; ++i)
            for (int j = 0; j < fa.width; ++j)
                for (int c = 0; c < fa.channels; ++c) {
                    const double d =
                        layer.channel_weights[static_cast<std::size_t>(c)] *
                        (fa.at(c, i, j) - fb.at(c, i, j));
                    layer_acc += d * d;
                }
        total += layer_acc / static_cast<double>(fa.height * fa.width);
    }
    return total;
}

} // namespace cvphy

#endif
