#ifndef CVPHY_KERNELS_HPP
#define CVPHY_KERNELS_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvphy/linalg.hpp"
#include "cvphy/rng.hpp"
#include "cvphy/tensor.hpp"
#include "cvphy/tensor_io.hpp"

namespace cvphy {

/// K x K convolution kernel, weights indexed (p, q, in_channel, out_channel).
struct Conv2dKernel {
    int k = 1;
    int in_channels = 1;
    int out_channels = 1;
    std::vector<double> w;

    Conv2dKernel() = default;
    Conv2dKernel(int kk, int cin, int cout)
        : k(kk), in_channels(cin), out_channels(cout),
          w(static_cast<std::size_t>(kk) * kk * cin * cout, 0.0) {
        if (kk < 1 || kk % 2 == 0)
            throw std::invalid_argument("Conv2dKernel: kernel size must be odd and >= 1");
        if (cin < 1 || cout < 1)
            throw std::invalid_argument("Conv2dKernel: channel counts must be >= 1");
    }

    double& at(int p, int q, int ci, int co) {
        return w[((static_cast<std::size_t>(p) * k + q) * in_channels + ci) * out_channels + co];
    }
    const double& at(int p, int q, int ci, int co) const {
        return w[((static_cast<std::size_t>(p) * k + q) * in_channels + ci) * out_channels + co];
    }

    static Conv2dKernel random(SeededRng& rng, int k, int cin, int cout) {
        Conv2dKernel f(k, cin, cout);
        for (double& v : f.w) v = rng.gaussian();
        return f;
    }
};

/// y_{i,j} = sum_{p,q,ci} F_{p,q,ci,co} x_{ci, i+p-K/2, j+q-K/2}, zero padded.
inline FeatureMap conv2d(const FeatureMap& x, const Conv2dKernel& f) {
    if (x.channels != f.in_channels)
        throw std::invalid_argument("conv2d: input channels do not match kernel");
    const int half = f.k / 2;
    FeatureMap y(f.out_channels, x.height, x.width);
    for (int co = 0; co < f.out_channels; ++co)
        for (int i = 0; i < x.height; ++i)
            for (int j = 0; j < x.width; ++j) {
                double acc = 0.0;
                for (int p = 0; p < f.k; ++p) {
                    const int ii = i + p - half;
                    if (ii < 0 || ii >= x.height) continue;
                    for (int q = 0; q < f.k; ++q) {
                        const int jj = j + q - half;
                        if (jj < 0 || jj >= x.width) continue;
                        for (int ci = 0; ci < f.in_channels; ++ci)
                            acc += f.at(p, q, ci, co) * x.at(ci, ii, jj);
                    }
                }
                y.at(co, i, j) = acc;
            }
    return y;
}

struct DenseLayer {
    int in_dim = 0;
    int out_dim = 0;
    std::vector<double> w; // row-major [out][in]
    std::vector<double> b;

    DenseLayer() = default;
    DenseLayer(int in, int out)
        : in_dim(in), out_dim(out), w(static_cast<std::size_t>(in) * out, 0.0), b(out, 0.0) {}

    double& weight(int o, int i) { return w[static_cast<std::size_t>(o) * in_dim + i]; }
    const double& weight(int o, int i) const { return w[static_cast<std::size_t>(o) * in_dim + i]; }
};

/// Dense stack with rectifier between layers (linear when a single layer).
struct Mlp {
    std::vector<DenseLayer> layers;

    int in_dim() const { return layers.empty() ? 0 : layers.front().in_dim; }
    int out_dim() const { return layers.empty() ? 0 : layers.back().out_dim; }

    void apply(const std::vector<double>& in, std::vector<double>& out) const {
        std::vector<double> cur = in;
        std::vector<double> next;
        for (std::size_t li = 0; li < layers.size(); ++li) {
            const DenseLayer& l = layers[li];
            if (static_cast<int>(cur.size()) != l.in_dim)
                throw std::invalid_argument("Mlp: input size mismatch");
            next.assign(static_cast<std::size_t>(l.out_dim), 0.0);
            for (int o = 0; o < l.out_dim; ++o) {
                double acc = l.b[static_cast<std::size_t>(o)];
                for (int i = 0; i < l.in_dim; ++i)
                    acc += l.weight(o, i) * cur[static_cast<std::size_t>(i)];
                next[static_cast<std::size_t>(o)] = acc;
            }
            if (li + 1 < layers.size())
                for (double& v : next) v = v > 0.0 ? v : 0.0;
            cur.swap(next);
        }
        out = cur;
    }
};

enum class DwaMode { SoftmaxPair, IndependentSigmoid };
enum class CamSoftmaxAxis { Channel, Spatial };

/// (SNR_1, SNR_2, SCS) triple driving the dynamic weight assignment.
struct DwaInput {
    double snr1_db = 0.0;
    double snr2_db = 0.0;
    double scs = 0.0;

    void validate() const {
        if (scs < 0.0 || scs > 1.0) throw std::invalid_argument("DwaInput: scs must be in [0,1]");
    }
};

/**
 * All learned parameters of the cross-view stage: the 1x1 query/key/value
 * projections, the per-pixel map producing the K^2 shift groups, and the
 * small net behind the dynamic weight assignment.
 */
struct KernelWeights {
    int channels = 1;
    int kernel_size = 1;
    Mat wq, wk, wv; // C x C
    Mlp mlp;        // 3C -> K^2 * C
    Mlp dwa_mlp;    // 3 -> hidden -> 2
    DwaMode dwa_mode = DwaMode::SoftmaxPair;

    void validate() const {
        if (channels < 1) throw std::invalid_argument("KernelWeights: channels must be >= 1");
        if (kernel_size < 1 || kernel_size % 2 == 0)
            throw std::invalid_argument("KernelWeights: kernel size must be odd");
        const auto c = static_cast<std::size_t>(channels);
        if (wq.rows != c || wq.cols != c || wk.rows != c || wk.cols != c || wv.rows != c ||
            wv.cols != c)
            throw std::invalid_argument("KernelWeights: projection shape mismatch");
        if (mlp.in_dim() != 3 * channels ||
            mlp.out_dim() != kernel_size * kernel_size * channels)
            throw std::invalid_argument("KernelWeights: mlp shape mismatch");
        if (dwa_mlp.in_dim() != 3 || dwa_mlp.out_dim() != 2)
            throw std::invalid_argument("KernelWeights: dwa shape mismatch");
    }

    static KernelWeights random(std::uint64_t seed, int channels, int kernel_size,
                                int dwa_hidden = 16);
    static KernelWeights conv_equivalent(const Conv2dKernel& f);

    NamedTensorMap to_tensors() const;
    static KernelWeights from_tensors(const NamedTensorMap& t);
};

inline KernelWeights KernelWeights::random(std::uint64_t seed, int channels, int kernel_size,
                                           int dwa_hidden) {
    SeededRng rng(seed);
    KernelWeights w;
    w.channels = channels;
    w.kernel_size = kernel_size;
    const auto c = static_cast<std::size_t>(channels);
    const double proj_scale = 1.0 / std::sqrt(static_cast<double>(channels));
    w.wq = Mat(c, c);
    w.wk = Mat(c, c);
    w.wv = Mat(c, c);
    for (double& v : w.wq.data) v = rng.gaussian() * proj_scale;
    for (double& v : w.wk.data) v = rng.gaussian() * proj_scale;
    for (double& v : w.wv.data) v = rng.gaussian() * proj_scale;

    DenseLayer fuse(3 * channels, kernel_size * kernel_size * channels);
    const double fuse_scale = 1.0 / std::sqrt(3.0 * channels);
    for (double& v : fuse.w) v = rng.gaussian() * fuse_scale;
    w.mlp.layers.push_back(std::move(fuse));

    DenseLayer d1(3, dwa_hidden);
    DenseLayer d2(dwa_hidden, 2);
    for (double& v : d1.w) v = rng.gaussian() * (1.0 / std::sqrt(3.0));
    for (double& v : d1.b) v = rng.gaussian() * 0.1;
    for (double& v : d2.w) v = rng.gaussian() * (1.0 / std::sqrt(static_cast<double>(dwa_hidden)));
    for (double& v : d2.b) v = rng.gaussian() * 0.1;
    w.dwa_mlp.layers.push_back(std::move(d1));
    w.dwa_mlp.layers.push_back(std::move(d2));
    return w;
}

/**
 * Analytic weight construction realizing a K x K convolution of the first
 * view: W_v = I, W_q = W_k = 0, and the fusion map routes the value block of
 * the concatenated features to shift group (p,q) through the kernel slice
 * F_{p,q}. With these weights cvie(z1, z2) equals conv2d(z1, F) exactly.
 */
inline KernelWeights KernelWeights::conv_equivalent(const Conv2dKernel& f) {
    if (f.in_channels != f.out_channels)
        throw std::invalid_argument("conv_equivalent: kernel must have equal in/out channels");
    const int c = f.in_channels;
    const int k = f.k;
    KernelWeights w;
    w.channels = c;
    w.kernel_size = k;
    w.wq = Mat(static_cast<std::size_t>(c), static_cast<std::size_t>(c));
    w.wk = Mat(static_cast<std::size_t>(c), static_cast<std::size_t>(c));
    w.wv = Mat::identity(static_cast<std::size_t>(c));

    DenseLayer fuse(3 * c, k * k * c);
    for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q)
            for (int ci = 0; ci < c; ++ci)
                for (int co = 0; co < c; ++co)
                    fuse.weight((p * k + q) * c + co, 2 * c + ci) = f.at(p, q, ci, co);
    w.mlp.layers.push_back(std::move(fuse));

    DenseLayer d1(3, 1);
    DenseLayer d2(1, 2);
    w.dwa_mlp.layers.push_back(std::move(d1));
    w.dwa_mlp.layers.push_back(std::move(d2));
    return w;
}

struct QkvProjection {
    FeatureMap q2, k1, v1;
};

namespace detail {

inline FeatureMap project_1x1(const FeatureMap& x, const Mat& w) {
    FeatureMap y(x.channels, x.height, x.width);
    for (int i = 0; i < x.height; ++i)
        for (int j = 0; j < x.width; ++j)
            for (int co = 0; co < x.channels; ++co) {
                double acc = 0.0;
                for (int ci = 0; ci < x.channels; ++ci)
                    acc += w.at(static_cast<std::size_t>(co), static_cast<std::size_t>(ci)) *
                           x.at(ci, i, j);
                y.at(co, i, j) = acc;
            }
    return y;
}

} // namespace detail

/// Query from the second view, key and value from the first, all by 1x1 maps.
inline QkvProjection project_qkv(const FeatureMap& z1, const FeatureMap& z2,
                                 const KernelWeights& w) {
    check_same_shape(z1, z2, "project_qkv");
    w.validate();
    if (z1.channels != w.channels)
        throw std::invalid_argument("project_qkv: channel count does not match weights");
    QkvProjection out;
    out.q2 = detail::project_1x1(z2, w.wq);
    out.k1 = detail::project_1x1(z1, w.wk);
    out.v1 = detail::project_1x1(z1, w.wv);
    return out;
}

/**
 * Reference cross-attention. The per-pixel score q.k is ambiguous about its
 * normalization set; the default treats channels as the attention tokens at
 * each pixel (softmax over channels), the Spatial axis instead attends over
 * all spatial positions with per-pixel channel dot products as scores.
 */
inline FeatureMap cam_reference(const FeatureMap& q2, const FeatureMap& k1, const FeatureMap& v1,
                                CamSoftmaxAxis axis = CamSoftmaxAxis::Channel) {
    check_same_shape(q2, k1, "cam_reference");
    check_same_shape(q2, v1, "cam_reference");
    const int c = q2.channels;
    FeatureMap out(c, q2.height, q2.width);
    if (axis == CamSoftmaxAxis::Channel) {
        std::vector<double> score(static_cast<std::size_t>(c));
        for (int i = 0; i < q2.height; ++i)
            for (int j = 0; j < q2.width; ++j)
                for (int co = 0; co < c; ++co) {
                    double mx = -1e300;
                    for (int ci = 0; ci < c; ++ci) {
                        score[static_cast<std::size_t>(ci)] = q2.at(co, i, j) * k1.at(ci, i, j);
                        mx = std::max(mx, score[static_cast<std::size_t>(ci)]);
                    }
                    double denom = 0.0;
                    for (int ci = 0; ci < c; ++ci) {
                        score[static_cast<std::size_t>(ci)] =
                            std::exp(score[static_cast<std::size_t>(ci)] - mx);
                        denom += score[static_cast<std::size_t>(ci)];
                    }
                    double acc = 0.0;
                    for (int ci = 0; ci < c; ++ci)
                        acc += score[static_cast<std::size_t>(ci)] / denom * v1.at(ci, i, j);
                    out.at(co, i, j) = acc;
                }
        return out;
    }
    // Spatial axis: attend from each query position over every key position.
    const int hw = q2.height * q2.width;
    std::vector<double> score(static_cast<std::size_t>(hw));
    for (int qi = 0; qi < q2.height; ++qi)
        for (int qj = 0; qj < q2.width; ++qj) {
            double mx = -1e300;
            int idx = 0;
            for (int ki = 0; ki < q2.height; ++ki)
                for (int kj = 0; kj < q2.width; ++kj, ++idx) {
                    double dot = 0.0;
                    for (int ch = 0; ch < c; ++ch) dot += q2.at(ch, qi, qj) * k1.at(ch, ki, kj);
                    score[static_cast<std::size_t>(idx)] = dot;
                    mx = std::max(mx, dot);
                }
            double denom = 0.0;
            for (int s = 0; s < hw; ++s) {
                score[static_cast<std::size_t>(s)] = std::exp(score[static_cast<std::size_t>(s)] - mx);
                denom += score[static_cast<std::size_t>(s)];
            }
            for (int ch = 0; ch < c; ++ch) {
                double acc = 0.0;
                idx = 0;
                for (int ki = 0; ki < q2.height; ++ki)
                    for (int kj = 0; kj < q2.width; ++kj, ++idx)
                        acc += score[static_cast<std::size_t>(idx)] / denom * v1.at(ch, ki, kj);
                out.at(ch, qi, qj) = acc;
            }
        }
    return out;
}

/**
 * Spatially shifted copy: out[c,i,j] = x[c, i+dx, j+dy], zero where the read
 * falls outside the map. Shifts that move the whole map out of range are
 * rejected.
 */
inline FeatureMap shift(const FeatureMap& x, int dx, int dy) {
    if (std::abs(dx) >= x.height || std::abs(dy) >= x.width)
        throw std::invalid_argument("shift: displacement exceeds feature map bounds");
    FeatureMap y(x.channels, x.height, x.width);
    for (int ch = 0; ch < x.channels; ++ch)
        for (int i = 0; i < x.height; ++i) {
            const int ii = i + dx;
            if (ii < 0 || ii >= x.height) continue;
            for (int j = 0; j < x.width; ++j) {
                const int jj = j + dy;
                if (jj < 0 || jj >= x.width) continue;
                y.at(ch, i, j) = x.at(ch, ii, jj);
            }
        }
    return y;
}

/**
 * Cross-view information extraction: 1x1 projections of both views, per-pixel
 * concatenation [q2, k1, v1], the fusion map producing K^2 C-channel groups,
 * a spatial shift of group (p,q) by (p-K/2, q-K/2), and summation.
 */
inline FeatureMap cvie(const FeatureMap& z1, const FeatureMap& z2, const KernelWeights& w) {
    const QkvProjection proj = project_qkv(z1, z2, w);
    const int c = w.channels;
    const int k = w.kernel_size;
    const int half = k / 2;
    const int groups = k * k;

    // Per-pixel fused features, all K^2 groups stacked: groups*C x H x W.
    FeatureMap fused(groups * c, z1.height, z1.width);
    std::vector<double> in(static_cast<std::size_t>(3 * c));
    std::vector<double> out_vec;
    for (int i = 0; i < z1.height; ++i)
        for (int j = 0; j < z1.width; ++j) {
            for (int ch = 0; ch < c; ++ch) {
                in[static_cast<std::size_t>(ch)] = proj.q2.at(ch, i, j);
                in[static_cast<std::size_t>(c + ch)] = proj.k1.at(ch, i, j);
                in[static_cast<std::size_t>(2 * c + ch)] = proj.v1.at(ch, i, j);
            }
            w.mlp.apply(in, out_vec);
            for (int g = 0; g < groups; ++g)
                for (int ch = 0; ch < c; ++ch)
                    fused.at(g * c + ch, i, j) = out_vec[static_cast<std::size_t>(g * c + ch)];
        }

    FeatureMap y(c, z1.height, z1.width);
    for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q) {
            const int dx = p - half;
            const int dy = q - half;
            // A shift past the map bounds contributes nothing (zero padding).
            if (std::abs(dx) >= z1.height || std::abs(dy) >= z1.width) continue;
            const int g = p * k + q;
            for (int ch = 0; ch < c; ++ch)
                for (int i = 0; i < z1.height; ++i) {
                    const int ii = i + dx;
                    if (ii < 0 || ii >= z1.height) continue;
                    for (int j = 0; j < z1.width; ++j) {
                        const int jj = j + dy;
                        if (jj < 0 || jj >= z1.width) continue;
                        y.at(ch, i, j) += fused.at(g * c + ch, ii, jj);
                    }
                }
        }
    return y;
}

struct DwaWeights {
    double k1 = 0.0;
    double k2 = 0.0;
};

/// Dynamic weight assignment: (SNR_1, SNR_2, SCS) -> branch weights in [0,1].
inline DwaWeights dwa(const DwaInput& input, const KernelWeights& w) {
    input.validate();
    w.validate();
    std::vector<double> features = {input.snr1_db, input.snr2_db, input.scs};
    std::vector<double> logits;
    w.dwa_mlp.apply(features, logits);
    DwaWeights out;
    if (w.dwa_mode == DwaMode::SoftmaxPair) {
        const double mx = std::max(logits[0], logits[1]);
        const double e1 = std::exp(logits[0] - mx);
        const double e2 = std::exp(logits[1] - mx);
        out.k1 = e1 / (e1 + e2);
        out.k2 = e2 / (e1 + e2);
    } else {
        out.k1 = 1.0 / (1.0 + std::exp(-logits[0]));
        out.k2 = 1.0 / (1.0 + std::exp(-logits[1]));
    }
    return out;
}

/// CCF with the branch weights forced (branch isolation and testing).
inline FeatureMap ccf_with_weights(const FeatureMap& z1, const FeatureMap& z2,
                                   const KernelWeights& w, double k1, double k2) {
    const FeatureMap complementarity = cvie(z1, z2, w);
    // Consistency branch: the same shift-sum pipeline fed by the single-view
    // projections of z1 (the 1x1 convolutions are reused on z1 alone).
    const FeatureMap consistency = cvie(z1, z1, w);
    FeatureMap y(z1.channels, z1.height, z1.width);
    for (std::size_t idx = 0; idx < y.v.size(); ++idx)
        y.v[idx] = k1 * complementarity.v[idx] + k2 * consistency.v[idx];
    return y;
}

/// Complementarity-consistency fusion: cross-view and single-view branches
/// combined with the dynamically assigned weights.
inline FeatureMap ccf(const FeatureMap& z1, const FeatureMap& z2, const KernelWeights& w,
                      const DwaInput& dwa_in) {
    const DwaWeights kw = dwa(dwa_in, w);
    return ccf_with_weights(z1, z2, w, kw.k1, kw.k2);
}

// --- weight container bridging -------------------------------------------

namespace detail {

inline NamedTensor mat_tensor(const Mat& m) {
    NamedTensor t;
    t.dims = {m.rows, m.cols};
    t.data = m.data;
    return t;
}

inline Mat tensor_mat(const NamedTensor& t, const char* name) {
    if (t.dims.size() != 2) throw std::runtime_error(std::string("weights: ") + name + " not 2-D");
    Mat m(static_cast<std::size_t>(t.dims[0]), static_cast<std::size_t>(t.dims[1]));
    m.data = t.data;
    return m;
}

inline void mlp_to_tensors(const Mlp& mlp, const std::string& prefix, NamedTensorMap& out) {
    for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
        const DenseLayer& l = mlp.layers[i];
        NamedTensor wt;
        wt.dims = {static_cast<std::uint64_t>(l.out_dim), static_cast<std::uint64_t>(l.in_dim)};
        wt.data = l.w;
        NamedTensor bt;
        bt.dims = {static_cast<std::uint64_t>(l.out_dim)};
        bt.data = l.b;
        out[prefix + "." + std::to_string(i) + ".weight"] = std::move(wt);
        out[prefix + "." + std::to_string(i) + ".bias"] = std::move(bt);
    }
}

inline Mlp mlp_from_tensors(const NamedTensorMap& t, const std::string& prefix) {
    Mlp mlp;
    for (std::size_t i = 0;; ++i) {
        const auto wi = t.find(prefix + "." + std::to_string(i) + ".weight");
        const auto bi = t.find(prefix + "." + std::to_string(i) + ".bias");
        if (wi == t.end()) break;
        if (bi == t.end() || wi->second.dims.size() != 2)
            throw std::runtime_error("weights: malformed mlp layer in " + prefix);
        DenseLayer l(static_cast<int>(wi->second.dims[1]), static_cast<int>(wi->second.dims[0]));
        l.w = wi->second.data;
        l.b = bi->second.data;
        mlp.layers.push_back(std::move(l));
    }
    if (mlp.layers.empty()) throw std::runtime_error("weights: missing mlp " + prefix);
    return mlp;
}

} // namespace detail

inline NamedTensorMap KernelWeights::to_tensors() const {
    NamedTensorMap out;
    NamedTensor meta;
    meta.dims = {3};
    meta.data = {static_cast<double>(channels), static_cast<double>(kernel_size),
                 dwa_mode == DwaMode::SoftmaxPair ? 0.0 : 1.0};
    out["meta"] = std::move(meta);
    out["wq"] = detail::mat_tensor(wq);
    out["wk"] = detail::mat_tensor(wk);
    out["wv"] = detail::mat_tensor(wv);
    detail::mlp_to_tensors(mlp, "mlp", out);
    detail::mlp_to_tensors(dwa_mlp, "dwa", out);
    return out;
}

inline KernelWeights KernelWeights::from_tensors(const NamedTensorMap& t) {
    const auto meta = t.find("meta");
    if (meta == t.end() || meta->second.data.size() != 3)
        throw std::runtime_error("weights: missing meta tensor");
    KernelWeights w;
    w.channels = static_cast<int>(meta->second.data[0]);
    w.kernel_size = static_cast<int>(meta->second.data[1]);
    w.dwa_mode = meta->second.data[2] == 0.0 ? DwaMode::SoftmaxPair : DwaMode::IndependentSigmoid;
    w.wq = detail::tensor_mat(t.at("wq"), "wq");
    w.wk = detail::tensor_mat(t.at("wk"), "wk");
    w.wv = detail::tensor_mat(t.at("wv"), "wv");
    w.mlp = detail::mlp_from_tensors(t, "mlp");
    w.dwa_mlp = detail::mlp_from_tensors(t, "dwa");
    w.validate();
    return w;
}

inline void save_weights(const KernelWeights& w, const std::string& path) {
    save_tensors(w.to_tensors(), path);
}

inline KernelWeights load_weights(const std::string& path) {
    return KernelWeights::from_tensors(load_tensors(path));
}

} // namespace cvphy

#endif
