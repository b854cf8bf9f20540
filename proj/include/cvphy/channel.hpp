#ifndef CVPHY_CHANNEL_HPP
#define CVPHY_CHANNEL_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "cvphy/dft.hpp"
#include "cvphy/rng.hpp"
#include "cvphy/signal.hpp"

namespace cvphy {

/**
 * Multipath power-delay profile with exponential decay: tap l carries
 * variance sigma_l^2 proportional to exp(-l/decay), normalized so the tap
 * variances sum to exactly 1.
 */
struct ChannelProfile {
    int num_taps = 1;
    double decay = 1.0;
    std::vector<double> tap_variances;

    static ChannelProfile exponential(int num_taps, double decay) {
        if (num_taps < 1) throw std::invalid_argument("ChannelProfile: num_taps must be >= 1");
        if (!(decay > 0.0)) throw std::invalid_argument("ChannelProfile: decay must be > 0");
        ChannelProfile p;
        p.num_taps = num_taps;
        p.decay = decay;
        p.tap_variances.resize(static_cast<std::size_t>(num_taps));
        double total = 0.0;
        for (int l = 0; l < num_taps; ++l) {
            p.tap_variances[static_cast<std::size_t>(l)] = std::exp(-static_cast<double>(l) / decay);
            total += p.tap_variances[static_cast<std::size_t>(l)];
        }
        for (double& v : p.tap_variances) v /= total;
        return p;
    }
};

/// One block-fading draw: tap coefficients plus the AWGN level applied with them.
struct ChannelRealization {
    ComplexSignal taps;
    double noise_variance = 0.0;
};

/// Per-subcarrier channel estimate with the (reported or modeled) estimation
/// error variance, total over both real dimensions.
struct CsiEstimate {
    ComplexSignal gains;
    double error_variance = 0.0;
};

/// Draw tap coefficients h_l ~ CN(0, sigma_l^2) independently. The returned
/// realization carries noise_variance = 0; callers set the AWGN level.
inline ChannelRealization sample_channel(const ChannelProfile& profile, SeededRng& rng) {
    ChannelRealization ch;
    ch.taps.resize(profile.tap_variances.size());
    for (std::size_t l = 0; l < ch.taps.size(); ++l)
        ch.taps[l] = rng.complex_gaussian(profile.tap_variances[l]);
    return ch;
}

/**
 * z = h * x + w: linear convolution with zero padding, truncated to len(x),
 * plus AWGN of variance noise_variance per complex sample.
 */
inline ComplexSignal apply_channel(const ComplexSignal& x, const ChannelRealization& ch,
                                   SeededRng& rng) {
    validate_signal(x, "apply_channel");
    if (ch.taps.empty()) throw std::invalid_argument("apply_channel: empty taps");
    if (ch.noise_variance < 0.0)
        throw std::invalid_argument("apply_channel: negative noise variance");
    const std::size_t n = x.size();
    const std::size_t num_taps = ch.taps.size();
    ComplexSignal z(n, Complex(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        Complex acc(0.0, 0.0);
        const std::size_t lmax = std::min(num_taps - 1, i);
        for (std::size_t l = 0; l <= lmax; ++l) acc += ch.taps[l] * x[i - l];
        z[i] = acc;
    }
    if (ch.noise_variance > 0.0)
        for (Complex& v : z) v += rng.complex_gaussian(ch.noise_variance);
    return z;
}

/// H_k = DFT of the zero-padded taps, length n_subcarriers.
inline ComplexSignal frequency_response(const ChannelRealization& ch, std::size_t n_subcarriers) {
    if (n_subcarriers < ch.taps.size())
        throw std::invalid_argument("frequency_response: n_subcarriers < number of taps");
    ComplexSignal padded(n_subcarriers, Complex(0.0, 0.0));
    for (std::size_t l = 0; l < ch.taps.size(); ++l) padded[l] = ch.taps[l];
    return dft(padded);
}

/**
 * Least-squares estimate: Hhat_k = mean over pilot symbols of rx[p][k]/tx[p][k].
 * The returned error_variance is 0 (LS alone has no noise model); callers that
 * know the noise level can attach ls_error_variance().
 */
inline CsiEstimate estimate_csi_ls(const ComplexMatrix& pilot_tx, const ComplexMatrix& pilot_rx) {
    if (pilot_tx.rows == 0 || pilot_tx.cols == 0)
        throw std::invalid_argument("estimate_csi_ls: empty pilots");
    if (pilot_tx.rows != pilot_rx.rows || pilot_tx.cols != pilot_rx.cols)
        throw std::invalid_argument("estimate_csi_ls: pilot shape mismatch");
    CsiEstimate est;
    est.gains.assign(pilot_tx.cols, Complex(0.0, 0.0));
    for (std::size_t p = 0; p < pilot_tx.rows; ++p)
        for (std::size_t k = 0; k < pilot_tx.cols; ++k) {
            const Complex t = pilot_tx.at(p, k);
            if (std::norm(t) == 0.0)
                throw std::invalid_argument("estimate_csi_ls: zero pilot sample");
            est.gains[k] += pilot_rx.at(p, k) / t;
        }
    const double inv = 1.0 / static_cast<double>(pilot_tx.rows);
    for (Complex& g : est.gains) g *= inv;
    est.error_variance = 0.0;
    return est;
}

/// Per-subcarrier LS error variance for unit-energy-per-use pilots:
/// noise_variance / (n_pilots * pilot_power), with noise_variance the
/// per-subcarrier (frequency-domain) noise level.
inline double ls_error_variance(double noise_variance, std::size_t n_pilots, double pilot_power) {
    if (n_pilots == 0 || !(pilot_power > 0.0))
        throw std::invalid_argument("ls_error_variance: need pilots with positive power");
    return noise_variance / (static_cast<double>(n_pilots) * pilot_power);
}

namespace detail {

// Per-tap Wiener shrink factors for the tap-domain LMMSE estimator. The
// frequency-domain covariance implied by the power-delay profile diagonalizes
// in the tap domain (the partial DFT columns are orthogonal with norm^2 = Nc),
// so the LMMSE filter reduces to one scalar per tap.
inline std::vector<double> mmse_tap_gains(const ChannelProfile& profile, double ls_err_var,
                                          std::size_t n_subcarriers) {
    const double nc = static_cast<double>(n_subcarriers);
    std::vector<double> g(profile.tap_variances.size());
    for (std::size_t l = 0; l < g.size(); ++l) {
        const double num = profile.tap_variances[l] * nc;
        g[l] = num / (num + ls_err_var + 1e-12); // diagonal loading
    }
    return g;
}

} // namespace detail

/// Modeled per-subcarrier error variance of estimate_csi_mmse (sum of the
/// per-tap posterior variances; identical for every subcarrier).
inline double mmse_error_variance(const ChannelProfile& profile, double ls_err_var,
                                  std::size_t n_subcarriers) {
    const double nc = static_cast<double>(n_subcarriers);
    const double tap_err = ls_err_var / nc;
    double total = 0.0;
    for (double sl2 : profile.tap_variances)
        total += sl2 * tap_err / (sl2 + tap_err + 1e-12 / nc);
    return total;
}

/**
 * Linear MMSE channel estimate using the subcarrier covariance implied by the
 * power-delay profile. Implemented in the tap domain: LS per subcarrier,
 * transform to taps, per-tap Wiener shrink, transform back. noise_variance is
 * the per-subcarrier noise level on the pilot observations.
 */
inline CsiEstimate estimate_csi_mmse(const ComplexMatrix& pilot_tx, const ComplexMatrix& pilot_rx,
                                     const ChannelProfile& profile, double noise_variance) {
    if (noise_variance < 0.0)
        throw std::invalid_argument("estimate_csi_mmse: negative noise variance");
    const CsiEstimate ls = estimate_csi_ls(pilot_tx, pilot_rx);
    const std::size_t nc = ls.gains.size();
    if (nc < profile.tap_variances.size())
        throw std::invalid_argument("estimate_csi_mmse: fewer subcarriers than taps");

    double pilot_power = 0.0;
    for (const Complex& v : pilot_tx.data) pilot_power += std::norm(v);
    pilot_power /= static_cast<double>(pilot_tx.size());
    const double ls_err = ls_error_variance(noise_variance == 0.0 ? 0.0 : noise_variance,
                                            pilot_tx.rows, pilot_power);

    // Tap-domain LS estimate: inverse DFT restricted to the first L bins.
    ComplexSignal taps_time = inverse_dft(ls.gains);
    const std::vector<double> shrink = detail::mmse_tap_gains(profile, ls_err, nc);
    ChannelRealization shrunk;
    shrunk.taps.resize(shrink.size());
    for (std::size_t l = 0; l < shrink.size(); ++l) shrunk.taps[l] = taps_time[l] * shrink[l];

    CsiEstimate est;
    est.gains = frequency_response(shrunk, nc);
    est.error_variance = mmse_error_variance(profile, ls_err, nc);
    return est;
}

/**
 * Synthetic CSI error: Hhat_k = H_k - E_k with E_k circularly-symmetric
 * complex Gaussian of total variance error_variance (the real-Gaussian model
 * is recovered on real inputs by construction).
 */
inline CsiEstimate perturb_csi(const ComplexSignal& true_gains, double error_variance,
                               SeededRng& rng) {
    if (error_variance < 0.0)
        throw std::invalid_argument("perturb_csi: negative error variance");
    validate_signal(true_gains, "perturb_csi");
    CsiEstimate est;
    est.gains = true_gains;
    if (error_variance > 0.0)
        for (Complex& g : est.gains) g -= rng.complex_gaussian(error_variance);
    est.error_variance = error_variance;
    return est;
}

} // namespace cvphy

#endif
