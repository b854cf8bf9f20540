#ifndef CVPHY_FUSION_HPP
#define CVPHY_FUSION_HPP

#include <cmath>
#include <stdexcept>

namespace cvphy {

/// Joint-Gaussian model of one scalar symbol from each view.
struct GaussianPairModel {
    double mean1 = 0.0;
    double mean2 = 0.0;
    double var1 = 1.0;
    double var2 = 1.0;
    double correlation = 0.0;

    void validate() const {
        if (!(var1 > 0.0) || !(var2 > 0.0))
            throw std::invalid_argument("GaussianPairModel: variances must be > 0");
        if (std::abs(correlation) > 1.0)
            throw std::invalid_argument("GaussianPairModel: |correlation| must be <= 1");
    }
};

/// sigma_wtilde^2 = sigma_e^2 * sigma_x^2 + sigma_w^2: AWGN plus the noise
/// contributed by the CSI estimation error multiplying the signal.
inline double equivalent_noise(double csi_error_var, double signal_var, double noise_var) {
    if (csi_error_var < 0.0 || signal_var < 0.0 || noise_var < 0.0)
        throw std::invalid_argument("equivalent_noise: negative input");
    return csi_error_var * signal_var + noise_var;
}

/**
 * Scalar observation model for the two views: Z_i = gain_i * X_i + Wtilde_i
 * with gain_i the estimated channel gain and Wtilde_i the equivalent noise
 * combining AWGN and the CSI-error contribution. The two links carry
 * independent SNRs and CSI errors, so every field is per view.
 */
struct ObservationModel {
    double gain1 = 1.0;
    double gain2 = 1.0;
    double csi_error_var1 = 0.0;
    double csi_error_var2 = 0.0;
    double noise_var1 = 0.0;
    double noise_var2 = 0.0;

    double equivalent_noise1(const GaussianPairModel& m) const {
        return equivalent_noise(csi_error_var1, m.var1, noise_var1);
    }
    double equivalent_noise2(const GaussianPairModel& m) const {
        return equivalent_noise(csi_error_var2, m.var2, noise_var2);
    }

    void validate() const {
        if (csi_error_var1 < 0.0 || csi_error_var2 < 0.0 || noise_var1 < 0.0 || noise_var2 < 0.0)
            throw std::invalid_argument("ObservationModel: negative variance");
    }
};

struct PosteriorEstimate {
    double mean = 0.0;
    double variance = 0.0;
};

/**
 * Posterior of X_1 given both received values (Z_1, Z_2): a Gaussian whose
 * mean fuses the own-view innovation with a cross-view correction weighted by
 * the correlation, and whose variance never exceeds the prior variance. With
 * equal equivalent noise on both views this reduces to the single-sigma form;
 * the per-view generalization is exact joint-Gaussian conditioning.
 */
inline PosteriorEstimate posterior_fuse(const GaussianPairModel& model,
                                        const ObservationModel& obs, double z1, double z2) {
    model.validate();
    obs.validate();
    const double s1 = model.var1;
    const double s2 = model.var2;
    const double r = model.correlation;
    const double h1 = obs.gain1;
    const double h2 = obs.gain2;
    const double t1 = obs.equivalent_noise1(model);
    const double t2 = obs.equivalent_noise2(model);
    const double cross = 1.0 - r * r;
    const double sx12 = std::sqrt(s1 * s2);

    const double det = h1 * h1 * h2 * h2 * s1 * s2 * cross + h1 * h1 * s1 * t2 +
                       h2 * h2 * s2 * t1 + t1 * t2;
    if (!(det > 0.0))
        throw std::invalid_argument("posterior_fuse: degenerate observation (zero denominator)");

    const double innov1 = z1 - h1 * model.mean1;
    const double innov2 = z2 - h2 * model.mean2;
    const double coeff1 = h1 * s1 * (h2 * h2 * s2 * cross + t2);
    const double coeff2 = h2 * r * sx12 * t1;

    PosteriorEstimate out;
    out.mean = model.mean1 + (coeff1 * innov1 + coeff2 * innov2) / det;
    const double reduction =
        h1 * h1 * s1 * s1 * (h2 * h2 * s2 * cross + t2) + h2 * h2 * r * r * s1 * s2 * t1;
    out.variance = s1 - reduction / det;
    if (out.variance < 0.0) out.variance = 0.0; // guard rounding at near-exact observation
    return out;
}

/**
 * Correlation coefficient r' between the received values Z_1 and Z_2, using
 * the estimated gains: r' = r s1 s2 / sqrt((s1^2 + t1/g1^2)(s2^2 + t2/g2^2)).
 * A view with zero estimated gain carries no signal; r' = 0 by convention.
 */
inline double noisy_correlation(const GaussianPairModel& model, const ObservationModel& obs) {
    model.validate();
    obs.validate();
    if (obs.gain1 == 0.0 || obs.gain2 == 0.0) return 0.0;
    const double t1 = obs.equivalent_noise1(model);
    const double t2 = obs.equivalent_noise2(model);
    const double d1 = model.var1 + t1 / (obs.gain1 * obs.gain1);
    const double d2 = model.var2 + t2 / (obs.gain2 * obs.gain2);
    return model.correlation * std::sqrt(model.var1) * std::sqrt(model.var2) /
           std::sqrt(d1 * d2);
}

/// Mutual information of a bivariate Gaussian pair with correlation r,
/// in nats: -0.5 ln(1 - r^2). |r| >= 1 would be infinite.
inline double gaussian_mi(double r) {
    if (!(std::abs(r) < 1.0))
        throw std::invalid_argument("gaussian_mi: |r| must be < 1 (finite MI)");
    return -0.5 * std::log(1.0 - r * r);
}

/// Single-view Gaussian MAP/MMSE point estimate (the scalar Wiener solution).
inline double map_estimate_single(double mean, double variance, double gain, double eq_noise,
                                  double z) {
    if (!(variance > 0.0))
        throw std::invalid_argument("map_estimate_single: variance must be > 0");
    if (eq_noise < 0.0)
        throw std::invalid_argument("map_estimate_single: negative equivalent noise");
    const double denom = gain * gain * variance + eq_noise;
    if (denom == 0.0) return mean; // no observation and no noise: fall back to prior
    return (gain * variance * z + eq_noise * mean) / denom;
}

} // namespace cvphy

#endif
