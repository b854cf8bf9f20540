#ifndef CVPHY_HARNESS_HPP
#define CVPHY_HARNESS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvphy/channel.hpp"
#include "cvphy/config.hpp"
#include "cvphy/csv.hpp"
#include "cvphy/fusion.hpp"
#include "cvphy/info.hpp"
#include "cvphy/ofdm.hpp"
#include "cvphy/rng.hpp"

namespace cvphy {

// Conventions used throughout the harness:
//  - SNR is defined per subcarrier: the per-subcarrier noise variance is
//    sigma_w^2 = P_total * 10^(-SNR/10) (E|H|^2 = 1 by profile
//    normalization), and the time-domain AWGN added by apply_channel is
//    sigma_w^2 / N_c so the DFT at the receiver restores it.
//  - Decoding is per subcarrier after derotating by the estimated phase:
//    real and imaginary parts are treated as independent real channels with
//    gain |Hhat_k|. Per real dimension the prior variance is P_total/2, the
//    AWGN variance sigma_w^2/2, and the equivalent noise uses the total
//    complex CSI-error variance (the product of a circular error with the
//    signal spreads evenly over both real dimensions).

/// Everything measured in one Monte Carlo trial.
struct TrialRecord {
    long trial = 0;
    double snr1_db = 0.0, snr2_db = 0.0;
    double mse1 = 0.0, mse2 = 0.0;                  // per real dimension
    double theory_var1 = 0.0, theory_var2 = 0.0;    // posterior variance, mean over subcarriers
    double correlation = 0.0;                       // configured source correlation
    double r_prime = 0.0;                           // mean over subcarriers
    double corr_empirical = 0.0;                    // pooled over this trial's samples
    double scs_value = 0.0;                         // of the equalized received symbols
    double papr1_db = 0.0, papr1_clipped_db = 0.0;
    double papr2_db = 0.0, papr2_clipped_db = 0.0;
    double csi_model_var1 = 0.0, csi_model_var2 = 0.0;      // modeled sigma_e^2
    double csi_measured_mse1 = 0.0, csi_measured_mse2 = 0.0; // mean |Hhat - H|^2
    long n_samples = 0;                             // decoded real dimensions per view
};

namespace detail {

struct TrialSetup {
    ChannelProfile profile;
    OfdmFrameConfig frame1, frame2;
    double power1 = 0.5, power2 = 0.5;
    double correlation = 0.0;
    double rho = std::numeric_limits<double>::infinity();
    CsiMode mode = CsiMode::Perfect;
    double synthetic_var = 0.0;
    // When >= 0 both views use this fixed SNR instead of a uniform draw.
    double forced_snr_db = std::numeric_limits<double>::quiet_NaN();
    double snr_low_db = -8.0, snr_high_db = 2.0;
};

inline TrialSetup make_setup(const ExperimentConfig& cfg, int pilot_override = 0) {
    cfg.validate();
    TrialSetup s;
    s.profile = ChannelProfile::exponential(cfg.num_taps, cfg.decay);
    const int np = pilot_override > 0 ? pilot_override : cfg.n_pilot_symbols;
    s.frame1 = OfdmFrameConfig::with_default_pilots(
        static_cast<std::size_t>(cfg.n_info_symbols), static_cast<std::size_t>(np),
        static_cast<std::size_t>(cfg.n_subcarriers), static_cast<std::size_t>(cfg.cp_length),
        std::sqrt(cfg.power1));
    s.frame2 = OfdmFrameConfig::with_default_pilots(
        static_cast<std::size_t>(cfg.n_info_symbols), static_cast<std::size_t>(np),
        static_cast<std::size_t>(cfg.n_subcarriers), static_cast<std::size_t>(cfg.cp_length),
        std::sqrt(cfg.power2), kPilotSeed + 1);
    s.power1 = cfg.power1;
    s.power2 = cfg.power2;
    s.correlation = cfg.correlation;
    s.rho = cfg.clip_ratio;
    s.mode = cfg.csi_mode;
    s.synthetic_var = cfg.csi_error_variance;
    s.snr_low_db = cfg.snr_low_db;
    s.snr_high_db = cfg.snr_high_db;
    return s;
}

struct ViewState {
    ComplexMatrix tx_freq;      // power-normalized frequency symbols
    OfdmDemodResult rx;         // demodulated data + pilots
    CsiEstimate csi;
    ComplexSignal true_gains;
    double noise_var_sub = 0.0; // per-subcarrier noise variance
    double papr_db = 0.0, papr_clipped_db = 0.0;
    double csi_measured_mse = 0.0;
};

inline ViewState transmit_view(const ComplexMatrix& x_raw, const OfdmFrameConfig& frame,
                               const ChannelProfile& profile, double p_total, double snr_db,
                               double rho, CsiMode mode, double synthetic_var,
                               SeededRng& rng_channel, SeededRng& rng_noise,
                               SeededRng& rng_csi) {
    ViewState v;
    v.tx_freq = power_normalize(x_raw, p_total);
    const OfdmPacket pkt = ofdm_modulate(v.tx_freq, frame);
    v.papr_db = papr(pkt).db;
    const OfdmPacket clipped = clip(pkt, rho);
    v.papr_clipped_db = papr(clipped).db;

    v.noise_var_sub = p_total * std::pow(10.0, -snr_db / 10.0);
    ChannelRealization ch = sample_channel(profile, rng_channel);
    ch.noise_variance = v.noise_var_sub / static_cast<double>(frame.n_subcarriers);
    const ComplexSignal rx_samples = apply_channel(clipped.samples, ch, rng_noise);
    v.rx = ofdm_demodulate(make_packet(frame, rx_samples), frame);

    v.true_gains = frequency_response(ch, frame.n_subcarriers);
    const double pilot_power = mean_power(frame.pilot_values.data);
    switch (mode) {
        case CsiMode::Perfect:
            v.csi.gains = v.true_gains;
            v.csi.error_variance = 0.0;
            break;
        case CsiMode::Ls:
            v.csi = estimate_csi_ls(frame.pilot_values, v.rx.pilots);
            v.csi.error_variance =
                ls_error_variance(v.noise_var_sub, frame.n_pilot_symbols, pilot_power);
            break;
        case CsiMode::Mmse:
            v.csi = estimate_csi_mmse(frame.pilot_values, v.rx.pilots, profile, v.noise_var_sub);
            break;
        case CsiMode::Synthetic:
            v.csi = perturb_csi(v.true_gains, synthetic_var, rng_csi);
            break;
    }
    double err = 0.0;
    for (std::size_t k = 0; k < v.true_gains.size(); ++k)
        err += std::norm(v.csi.gains[k] - v.true_gains[k]);
    v.csi_measured_mse = err / static_cast<double>(v.true_gains.size());
    return v;
}

inline TrialRecord run_trial(const TrialSetup& setup, long trial, const SeededRng& master) {
    SeededRng trial_rng = master.split(static_cast<std::uint64_t>(trial));
    SeededRng rng_snr = trial_rng.split(0);
    SeededRng rng_source = trial_rng.split(1);
    SeededRng rng_ch1 = trial_rng.split(2);
    SeededRng rng_ch2 = trial_rng.split(3);
    SeededRng rng_n1 = trial_rng.split(4);
    SeededRng rng_n2 = trial_rng.split(5);
    SeededRng rng_csi1 = trial_rng.split(6);
    SeededRng rng_csi2 = trial_rng.split(7);

    TrialRecord rec;
    rec.trial = trial;
    rec.correlation = setup.correlation;
    if (std::isnan(setup.forced_snr_db)) {
        rec.snr1_db = rng_snr.uniform(setup.snr_low_db, setup.snr_high_db);
        rec.snr2_db = rng_snr.uniform(setup.snr_low_db, setup.snr_high_db);
    } else {
        rec.snr1_db = setup.forced_snr_db;
        rec.snr2_db = setup.forced_snr_db;
    }

    const std::size_t ns = setup.frame1.n_info_symbols;
    const std::size_t nc = setup.frame1.n_subcarriers;
    const double r = setup.correlation;
    const double rc = std::sqrt(std::max(0.0, 1.0 - r * r));

    // Jointly Gaussian, zero-mean symbols: real and imaginary parts are
    // independent real channels, each correlated r across views.
    ComplexMatrix x1(ns, nc);
    ComplexMatrix x2(ns, nc);
    for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t k = 0; k < nc; ++k) {
            const double a1 = rng_source.gaussian();
            const double a2 = r * a1 + rc * rng_source.gaussian();
            const double b1 = rng_source.gaussian();
            const double b2 = r * b1 + rc * rng_source.gaussian();
            x1.at(s, k) = Complex(a1, b1);
            x2.at(s, k) = Complex(a2, b2);
        }

    const ViewState v1 =
        transmit_view(x1, setup.frame1, setup.profile, setup.power1, rec.snr1_db, setup.rho,
                      setup.mode, setup.synthetic_var, rng_ch1, rng_n1, rng_csi1);
    const ViewState v2 =
        transmit_view(x2, setup.frame2, setup.profile, setup.power2, rec.snr2_db, setup.rho,
                      setup.mode, setup.synthetic_var, rng_ch2, rng_n2, rng_csi2);

    rec.papr1_db = v1.papr_db;
    rec.papr1_clipped_db = v1.papr_clipped_db;
    rec.papr2_db = v2.papr_db;
    rec.papr2_clipped_db = v2.papr_clipped_db;
    rec.csi_model_var1 = v1.csi.error_variance;
    rec.csi_model_var2 = v2.csi.error_variance;
    rec.csi_measured_mse1 = v1.csi_measured_mse;
    rec.csi_measured_mse2 = v2.csi_measured_mse;

    const GaussianPairModel model12{0.0, 0.0, setup.power1 / 2.0, setup.power2 / 2.0, r};
    const GaussianPairModel model21{0.0, 0.0, setup.power2 / 2.0, setup.power1 / 2.0, r};

    double err1 = 0.0, err2 = 0.0;
    double theory1 = 0.0, theory2 = 0.0, rp_acc = 0.0;
    double c_z1 = 0.0, c_z2 = 0.0, c_z11 = 0.0, c_z22 = 0.0, c_z12 = 0.0;
    ComplexSignal eq1, eq2;
    eq1.reserve(ns * nc);
    eq2.reserve(ns * nc);

    for (std::size_t k = 0; k < nc; ++k) {
        const Complex g1 = v1.csi.gains[k];
        const Complex g2 = v2.csi.gains[k];
        ObservationModel obs12;
        obs12.gain1 = std::abs(g1);
        obs12.gain2 = std::abs(g2);
        obs12.csi_error_var1 = v1.csi.error_variance;
        obs12.csi_error_var2 = v2.csi.error_variance;
        obs12.noise_var1 = v1.noise_var_sub / 2.0;
        obs12.noise_var2 = v2.noise_var_sub / 2.0;
        ObservationModel obs21;
        obs21.gain1 = obs12.gain2;
        obs21.gain2 = obs12.gain1;
        obs21.csi_error_var1 = obs12.csi_error_var2;
        obs21.csi_error_var2 = obs12.csi_error_var1;
        obs21.noise_var1 = obs12.noise_var2;
        obs21.noise_var2 = obs12.noise_var1;

        theory1 += posterior_fuse(model12, obs12, 0.0, 0.0).variance;
        theory2 += posterior_fuse(model21, obs21, 0.0, 0.0).variance;
        rp_acc += noisy_correlation(model12, obs12);

        const Complex rot1 = obs12.gain1 > 0.0 ? std::conj(g1) / obs12.gain1 : Complex(1.0, 0.0);
        const Complex rot2 = obs12.gain2 > 0.0 ? std::conj(g2) / obs12.gain2 : Complex(1.0, 0.0);

        for (std::size_t s = 0; s < ns; ++s) {
            const Complex z1 = v1.rx.data.at(s, k) * rot1;
            const Complex z2 = v2.rx.data.at(s, k) * rot2;
            const Complex t1 = v1.tx_freq.at(s, k);
            const Complex t2 = v2.tx_freq.at(s, k);

            const double e1r = posterior_fuse(model12, obs12, z1.real(), z2.real()).mean - t1.real();
            const double e1i = posterior_fuse(model12, obs12, z1.imag(), z2.imag()).mean - t1.imag();
            const double e2r = posterior_fuse(model21, obs21, z2.real(), z1.real()).mean - t2.real();
            const double e2i = posterior_fuse(model21, obs21, z2.imag(), z1.imag()).mean - t2.imag();
            err1 += e1r * e1r + e1i * e1i;
            err2 += e2r * e2r + e2i * e2i;

            for (int dim = 0; dim < 2; ++dim) {
                const double u = dim == 0 ? z1.real() : z1.imag();
                const double w = dim == 0 ? z2.real() : z2.imag();
                c_z1 += u;
                c_z2 += w;
                c_z11 += u * u;
                c_z22 += w * w;
                c_z12 += u * w;
            }
            eq1.push_back(v1.rx.data.at(s, k) / (g1 == Complex(0.0, 0.0) ? Complex(1e-300, 0) : g1));
            eq2.push_back(v2.rx.data.at(s, k) / (g2 == Complex(0.0, 0.0) ? Complex(1e-300, 0) : g2));
        }
    }

    const double n_dims = static_cast<double>(ns * nc * 2);
    rec.mse1 = err1 / n_dims;
    rec.mse2 = err2 / n_dims;
    rec.theory_var1 = theory1 / static_cast<double>(nc);
    rec.theory_var2 = theory2 / static_cast<double>(nc);
    rec.r_prime = rp_acc / static_cast<double>(nc);
    const double m1 = c_z1 / n_dims;
    const double m2 = c_z2 / n_dims;
    const double var1 = c_z11 / n_dims - m1 * m1;
    const double var2 = c_z22 / n_dims - m2 * m2;
    const double cov = c_z12 / n_dims - m1 * m2;
    rec.corr_empirical = (var1 > 0.0 && var2 > 0.0) ? cov / std::sqrt(var1 * var2) : 0.0;
    rec.scs_value = scs(eq1, eq2);
    rec.n_samples = static_cast<long>(n_dims);
    return rec;
}

} // namespace detail

/**
 * The end-to-end toy pipeline: correlated Gaussian symbols, power-constrained
 * identity encoding, OFDM with optional clipping, independent fading links at
 * independently drawn SNRs, CSI estimation per the configured mode, and
 * per-subcarrier Bayesian fusion decoding of each view against the other.
 */
inline std::vector<TrialRecord> run_toy_pipeline(const ExperimentConfig& cfg, SeededRng& rng) {
    const detail::TrialSetup setup = detail::make_setup(cfg);
    std::vector<TrialRecord> out;
    out.reserve(static_cast<std::size_t>(cfg.trials));
    for (long t = 0; t < cfg.trials; ++t) out.push_back(detail::run_trial(setup, t, rng));
    return out;
}

inline std::vector<TrialRecord> run_toy_pipeline(const ExperimentConfig& cfg) {
    SeededRng rng(cfg.seed);
    return run_toy_pipeline(cfg, rng);
}

struct ScsSweepPoint {
    double snr_db = 0.0;
    double mean_scs = 0.0;
    long trials = 0;
};

/// Mean SCS of the equalized received representations over an SNR grid,
/// both views transmitted at the grid SNR.
inline std::vector<ScsSweepPoint> sweep_scs_vs_snr(const ExperimentConfig& cfg) {
    detail::TrialSetup setup = detail::make_setup(cfg);
    SeededRng master(cfg.seed);
    std::vector<ScsSweepPoint> out;
    for (std::size_t gi = 0; gi < cfg.snr_grid_db.size(); ++gi) {
        setup.forced_snr_db = cfg.snr_grid_db[gi];
        const SeededRng point_rng = master.split(gi);
        double acc = 0.0;
        for (long t = 0; t < cfg.trials; ++t)
            acc += detail::run_trial(setup, t, point_rng).scs_value;
        out.push_back({cfg.snr_grid_db[gi], acc / static_cast<double>(cfg.trials),
                       cfg.trials});
    }
    return out;
}

struct PaprSweepRecord {
    double rho = 0.0; // +inf for the unclipped reference
    long trial = 0;
    double papr1_db = 0.0, papr2_db = 0.0; // after clipping at rho
    double mse1 = 0.0, mse2 = 0.0;
};

/// PAPR samples and decode MSE for each configured clipping ratio plus the
/// unclipped reference. Trials are paired across ratios (identical sources,
/// channels, and noise), so differences isolate the clipping effect.
inline std::vector<PaprSweepRecord> sweep_papr(const ExperimentConfig& cfg) {
    detail::TrialSetup setup = detail::make_setup(cfg);
    SeededRng master(cfg.seed);
    std::vector<double> ratios = cfg.clip_ratios;
    ratios.push_back(std::numeric_limits<double>::infinity());
    std::vector<PaprSweepRecord> out;
    for (double rho : ratios) {
        setup.rho = rho;
        for (long t = 0; t < cfg.trials; ++t) {
            const TrialRecord rec = detail::run_trial(setup, t, master);
            PaprSweepRecord row;
            row.rho = rho;
            row.trial = t;
            row.papr1_db = rec.papr1_clipped_db;
            row.papr2_db = rec.papr2_clipped_db;
            row.mse1 = rec.mse1;
            row.mse2 = rec.mse2;
            out.push_back(row);
        }
    }
    return out;
}

struct CsiSweepRecord {
    CsiMode mode = CsiMode::Ls;
    double param = 0.0; // pilot count (ls/mmse) or synthetic sigma_e^2
    double csi_mse1 = 0.0, csi_mse2 = 0.0; // measured mean |Hhat - H|^2
    double mse1 = 0.0, mse2 = 0.0;         // decode MSE per real dimension
    double r_prime_theory = 0.0;
    double r_prime_empirical = 0.0;
    long trials = 0;
};

/**
 * CSI-error sweep. In ls/mmse modes the pilot count runs over
 * cfg.pilot_counts and both estimators are evaluated on identical
 * transmissions; in synthetic mode the configured error variances are swept.
 */
inline std::vector<CsiSweepRecord> sweep_csi_error(const ExperimentConfig& cfg) {
    SeededRng master(cfg.seed);
    std::vector<CsiSweepRecord> out;
    auto aggregate = [&](detail::TrialSetup& setup, CsiMode mode, double param) {
        setup.mode = mode;
        CsiSweepRecord row;
        row.mode = mode;
        row.param = param;
        row.trials = cfg.trials;
        double rp_emp_acc = 0.0;
        for (long t = 0; t < cfg.trials; ++t) {
            const TrialRecord rec = detail::run_trial(setup, t, master);
            row.csi_mse1 += rec.csi_measured_mse1;
            row.csi_mse2 += rec.csi_measured_mse2;
            row.mse1 += rec.mse1;
            row.mse2 += rec.mse2;
            row.r_prime_theory += rec.r_prime;
            rp_emp_acc += rec.corr_empirical;
        }
        const double n = static_cast<double>(cfg.trials);
        row.csi_mse1 /= n;
        row.csi_mse2 /= n;
        row.mse1 /= n;
        row.mse2 /= n;
        row.r_prime_theory /= n;
        row.r_prime_empirical = rp_emp_acc / n;
        out.push_back(row);
    };

    if (cfg.csi_mode == CsiMode::Synthetic) {
        detail::TrialSetup setup = detail::make_setup(cfg);
        for (double var : cfg.csi_error_variances) {
            setup.synthetic_var = var;
            aggregate(setup, CsiMode::Synthetic, var);
        }
    } else {
        for (int np : cfg.pilot_counts) {
            detail::TrialSetup setup = detail::make_setup(cfg, np);
            aggregate(setup, CsiMode::Ls, static_cast<double>(np));
            aggregate(setup, CsiMode::Mmse, static_cast<double>(np));
        }
    }
    return out;
}

/// Replay a trial's draws and return the packet a view actually transmits
/// (after power normalization and clipping). Useful for packet export.
inline OfdmPacket transmitted_packet(const ExperimentConfig& cfg, long trial, int view) {
    if (view != 1 && view != 2) throw std::invalid_argument("transmitted_packet: view is 1 or 2");
    const detail::TrialSetup setup = detail::make_setup(cfg);
    SeededRng master(cfg.seed);
    SeededRng trial_rng = master.split(static_cast<std::uint64_t>(trial));
    SeededRng rng_source = trial_rng.split(1);
    const std::size_t ns = setup.frame1.n_info_symbols;
    const std::size_t nc = setup.frame1.n_subcarriers;
    const double r = setup.correlation;
    const double rc = std::sqrt(std::max(0.0, 1.0 - r * r));
    ComplexMatrix x1(ns, nc);
    ComplexMatrix x2(ns, nc);
    for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t k = 0; k < nc; ++k) {
            const double a1 = rng_source.gaussian();
            const double a2 = r * a1 + rc * rng_source.gaussian();
            const double b1 = rng_source.gaussian();
            const double b2 = r * b1 + rc * rng_source.gaussian();
            x1.at(s, k) = Complex(a1, b1);
            x2.at(s, k) = Complex(a2, b2);
        }
    const ComplexMatrix& x = view == 1 ? x1 : x2;
    const OfdmFrameConfig& frame = view == 1 ? setup.frame1 : setup.frame2;
    const double power = view == 1 ? setup.power1 : setup.power2;
    return clip(ofdm_modulate(power_normalize(x, power), frame), setup.rho);
}

// --- CSV emission ----------------------------------------------------------

inline CsvTable to_table(const std::vector<TrialRecord>& records) {
    CsvTable t;
    t.header = {"trial", "snr1_db", "snr2_db", "mse1", "mse2", "theory_var1", "theory_var2",
                "correlation", "r_prime", "corr_empirical", "scs",
                "papr1_db", "papr1_clipped_db", "papr2_db", "papr2_clipped_db",
                "csi_model_var1", "csi_model_var2", "csi_measured_mse1", "csi_measured_mse2",
                "n_samples"};
    for (const TrialRecord& r : records)
        t.rows.push_back({static_cast<double>(r.trial), r.snr1_db, r.snr2_db, r.mse1, r.mse2,
                          r.theory_var1, r.theory_var2, r.correlation, r.r_prime,
                          r.corr_empirical, r.scs_value, r.papr1_db, r.papr1_clipped_db,
                          r.papr2_db, r.papr2_clipped_db, r.csi_model_var1, r.csi_model_var2,
                          r.csi_measured_mse1, r.csi_measured_mse2,
                          static_cast<double>(r.n_samples)});
    return t;
}

inline void emit_csv(const std::vector<TrialRecord>& records, const std::string& path) {
    write_csv(to_table(records), path);
}

inline std::vector<TrialRecord> parse_trial_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    if (t.header != to_table({}).header)
        throw std::runtime_error("parse_trial_csv: unexpected header in " + path);
    std::vector<TrialRecord> out;
    for (const auto& row : t.rows) {
        TrialRecord r;
        std::size_t i = 0;
        r.trial = static_cast<long>(row[i++]);
        r.snr1_db = row[i++];
        r.snr2_db = row[i++];
        r.mse1 = row[i++];
        r.mse2 = row[i++];
        r.theory_var1 = row[i++];
        r.theory_var2 = row[i++];
        r.correlation = row[i++];
        r.r_prime = row[i++];
        r.corr_empirical = row[i++];
        r.scs_value = row[i++];
        r.papr1_db = row[i++];
        r.papr1_clipped_db = row[i++];
        r.papr2_db = row[i++];
        r.papr2_clipped_db = row[i++];
        r.csi_model_var1 = row[i++];
        r.csi_model_var2 = row[i++];
        r.csi_measured_mse1 = row[i++];
        r.csi_measured_mse2 = row[i++];
        r.n_samples = static_cast<long>(row[i++]);
        out.push_back(r);
    }
    return out;
}

inline CsvTable to_table(const std::vector<ScsSweepPoint>& points) {
    CsvTable t;
    t.header = {"snr_db", "mean_scs", "trials"};
    for (const auto& p : points)
        t.rows.push_back({p.snr_db, p.mean_scs, static_cast<double>(p.trials)});
    return t;
}

inline CsvTable to_table(const std::vector<PaprSweepRecord>& records) {
    CsvTable t;
    t.header = {"rho", "trial", "papr1_db", "papr2_db", "mse1", "mse2"};
    for (const auto& r : records)
        t.rows.push_back({r.rho, static_cast<double>(r.trial), r.papr1_db, r.papr2_db, r.mse1,
                          r.mse2});
    return t;
}

inline CsvTable to_table(const std::vector<CsiSweepRecord>& records) {
    CsvTable t;
    t.header = {"mode", "param", "csi_mse1", "csi_mse2", "mse1", "mse2", "r_prime_theory",
                "r_prime_empirical", "trials"};
    for (const auto& r : records)
        t.rows.push_back({static_cast<double>(static_cast<int>(r.mode)), r.param, r.csi_mse1,
                          r.csi_mse2, r.mse1, r.mse2, r.r_prime_theory, r.r_prime_empirical,
                          static_cast<double>(r.trials)});
    return t;
}

// --- scalar-model verification helpers --------------------------------------

struct CorrelationCheck {
    double empirical = 0.0;
    double theoretical = 0.0;
};

/**
 * Simulate received pairs under the scalar model Z_i = (Hhat_i + E_i) X_i + W_i
 * with the estimated gains held fixed (one channel draw) and per-sample CSI
 * error, and compare the sample correlation with noisy_correlation(). The
 * closed form charges the CSI error against the signal variance, so with
 * nonzero means the empirical correlation sits slightly below it; zero-mean
 * models match exactly.
 */
inline CorrelationCheck simulate_received_correlation(const GaussianPairModel& model,
                                                      const ObservationModel& obs,
                                                      long n_samples, SeededRng& rng) {
    model.validate();
    obs.validate();
    const double r = model.correlation;
    const double rc = std::sqrt(std::max(0.0, 1.0 - r * r));
    const double s1 = std::sqrt(model.var1);
    const double s2 = std::sqrt(model.var2);
    const double e1 = std::sqrt(obs.csi_error_var1);
    const double e2 = std::sqrt(obs.csi_error_var2);
    const double w1 = std::sqrt(obs.noise_var1);
    const double w2 = std::sqrt(obs.noise_var2);
    double az = 0.0, bz = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
    for (long i = 0; i < n_samples; ++i) {
        const double u = rng.gaussian();
        const double x1 = model.mean1 + s1 * u;
        const double x2 = model.mean2 + s2 * (r * u + rc * rng.gaussian());
        const double z1 = (obs.gain1 + e1 * rng.gaussian()) * x1 + w1 * rng.gaussian();
        const double z2 = (obs.gain2 + e2 * rng.gaussian()) * x2 + w2 * rng.gaussian();
        az += z1;
        bz += z2;
        aa += z1 * z1;
        bb += z2 * z2;
        ab += z1 * z2;
    }
    const double n = static_cast<double>(n_samples);
    const double m1 = az / n;
    const double m2 = bz / n;
    CorrelationCheck out;
    out.empirical = (ab / n - m1 * m2) /
                    std::sqrt((aa / n - m1 * m1) * (bb / n - m2 * m2));
    out.theoretical = noisy_correlation(model, obs);
    return out;
}

struct PosteriorMcResult {
    // Affine conditional-mean fit of X1 on (Z1, Z2) plus residual variance,
    // estimated from simulation, next to the closed-form counterparts.
    double intercept_mc = 0.0, slope1_mc = 0.0, slope2_mc = 0.0, resid_var_mc = 0.0;
    double intercept_ref = 0.0, slope1_ref = 0.0, slope2_ref = 0.0, var_ref = 0.0;
};

/// How the equivalent noise is realized in a Monte Carlo run.
enum class NoiseRealization {
    /// Z = (Hhat + E) X + W with a fresh CSI error per sample. Faithful to
    /// the physical substitution; its noise variance equals the
    /// equivalent-noise formula when the signal has zero mean (the formula
    /// charges sigma_e^2 against the variance, not the second moment).
    PerSampleCsiError,
    /// Z = Hhat X + Wtilde with Wtilde drawn Gaussian at the full equivalent
    /// noise variance: the analytical model behind the posterior equations.
    GaussianEquivalent,
};

/**
 * Monte Carlo check of the posterior moments. Samples the chosen generative
 * model (estimated gains fixed), fits the conditional mean of X1 given
 * (Z1, Z2) by least squares, and reports it next to the closed form
 * evaluated through posterior_fuse at basis points.
 */
inline PosteriorMcResult posterior_mc_check(
    const GaussianPairModel& model, const ObservationModel& obs, long n_samples, SeededRng& rng,
    NoiseRealization realization = NoiseRealization::PerSampleCsiError) {
    model.validate();
    obs.validate();
    const double r = model.correlation;
    const double rc = std::sqrt(std::max(0.0, 1.0 - r * r));
    const double s1 = std::sqrt(model.var1);
    const double s2 = std::sqrt(model.var2);
    const bool per_sample = realization == NoiseRealization::PerSampleCsiError;
    const double e1 = per_sample ? std::sqrt(obs.csi_error_var1) : 0.0;
    const double e2 = per_sample ? std::sqrt(obs.csi_error_var2) : 0.0;
    const double w1 = per_sample ? std::sqrt(obs.noise_var1)
                                 : std::sqrt(obs.equivalent_noise1(model));
    const double w2 = per_sample ? std::sqrt(obs.noise_var2)
                                 : std::sqrt(obs.equivalent_noise2(model));

    // Accumulate the moments needed for the normal equations of x ~ (1, z1, z2).
    double sz1 = 0.0, sz2 = 0.0, sx = 0.0;
    double sz11 = 0.0, sz22 = 0.0, sz12 = 0.0, sxz1 = 0.0, sxz2 = 0.0, sxx = 0.0;
    for (long i = 0; i < n_samples; ++i) {
        const double u = rng.gaussian();
        const double x1 = model.mean1 + s1 * u;
        const double x2 = model.mean2 + s2 * (r * u + rc * rng.gaussian());
        const double z1 = (obs.gain1 + e1 * rng.gaussian()) * x1 + w1 * rng.gaussian();
        const double z2 = (obs.gain2 + e2 * rng.gaussian()) * x2 + w2 * rng.gaussian();
        sz1 += z1;
        sz2 += z2;
        sx += x1;
        sz11 += z1 * z1;
        sz22 += z2 * z2;
        sz12 += z1 * z2;
        sxz1 += x1 * z1;
        sxz2 += x1 * z2;
        sxx += x1 * x1;
    }
    const double n = static_cast<double>(n_samples);
    const double mz1 = sz1 / n, mz2 = sz2 / n, mx = sx / n;
    const double c11 = sz11 / n - mz1 * mz1;
    const double c22 = sz22 / n - mz2 * mz2;
    const double c12 = sz12 / n - mz1 * mz2;
    const double cx1 = sxz1 / n - mx * mz1;
    const double cx2 = sxz2 / n - mx * mz2;
    const double vx = sxx / n - mx * mx;

    const double det = c11 * c22 - c12 * c12;
    PosteriorMcResult out;
    out.slope1_mc = (cx1 * c22 - cx2 * c12) / det;
    out.slope2_mc = (cx2 * c11 - cx1 * c12) / det;
    out.intercept_mc = mx - out.slope1_mc * mz1 - out.slope2_mc * mz2;
    out.resid_var_mc = vx - out.slope1_mc * cx1 - out.slope2_mc * cx2;

    const PosteriorEstimate p00 = posterior_fuse(model, obs, 0.0, 0.0);
    out.intercept_ref = p00.mean;
    out.slope1_ref = posterior_fuse(model, obs, 1.0, 0.0).mean - p00.mean;
    out.slope2_ref = posterior_fuse(model, obs, 0.0, 1.0).mean - p00.mean;
    out.var_ref = p00.variance;
    return out;
}

} // namespace cvphy

#endif
