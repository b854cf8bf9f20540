// Command-line front end for the cross-view physical-layer simulator.
//
// Subcommands: pipeline, scs-sweep, papr-sweep, csi-sweep, mi-check,
// cvie-check, posterior-check. Every run is fully determined by the config
// file and --seed; repeated invocations produce byte-identical CSV output.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "cvphy/cvphy.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    long trials = -1;
    std::uint64_t seed = 0;
    bool has_seed = false;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Experiment config file");
    cmd->add_option("--out", args.out_path, "CSV output path");
    cmd->add_option("--trials", args.trials, "Override the trial count");
    cmd->add_option("--seed", args.seed, "Override the master seed")
        ->each([&args](const std::string&) { args.has_seed = true; });
    cmd->add_flag("--quiet", args.quiet, "Suppress progress output");
}

cvphy::ExperimentConfig load_config(const CommonArgs& args) {
    cvphy::ExperimentConfig cfg;
    if (!args.config_path.empty()) cfg = cvphy::ExperimentConfig::load(args.config_path);
    if (args.trials > 0) cfg.trials = args.trials;
    if (args.has_seed) cfg.seed = args.seed;
    cfg.validate();
    return cfg;
}

void say(const CommonArgs& args, const char* fmt, ...) {
    if (args.quiet) return;
    va_list ap;
    va_start(ap, fmt);
    std::vfprintf(stdout, fmt, ap);
    va_end(ap);
}

int run_pipeline(const CommonArgs& args, const std::string& dump_packet) {
    const cvphy::ExperimentConfig cfg = load_config(args);
    const auto records = cvphy::run_toy_pipeline(cfg);
    double mse = 0.0, theory = 0.0;
    for (const auto& r : records) {
        mse += (r.mse1 + r.mse2) / 2.0;
        theory += (r.theory_var1 + r.theory_var2) / 2.0;
    }
    say(args, "pipeline: %zu trials, mean mse %.6g, mean theoretical variance %.6g\n",
        records.size(), mse / records.size(), theory / records.size());
    if (!args.out_path.empty()) cvphy::emit_csv(records, args.out_path);
    if (!dump_packet.empty()) {
        const cvphy::OfdmPacket pkt = cvphy::transmitted_packet(cfg, 0, 1);
        if (dump_packet.size() > 4 && dump_packet.substr(dump_packet.size() - 4) == ".csv")
            cvphy::write_packet_csv(pkt, dump_packet);
        else
            cvphy::write_packet_binary(pkt, dump_packet);
        say(args, "pipeline: wrote trial-0 view-1 packet to %s\n", dump_packet.c_str());
    }
    return 0;
}

int run_scs_sweep(const CommonArgs& args) {
    const cvphy::ExperimentConfig cfg = load_config(args);
    const auto points = cvphy::sweep_scs_vs_snr(cfg);
    for (const auto& p : points)
        say(args, "scs-sweep: snr %+6.2f dB -> mean scs %.6f\n", p.snr_db, p.mean_scs);
    if (!args.out_path.empty()) cvphy::write_csv(cvphy::to_table(points), args.out_path);
    return 0;
}

int run_papr_sweep(const CommonArgs& args) {
    const cvphy::ExperimentConfig cfg = load_config(args);
    const auto rows = cvphy::sweep_papr(cfg);
    if (!args.quiet) {
        // aggregate a short summary per rho
        std::vector<double> seen;
        for (const auto& r : rows) {
            bool found = false;
            for (double s : seen)
                if (s == r.rho || (std::isinf(s) && std::isinf(r.rho))) found = true;
            if (found) continue;
            seen.push_back(r.rho);
            double mse = 0.0, papr = 0.0;
            long n = 0;
            for (const auto& q : rows)
                if (q.rho == r.rho || (std::isinf(q.rho) && std::isinf(r.rho))) {
                    mse += q.mse1 + q.mse2;
                    papr += q.papr1_db;
                    ++n;
                }
            std::printf("papr-sweep: rho %-8s mean papr %6.2f dB, mean mse %.6g\n",
                        std::isinf(r.rho) ? "inf" : std::to_string(r.rho).c_str(),
                        papr / n, mse / (2 * n));
        }
    }
    if (!args.out_path.empty()) cvphy::write_csv(cvphy::to_table(rows), args.out_path);
    return 0;
}

int run_csi_sweep(const CommonArgs& args) {
    const cvphy::ExperimentConfig cfg = load_config(args);
    const auto rows = cvphy::sweep_csi_error(cfg);
    for (const auto& r : rows)
        say(args, "csi-sweep: mode %-9s param %-6g csi-mse %.6g decode-mse %.6g r' %.4f\n",
            cvphy::to_string(r.mode), r.param, r.csi_mse1, r.mse1, r.r_prime_theory);
    if (!args.out_path.empty()) cvphy::write_csv(cvphy::to_table(rows), args.out_path);
    return 0;
}

int run_mi_check(const CommonArgs& args) {
    long trials = args.trials > 0 ? args.trials : 1000;
    cvphy::SeededRng rng(args.has_seed ? args.seed : 1);
    cvphy::CsvTable table;
    table.header = {"trial", "depth", "mi_initial_bits", "mi_final_bits", "max_violation"};
    double worst = 0.0;
    for (long t = 0; t < trials; ++t) {
        cvphy::SeededRng trial_rng = rng.split(static_cast<std::uint64_t>(t));
        const auto na = 2 + static_cast<std::size_t>(trial_rng.uniform() * 5.0);
        const auto nb = 2 + static_cast<std::size_t>(trial_rng.uniform() * 5.0);
        cvphy::DiscreteJoint joint;
        joint.pmf = cvphy::Mat(na, nb);
        double total = 0.0;
        for (double& v : joint.pmf.data) {
            v = trial_rng.uniform() + 1e-4;
            total += v;
        }
        for (double& v : joint.pmf.data) v /= total;
        const int depth = 1 + static_cast<int>(trial_rng.uniform() * 4.0);
        std::vector<cvphy::StochasticMatrix> s1, s2;
        std::size_t ca = na, cb = nb;
        for (int d = 0; d < depth; ++d) {
            const auto oa = 2 + static_cast<std::size_t>(trial_rng.uniform() * 5.0);
            const auto ob = 2 + static_cast<std::size_t>(trial_rng.uniform() * 5.0);
            cvphy::StochasticMatrix m1, m2;
            m1.rows = cvphy::Mat(ca, oa);
            m2.rows = cvphy::Mat(cb, ob);
            for (std::size_t i = 0; i < ca; ++i) {
                double rt = 0.0;
                for (std::size_t o = 0; o < oa; ++o) {
                    m1.rows.at(i, o) = trial_rng.uniform() + 1e-4;
                    rt += m1.rows.at(i, o);
                }
                for (std::size_t o = 0; o < oa; ++o) m1.rows.at(i, o) /= rt;
            }
            for (std::size_t i = 0; i < cb; ++i) {
                double rt = 0.0;
                for (std::size_t o = 0; o < ob; ++o) {
                    m2.rows.at(i, o) = trial_rng.uniform() + 1e-4;
                    rt += m2.rows.at(i, o);
                }
                for (std::size_t o = 0; o < ob; ++o) m2.rows.at(i, o) /= rt;
            }
            s1.push_back(std::move(m1));
            s2.push_back(std::move(m2));
            ca = oa;
            cb = ob;
        }
        const cvphy::MiSequenceResult r = cvphy::verify_mi_nonincreasing(joint, s1, s2);
        worst = std::max(worst, r.max_violation);
        table.rows.push_back({double(t), double(depth), r.mi_bits.front(), r.mi_bits.back(),
                              r.max_violation});
    }
    if (!args.out_path.empty()) cvphy::write_csv(table, args.out_path);
    const bool pass = worst <= 1e-9;
    say(args, "mi-check: %ld chains, max violation %.3g -> %s\n", trials, worst,
        pass ? "PASS" : "FAIL");
    return pass ? 0 : 2;
}

int run_cvie_check(const CommonArgs& args) {
    long trials = args.trials > 0 ? args.trials : 100;
    cvphy::SeededRng rng(args.has_seed ? args.seed : 1);
    cvphy::CsvTable table;
    table.header = {"kernel_size", "trial", "max_error"};
    double worst = 0.0;
    for (int k : {1, 3, 5}) {
        for (long t = 0; t < trials; ++t) {
            cvphy::SeededRng trial_rng = rng.split(static_cast<std::uint64_t>(k * 100000 + t));
            const int c = 1 + static_cast<int>(trial_rng.uniform() * 3.0);
            const int h = 5 + static_cast<int>(trial_rng.uniform() * 4.0);
            const int w = 5 + static_cast<int>(trial_rng.uniform() * 4.0);
            const auto f = cvphy::Conv2dKernel::random(trial_rng, k, c, c);
            const auto weights = cvphy::KernelWeights::conv_equivalent(f);
            cvphy::FeatureMap z1(c, h, w), z2(c, h, w);
            for (double& v : z1.v) v = trial_rng.gaussian();
            for (double& v : z2.v) v = trial_rng.gaussian();
            const cvphy::FeatureMap got = cvphy::cvie(z1, z2, weights);
            const cvphy::FeatureMap want = cvphy::conv2d(z1, f);
            double err = 0.0;
            for (std::size_t i = 0; i < got.v.size(); ++i)
                err = std::max(err, std::abs(got.v[i] - want.v[i]));
            worst = std::max(worst, err);
            table.rows.push_back({double(k), double(t), err});
        }
    }
    if (!args.out_path.empty()) cvphy::write_csv(table, args.out_path);
    const bool pass = worst < 1e-10;
    say(args, "cvie-check: %ld trials per kernel size, max |cvie - conv2d| = %.3g -> %s\n",
        trials, worst, pass ? "PASS" : "FAIL");
    return pass ? 0 : 2;
}

int run_posterior_check(const CommonArgs& args, long samples) {
    long trials = args.trials > 0 ? args.trials : 10;
    cvphy::SeededRng rng(args.has_seed ? args.seed : 1);
    cvphy::CsvTable table;
    table.header = {"draw", "slope1_err", "slope2_err", "intercept_err", "variance_rel_err"};
    double worst = 0.0;
    for (long t = 0; t < trials; ++t) {
        cvphy::SeededRng draw_rng = rng.split(static_cast<std::uint64_t>(t));
        // Alternate between the physical per-sample CSI-error model (exact
        // for zero-mean signals) and the analytical Gaussian equivalent
        // noise (exact for any mean).
        const bool per_sample = (t % 2) == 0;
        cvphy::GaussianPairModel m;
        m.mean1 = per_sample ? 0.0 : draw_rng.gaussian();
        m.mean2 = per_sample ? 0.0 : draw_rng.gaussian();
        m.var1 = 0.4 + draw_rng.uniform() * 2.0;
        m.var2 = 0.4 + draw_rng.uniform() * 2.0;
        m.correlation = draw_rng.uniform(0.2, 0.9);
        cvphy::ObservationModel o;
        o.gain1 = draw_rng.uniform(0.4, 1.8);
        o.gain2 = draw_rng.uniform(0.4, 1.8);
        o.csi_error_var1 = draw_rng.uniform() * 0.4;
        o.csi_error_var2 = draw_rng.uniform() * 0.4;
        o.noise_var1 = 0.1 + draw_rng.uniform() * 0.6;
        o.noise_var2 = 0.1 + draw_rng.uniform() * 0.6;
        const auto r = cvphy::posterior_mc_check(
            m, o, samples, draw_rng,
            per_sample ? cvphy::NoiseRealization::PerSampleCsiError
                       : cvphy::NoiseRealization::GaussianEquivalent);
        // Coefficients are compared relative to the conditional mean's
        // one-sigma response (|c1| sd(Z1) + |c2| sd(Z2)), which keeps the
        // check meaningful when one cross coefficient is small.
        const double sd_z1 = std::sqrt(o.gain1 * o.gain1 * m.var1 + o.equivalent_noise1(m));
        const double sd_z2 = std::sqrt(o.gain2 * o.gain2 * m.var2 + o.equivalent_noise2(m));
        const double gain = std::abs(r.slope1_ref) * sd_z1 + std::abs(r.slope2_ref) * sd_z2;
        const double e1 = std::abs(r.slope1_mc - r.slope1_ref) * sd_z1 / gain;
        const double e2 = std::abs(r.slope2_mc - r.slope2_ref) * sd_z2 / gain;
        const double e3 = std::abs(r.intercept_mc - r.intercept_ref) / std::sqrt(m.var1);
        const double e4 = std::abs(r.resid_var_mc - r.var_ref) / r.var_ref;
        worst = std::max({worst, e1, e2, e3, e4});
        table.rows.push_back({double(t), e1, e2, e3, e4});
    }
    if (!args.out_path.empty()) cvphy::write_csv(table, args.out_path);
    const double tol = samples >= 10000000 ? 0.01 : 0.02;
    const bool pass = worst < tol;
    say(args, "posterior-check: %ld draws x %ld samples, worst relative error %.4f -> %s\n",
        trials, samples, worst, pass ? "PASS" : "FAIL");
    return pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-view OFDM transmission simulator and analytics"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string dump_packet;
    long samples = 1000000;

    CLI::App* pipeline = app.add_subcommand("pipeline", "Run the end-to-end toy pipeline");
    add_common(pipeline, args);
    pipeline->add_option("--dump-packet", dump_packet,
                         "Write the trial-0 view-1 packet (.csv or binary)");

    CLI::App* scs = app.add_subcommand("scs-sweep", "Mean SCS over the SNR grid");
    add_common(scs, args);
    CLI::App* papr = app.add_subcommand("papr-sweep", "PAPR and MSE per clipping ratio");
    add_common(papr, args);
    CLI::App* csi = app.add_subcommand("csi-sweep", "CSI error vs pilots or synthetic variance");
    add_common(csi, args);
    CLI::App* mi = app.add_subcommand("mi-check", "Brute-force MI non-increase suite");
    add_common(mi, args);
    CLI::App* cvie = app.add_subcommand("cvie-check", "Convolution-equivalence oracle");
    add_common(cvie, args);
    CLI::App* post = app.add_subcommand("posterior-check", "Monte Carlo posterior verification");
    add_common(post, args);
    post->add_option("--samples", samples, "Samples per parameter draw");

    CLI11_PARSE(app, argc, argv);

    try {
        if (pipeline->parsed()) return run_pipeline(args, dump_packet);
        if (scs->parsed()) return run_scs_sweep(args);
        if (papr->parsed()) return run_papr_sweep(args);
        if (csi->parsed()) return run_csi_sweep(args);
        if (mi->parsed()) return run_mi_check(args);
        if (cvie->parsed()) return run_cvie_check(args);
        if (post->parsed()) return run_posterior_check(args, samples);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
