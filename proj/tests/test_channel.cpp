#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cvphy/channel.hpp"
#include "cvphy/ofdm.hpp"

using namespace cvphy;

TEST_CASE("exponential profile normalizes to unit total power") {
    for (auto [l, g] : {std::pair{8, 4.0}, {1, 1.0}, {16, 2.5}, {3, 100.0}}) {
        const ChannelProfile p = ChannelProfile::exponential(l, g);
        double total = 0.0;
        for (double v : p.tap_variances) {
            CHECK(v > 0.0);
            total += v;
        }
        CHECK(std::abs(total - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(ChannelProfile::exponential(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ChannelProfile::exponential(4, 0.0), std::invalid_argument);
}

TEST_CASE("single-tap profile puts everything on tap 0") {
    const ChannelProfile p = ChannelProfile::exponential(1, 4.0);
    CHECK(std::abs(p.tap_variances[0] - 1.0) < 1e-15);
    SeededRng rng(3);
    double e = 0.0;
    const int trials = 200000;
    for (int t = 0; t < trials; ++t) e += std::norm(sample_channel(p, rng).taps[0]);
    e /= trials;
    CHECK(e > 0.99);
    CHECK(e < 1.01);
}

TEST_CASE("sampled taps match the profile variances (Monte Carlo)") {
    const ChannelProfile p = ChannelProfile::exponential(8, 4.0);
    SeededRng rng(17);
    std::vector<double> acc(8, 0.0);
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
        const ChannelRealization ch = sample_channel(p, rng);
        for (int l = 0; l < 8; ++l) acc[l] += std::norm(ch.taps[l]);
    }
    for (int l = 0; l < 8; ++l) {
        const double rel = std::abs(acc[l] / trials - p.tap_variances[l]) / p.tap_variances[l];
        CHECK(rel < 0.02);
    }
}

TEST_CASE("apply_channel: identity tap passes the signal through") {
    ChannelRealization ch;
    ch.taps = {Complex(1.0, 0.0)};
    ch.noise_variance = 0.0;
    SeededRng rng(1);
    const ComplexSignal x = sample_complex_gaussian(rng, 32, 1.0);
    const ComplexSignal z = apply_channel(x, ch, rng);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(z[i] - x[i]) < 1e-15);
}

TEST_CASE("apply_channel: unit impulse reproduces the zero-padded taps") {
    SeededRng rng(2);
    ChannelRealization ch;
    ch.taps = sample_complex_gaussian(rng, 5, 1.0);
    ch.noise_variance = 0.0;
    ComplexSignal x(12, Complex(0.0, 0.0));
    x[0] = Complex(1.0, 0.0);
    const ComplexSignal z = apply_channel(x, ch, rng);
    for (std::size_t i = 0; i < z.size(); ++i) {
        const Complex expect = i < ch.taps.size() ? ch.taps[i] : Complex(0.0, 0.0);
        CHECK(std::abs(z[i] - expect) < 1e-15);
    }
}

TEST_CASE("apply_channel noise variance (Monte Carlo on a zero signal)") {
    ChannelRealization ch;
    ch.taps = {Complex(1.0, 0.0)};
    ch.noise_variance = 1.0;
    SeededRng rng(4);
    const ComplexSignal x(1000000, Complex(0.0, 0.0));
    const ComplexSignal z = apply_channel(x, ch, rng);
    double var = 0.0;
    for (const Complex& v : z) var += std::norm(v);
    var /= double(z.size());
    CHECK(var > 0.995);
    CHECK(var < 1.005);
}

TEST_CASE("frequency_response basics and Parseval") {
    ChannelRealization unit;
    unit.taps = {Complex(1.0, 0.0)};
    for (const Complex& h : frequency_response(unit, 8))
        CHECK(std::abs(h - Complex(1.0, 0.0)) < 1e-12);

    ChannelRealization delayed;
    delayed.taps = {Complex(0.0, 0.0), Complex(1.0, 0.0)};
    const ComplexSignal resp = frequency_response(delayed, 4);
    for (int k = 0; k < 4; ++k) {
        const double ang = -2.0 * M_PI * k / 4.0;
        CHECK(std::abs(resp[k] - Complex(std::cos(ang), std::sin(ang))) < 1e-12);
    }

    SeededRng rng(6);
    ChannelRealization ch;
    ch.taps = sample_complex_gaussian(rng, 6, 1.0);
    const ComplexSignal big = frequency_response(ch, 64);
    double ef = 0.0, et = 0.0;
    for (const Complex& v : big) ef += std::norm(v);
    for (const Complex& v : ch.taps) et += std::norm(v);
    CHECK(std::abs(ef / 64.0 - et) < 1e-10);

    CHECK_THROWS_AS(frequency_response(ch, 4), std::invalid_argument);
}

namespace {

// One pilot transmission: true H plus a fresh LS estimate from noisy pilots.
struct PilotTrial {
    ComplexSignal true_gains;
    ComplexMatrix tx, rx;
};

PilotTrial make_pilot_trial(const ChannelProfile& profile, std::size_t n_pilots, std::size_t nc,
                            double noise_var_sub, SeededRng& rng) {
    PilotTrial tr;
    const ChannelRealization ch = sample_channel(profile, rng);
    tr.true_gains = frequency_response(ch, nc);
    tr.tx = ComplexMatrix(n_pilots, nc);
    tr.rx = ComplexMatrix(n_pilots, nc);
    for (std::size_t p = 0; p < n_pilots; ++p)
        for (std::size_t k = 0; k < nc; ++k) {
            const double phase = 2.0 * M_PI * rng.uniform();
            tr.tx.at(p, k) = Complex(std::cos(phase), std::sin(phase));
            tr.rx.at(p, k) =
                tr.true_gains[k] * tr.tx.at(p, k) + rng.complex_gaussian(noise_var_sub);
        }
    return tr;
}

} // namespace

TEST_CASE("LS estimate is exact on noiseless pilots") {
    SeededRng rng(8);
    const ChannelProfile p = ChannelProfile::exponential(8, 4.0);
    const PilotTrial tr = make_pilot_trial(p, 2, 64, 0.0, rng);
    const CsiEstimate est = estimate_csi_ls(tr.tx, tr.rx);
    for (std::size_t k = 0; k < 64; ++k) CHECK(std::abs(est.gains[k] - tr.true_gains[k]) < 1e-12);
}

TEST_CASE("LS error variance matches noise/(Np |pilot|^2) at 0 dB") {
    SeededRng rng(9);
    const ChannelProfile p = ChannelProfile::exponential(8, 4.0);
    const double noise_var = 1.0; // 0 dB against unit-power pilots
    const std::size_t np = 2, nc = 64;
    double err = 0.0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
        const PilotTrial tr = make_pilot_trial(p, np, nc, noise_var, rng);
        const CsiEstimate est = estimate_csi_ls(tr.tx, tr.rx);
        for (std::size_t k = 0; k < nc; ++k) err += std::norm(est.gains[k] - tr.true_gains[k]);
    }
    err /= double(trials) * double(nc);
    const double analytic = ls_error_variance(noise_var, np, 1.0);
    CHECK(std::abs(err - analytic) / analytic < 0.05);
}

TEST_CASE("LS error variance strictly decreases with pilot count") {
    SeededRng rng(10);
    const ChannelProfile p = ChannelProfile::exponential(8, 4.0);
    double prev = 1e9;
    for (std::size_t np : {1u, 2u, 4u, 8u}) {
        double err = 0.0;
        const int trials = 1500;
        for (int t = 0; t < trials; ++t) {
            const PilotTrial tr = make_pilot_trial(p, np, 32, 0.5, rng);
            const CsiEstimate est = estimate_csi_ls(tr.tx, tr.rx);
            for (std::size_t k = 0; k < 32; ++k) err += std::norm(est.gains[k] - tr.true_gains[k]);
        }
        err /= double(trials) * 32.0;
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("LS rejects malformed pilots") {
    ComplexMatrix tx(1, 2), rx(1, 2);
    tx.at(0, 0) = Complex(1.0, 0.0); // leaves a zero pilot sample at (0,1)
    CHECK_THROWS_AS(estimate_csi_ls(tx, rx), std::invalid_argument);
    ComplexMatrix bad(2, 3);
    CHECK_THROWS_AS(estimate_csi_ls(tx, bad), std::invalid_argument);
}

TEST_CASE("MMSE equals LS when there is no noise") {
    SeededRng rng(11);
    const ChannelProfile p = ChannelProfile::exponential(8, 4.0);
    const PilotTrial tr = make_pilot_trial(p, 2, 64, 0.0, rng);
    const CsiEstimate ls = estimate_csi_ls(tr.tx, tr.rx);
    const CsiEstimate mm = estimate_csi_mmse(tr.tx, tr.rx, p, 0.0);
    for (std::size_t k = 0; k < 64; ++k) CHECK(std::abs(ls.gains[k] - mm.gains[k]) < 1e-9);
}

TEST_CASE("MMSE beats LS in mean square at -4 dB (Monte Carlo)") {
    SeededRng rng(12);
    const ChannelProfile p = ChannelProfile::exponential(8, 4.0);
    const double noise_var = std::pow(10.0, 0.4); // -4 dB vs unit-power pilots
    double ls_err = 0.0, mm_err = 0.0, mm_model = 0.0;
    const std::size_t nc = 64, np = 2;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        const PilotTrial tr = make_pilot_trial(p, np, nc, noise_var, rng);
        const CsiEstimate ls = estimate_csi_ls(tr.tx, tr.rx);
        const CsiEstimate mm = estimate_csi_mmse(tr.tx, tr.rx, p, noise_var);
        mm_model = mm.error_variance;
        for (std::size_t k = 0; k < nc; ++k) {
            ls_err += std::norm(ls.gains[k] - tr.true_gains[k]);
            mm_err += std::norm(mm.gains[k] - tr.true_gains[k]);
        }
    }
    ls_err /= double(trials) * double(nc);
    mm_err /= double(trials) * double(nc);
    CHECK(mm_err <= ls_err * 1.01);
    CHECK(mm_err < ls_err); // strictly better here: the tap projection alone wins
    // modeled error variance agrees with the measured one
    CHECK(std::abs(mm_err - mm_model) / mm_model < 0.05);
}

TEST_CASE("MMSE shrinks a flat single-tap channel by the scalar Wiener factor") {
    SeededRng rng(13);
    const ChannelProfile p = ChannelProfile::exponential(1, 1.0);
    const std::size_t nc = 1; // one subcarrier: the estimate is the scalar Wiener solution
    const double noise_var = 0.3;
    for (int t = 0; t < 50; ++t) {
        const PilotTrial tr = make_pilot_trial(p, 1, nc, noise_var, rng);
        const CsiEstimate ls = estimate_csi_ls(tr.tx, tr.rx);
        const CsiEstimate mm = estimate_csi_mmse(tr.tx, tr.rx, p, noise_var);
        const double wiener = 1.0 / (1.0 + noise_var); // sigma_h^2 / (sigma_h^2 + sigma_err^2)
        CHECK(std::abs(mm.gains[0] - wiener * ls.gains[0]) < 1e-9);
    }
}

TEST_CASE("perturb_csi: exactness at zero, variance, determinism") {
    SeededRng rng(14);
    const ComplexSignal h = sample_complex_gaussian(rng, 16, 1.0);
    SeededRng r0(100);
    const CsiEstimate e0 = perturb_csi(h, 0.0, r0);
    for (std::size_t k = 0; k < h.size(); ++k) CHECK(e0.gains[k] == h[k]);

    SeededRng r1(200);
    const ComplexSignal big(1000000, Complex(1.0, 0.0));
    const CsiEstimate e1 = perturb_csi(big, 0.1, r1);
    double var = 0.0;
    for (std::size_t k = 0; k < big.size(); ++k) var += std::norm(e1.gains[k] - big[k]);
    var /= double(big.size());
    CHECK(var > 0.099);
    CHECK(var < 0.101);

    SeededRng ra(7), rb(7);
    const CsiEstimate pa = perturb_csi(h, 0.2, ra);
    const CsiEstimate pb = perturb_csi(h, 0.2, rb);
    for (std::size_t k = 0; k < h.size(); ++k) CHECK(pa.gains[k] == pb.gains[k]);

    CHECK_THROWS_AS(perturb_csi(h, -0.1, rng), std::invalid_argument);
}
