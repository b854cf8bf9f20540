#ifndef CVPHY_OFDM_HPP
#define CVPHY_OFDM_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>

#include "cvphy/dft.hpp"
#include "cvphy/rng.hpp"
#include "cvphy/signal.hpp"

namespace cvphy {

/// Seed for the fixed pseudorandom QPSK-like pilot values.
inline constexpr std::uint64_t kPilotSeed = 0x50494C4F54ULL; // "PILOT"

/**
 * Frame geometry plus the pilot matrix known to both ends. Pilots are
 * transmitted first, as a block preamble of n_pilot_symbols OFDM symbols.
 */
struct OfdmFrameConfig {
    std::size_t n_info_symbols = 1;
    std::size_t n_pilot_symbols = 1;
    std::size_t n_subcarriers = 1;
    std::size_t cp_length = 0;
    ComplexMatrix pilot_values; // n_pilot_symbols x n_subcarriers

    void validate() const {
        if (n_info_symbols < 1 || n_pilot_symbols < 1 || n_subcarriers < 1)
            throw std::invalid_argument("OfdmFrameConfig: counts must be >= 1");
        if (cp_length >= n_subcarriers)
            throw std::invalid_argument("OfdmFrameConfig: cp_length must be < n_subcarriers");
        if (pilot_values.rows != n_pilot_symbols || pilot_values.cols != n_subcarriers)
            throw std::invalid_argument("OfdmFrameConfig: pilot matrix shape mismatch");
    }

    std::size_t symbol_length() const { return n_subcarriers + cp_length; }
    std::size_t packet_length() const { return (n_info_symbols + n_pilot_symbols) * symbol_length(); }

    /// Config with pseudorandom unit-phase QPSK pilots of magnitude
    /// `pilot_amplitude`, fixed by `seed` (default kPilotSeed).
    static OfdmFrameConfig with_default_pilots(std::size_t n_info, std::size_t n_pilot,
                                               std::size_t n_sub, std::size_t cp,
                                               double pilot_amplitude = 1.0,
                                               std::uint64_t seed = kPilotSeed) {
        OfdmFrameConfig cfg;
        cfg.n_info_symbols = n_info;
        cfg.n_pilot_symbols = n_pilot;
        cfg.n_subcarriers = n_sub;
        cfg.cp_length = cp;
        cfg.pilot_values = ComplexMatrix(n_pilot, n_sub);
        SeededRng rng(seed);
        for (std::size_t p = 0; p < n_pilot; ++p)
            for (std::size_t k = 0; k < n_sub; ++k) {
                const int quadrant = static_cast<int>(rng.uniform() * 4.0) & 3;
                const double phase = M_PI / 4.0 + quadrant * M_PI / 2.0;
                cfg.pilot_values.at(p, k) =
                    pilot_amplitude * Complex(std::cos(phase), std::sin(phase));
            }
        cfg.validate();
        return cfg;
    }
};

/// Serialized time-domain frame: pilot symbols then information symbols, each
/// CP-extended to n_subcarriers + cp_length samples.
struct OfdmPacket {
    ComplexSignal samples;
    std::size_t n_info_symbols = 0;
    std::size_t n_pilot_symbols = 0;
    std::size_t n_subcarriers = 0;
    std::size_t cp_length = 0;
    bool pilots_first = true;
};

/// Wrap received samples in the layout of `cfg` (e.g. after apply_channel).
inline OfdmPacket make_packet(const OfdmFrameConfig& cfg, ComplexSignal samples) {
    cfg.validate();
    if (samples.size() != cfg.packet_length())
        throw std::invalid_argument("make_packet: sample count does not match frame config");
    OfdmPacket p;
    p.samples = std::move(samples);
    p.n_info_symbols = cfg.n_info_symbols;
    p.n_pilot_symbols = cfg.n_pilot_symbols;
    p.n_subcarriers = cfg.n_subcarriers;
    p.cp_length = cfg.cp_length;
    return p;
}

namespace detail {

// IDFT one frequency-domain row and prepend its last cp samples.
inline void append_time_symbol(ComplexSignal& out, const ComplexSignal& freq_row,
                               std::size_t cp) {
    const ComplexSignal t = inverse_dft(freq_row);
    const std::size_t n = t.size();
    for (std::size_t i = 0; i < cp; ++i) out.push_back(t[n - cp + i]);
    for (std::size_t i = 0; i < n; ++i) out.push_back(t[i]);
}

} // namespace detail

/**
 * OFDM modulation: every row of x_freq (and every pilot row) is transformed
 * to the time domain, CP-extended, and serialized with the pilot block first.
 */
inline OfdmPacket ofdm_modulate(const ComplexMatrix& x_freq, const OfdmFrameConfig& cfg) {
    cfg.validate();
    if (x_freq.rows != cfg.n_info_symbols || x_freq.cols != cfg.n_subcarriers)
        throw std::invalid_argument("ofdm_modulate: data shape does not match frame config");
    ComplexSignal out;
    out.reserve(cfg.packet_length());
    ComplexSignal row(cfg.n_subcarriers);
    for (std::size_t p = 0; p < cfg.n_pilot_symbols; ++p) {
        for (std::size_t k = 0; k < cfg.n_subcarriers; ++k) row[k] = cfg.pilot_values.at(p, k);
        detail::append_time_symbol(out, row, cfg.cp_length);
    }
    for (std::size_t s = 0; s < cfg.n_info_symbols; ++s) {
        for (std::size_t k = 0; k < cfg.n_subcarriers; ++k) row[k] = x_freq.at(s, k);
        detail::append_time_symbol(out, row, cfg.cp_length);
    }
    return make_packet(cfg, std::move(out));
}

struct OfdmDemodResult {
    ComplexMatrix data;   // n_info_symbols x n_subcarriers
    ComplexMatrix pilots; // n_pilot_symbols x n_subcarriers
};

/// Strip the CP of every symbol, DFT, and separate pilots from data.
inline OfdmDemodResult ofdm_demodulate(const OfdmPacket& rx, const OfdmFrameConfig& cfg) {
    cfg.validate();
    if (rx.samples.size() != cfg.packet_length())
        throw std::invalid_argument("ofdm_demodulate: packet length does not match frame config");
    OfdmDemodResult out;
    out.pilots = ComplexMatrix(cfg.n_pilot_symbols, cfg.n_subcarriers);
    out.data = ComplexMatrix(cfg.n_info_symbols, cfg.n_subcarriers);
    const std::size_t sym_len = cfg.symbol_length();
    ComplexSignal body(cfg.n_subcarriers);
    const std::size_t total = cfg.n_pilot_symbols + cfg.n_info_symbols;
    for (std::size_t s = 0; s < total; ++s) {
        const std::size_t base = s * sym_len + cfg.cp_length;
        for (std::size_t k = 0; k < cfg.n_subcarriers; ++k) body[k] = rx.samples[base + k];
        const ComplexSignal freq = dft(body);
        if (s < cfg.n_pilot_symbols)
            for (std::size_t k = 0; k < cfg.n_subcarriers; ++k) out.pilots.at(s, k) = freq[k];
        else
            for (std::size_t k = 0; k < cfg.n_subcarriers; ++k)
                out.data.at(s - cfg.n_pilot_symbols, k) = freq[k];
    }
    return out;
}

/**
 * Amplitude clipping: samples whose magnitude exceeds rho times the packet's
 * mean amplitude are clipped to that threshold, phase preserved. The mean
 * amplitude is computed once over the whole input packet, pilots included.
 */
inline OfdmPacket clip(const OfdmPacket& pkt, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("clip: rho must be > 0");
    OfdmPacket out = pkt;
    if (std::isinf(rho)) return out;
    const double threshold = rho * mean_amplitude(pkt.samples);
    for (Complex& v : out.samples) {
        const double a = std::abs(v);
        if (a > threshold && a > 0.0) v *= threshold / a;
    }
    return out;
}

struct PaprResult {
    double ratio = 0.0;
    double db = 0.0;
};

/// Peak-to-average power ratio: max |sample|^2 / mean |sample|^2.
inline PaprResult papr(const OfdmPacket& pkt) {
    if (pkt.samples.empty()) throw std::invalid_argument("papr: empty packet");
    double peak = 0.0;
    double mean = 0.0;
    for (const Complex& v : pkt.samples) {
        const double p = std::norm(v);
        peak = std::max(peak, p);
        mean += p;
    }
    mean /= static_cast<double>(pkt.samples.size());
    if (mean == 0.0) throw std::invalid_argument("papr: all-zero packet");
    PaprResult r;
    r.ratio = peak / mean;
    r.db = 10.0 * std::log10(r.ratio);
    return r;
}

/// Scale so the mean power per sample equals p_total exactly.
inline ComplexMatrix power_normalize(const ComplexMatrix& x, double p_total) {
    if (!(p_total > 0.0)) throw std::invalid_argument("power_normalize: p_total must be > 0");
    if (x.size() == 0) throw std::invalid_argument("power_normalize: empty input");
    const double p = mean_power(x.data);
    if (p == 0.0) throw std::invalid_argument("power_normalize: all-zero input");
    const double scale = std::sqrt(p_total / p);
    ComplexMatrix out = x;
    for (Complex& v : out.data) v *= scale;
    return out;
}

namespace detail {

inline void write_le_double(std::FILE* f, double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    std::fwrite(b, 1, 8, f);
}

} // namespace detail

/// Interleaved real/imag little-endian 64-bit floats.
inline void write_packet_binary(const OfdmPacket& pkt, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("write_packet_binary: cannot open " + path);
    for (const Complex& v : pkt.samples) {
        detail::write_le_double(f, v.real());
        detail::write_le_double(f, v.imag());
    }
    std::fclose(f);
}

/// One "index,real,imag" row per sample.
inline void write_packet_csv(const OfdmPacket& pkt, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_packet_csv: cannot open " + path);
    std::fprintf(f, "index,real,imag\n");
    for (std::size_t i = 0; i < pkt.samples.size(); ++i)
        std::fprintf(f, "%zu,%.12g,%.12g\n", i, pkt.samples[i].real(), pkt.samples[i].imag());
    std::fclose(f);
}

} // namespace cvphy

#endif
