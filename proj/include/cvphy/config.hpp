#ifndef CVPHY_CONFIG_HPP
#define CVPHY_CONFIG_HPP

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvphy {

enum class CsiMode { Perfect, Ls, Mmse, Synthetic };

inline const char* to_string(CsiMode m) {
    switch (m) {
        case CsiMode::Perfect: return "perfect";
        case CsiMode::Ls: return "ls";
        case CsiMode::Mmse: return "mmse";
        case CsiMode::Synthetic: return "synthetic";
    }
    return "perfect";
}

inline CsiMode csi_mode_from_string(const std::string& s) {
    if (s == "perfect") return CsiMode::Perfect;
    if (s == "ls") return CsiMode::Ls;
    if (s == "mmse") return CsiMode::Mmse;
    if (s == "synthetic") return CsiMode::Synthetic;
    throw std::invalid_argument("config: unknown csi_mode '" + s + "'");
}

/**
 * Parameters of one simulation run. Defaults follow the reference link
 * budget: 8-tap exponential profile with decay 4, SNR drawn from [-8, 2] dB,
 * 3 information and 2 pilot symbols on 2048 subcarriers with a 16-sample CP,
 * and 0.5 transmit power per view.
 *
 * File format: flat "key = value" lines grouped by [section] headers
 * ([channel], [ofdm], [source], [link], [sweep], [run]); '#' starts a
 * comment; lists are comma-separated. Unknown keys are rejected.
 */
struct ExperimentConfig {
    // [channel]
    int num_taps = 8;
    double decay = 4.0;

    // [ofdm]
    int n_info_symbols = 3;
    int n_pilot_symbols = 2;
    int n_subcarriers = 2048;
    int cp_length = 16;

    // [source]
    double correlation = 0.8;
    double source_var1 = 1.0;
    double source_var2 = 1.0;

    // [link]
    double snr_low_db = -8.0;
    double snr_high_db = 2.0;
    double power1 = 0.5;
    double power2 = 0.5;
    double bandwidth1 = 1.0 / 6.0; // compression-ratio placeholders; carried
    double bandwidth2 = 1.0 / 6.0; // through for interface fidelity only
    double clip_ratio = std::numeric_limits<double>::infinity();
    CsiMode csi_mode = CsiMode::Perfect;
    double csi_error_variance = 0.0;

    // [sweep]
    std::vector<double> clip_ratios = {1.0, 1.4, 2.0, 3.0};
    std::vector<int> pilot_counts = {1, 2, 4, 8};
    std::vector<double> csi_error_variances = {0.0, 0.05, 0.1, 0.2};
    std::vector<double> snr_grid_db = {-8.0, -6.0, -4.0, -2.0, 0.0, 2.0};

    // [run]
    long trials = 100;
    std::uint64_t seed = 1;

    void validate() const {
        if (num_taps < 1) throw std::invalid_argument("config: num_taps must be >= 1");
        if (!(decay > 0.0)) throw std::invalid_argument("config: decay must be > 0");
        if (n_info_symbols < 1 || n_pilot_symbols < 1 || n_subcarriers < 1)
            throw std::invalid_argument("config: symbol/subcarrier counts must be >= 1");
        if (cp_length < 0 || cp_length >= n_subcarriers)
            throw std::invalid_argument("config: cp_length must be in [0, n_subcarriers)");
        if (num_taps > n_subcarriers)
            throw std::invalid_argument("config: num_taps must be <= n_subcarriers");
        if (std::abs(correlation) > 1.0)
            throw std::invalid_argument("config: |correlation| must be <= 1");
        if (!(source_var1 > 0.0) || !(source_var2 > 0.0))
            throw std::invalid_argument("config: source variances must be > 0");
        if (snr_low_db > snr_high_db)
            throw std::invalid_argument("config: snr_low_db must be <= snr_high_db");
        if (!(power1 > 0.0) || !(power2 > 0.0))
            throw std::invalid_argument("config: powers must be > 0");
        if (!(clip_ratio > 0.0))
            throw std::invalid_argument("config: clip_ratio must be > 0 (inf disables clipping)");
        if (csi_error_variance < 0.0)
            throw std::invalid_argument("config: csi_error_variance must be >= 0");
        if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
        for (double r : clip_ratios)
            if (!(r > 0.0)) throw std::invalid_argument("config: clip_ratios entries must be > 0");
        for (int p : pilot_counts)
            if (p < 1) throw std::invalid_argument("config: pilot_counts entries must be >= 1");
        for (double v : csi_error_variances)
            if (v < 0.0)
                throw std::invalid_argument("config: csi_error_variances entries must be >= 0");
    }

    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("config: cannot open " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }
    std::string serialize() const;
    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("config: cannot write " + path);
        out << serialize();
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double parse_double(const std::string& v, const std::string& key) {
    if (v == "inf" || v == "none") return std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    double d;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
    }
    if (pos != v.size())
        throw std::invalid_argument("config: trailing junk for " + key + ": '" + v + "'");
    return d;
}

inline long parse_long(const std::string& v, const std::string& key) {
    std::size_t pos = 0;
    long d;
    try {
        d = std::stol(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
    }
    if (pos != v.size())
        throw std::invalid_argument("config: trailing junk for " + key + ": '" + v + "'");
    return d;
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : v) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

} // namespace detail

inline ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: malformed section at line " +
                                            std::to_string(lineno));
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " +
                                        std::to_string(lineno));
        const std::string key = section + "." + detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));

        if (key == "channel.num_taps") cfg.num_taps = static_cast<int>(detail::parse_long(val, key));
        else if (key == "channel.decay") cfg.decay = detail::parse_double(val, key);
        else if (key == "ofdm.n_info_symbols") cfg.n_info_symbols = static_cast<int>(detail::parse_long(val, key));
        else if (key == "ofdm.n_pilot_symbols") cfg.n_pilot_symbols = static_cast<int>(detail::parse_long(val, key));
        else if (key == "ofdm.n_subcarriers") cfg.n_subcarriers = static_cast<int>(detail::parse_long(val, key));
        else if (key == "ofdm.cp_length") cfg.cp_length = static_cast<int>(detail::parse_long(val, key));
        else if (key == "source.correlation") cfg.correlation = detail::parse_double(val, key);
        else if (key == "source.variance1") cfg.source_var1 = detail::parse_double(val, key);
        else if (key == "source.variance2") cfg.source_var2 = detail::parse_double(val, key);
        else if (key == "link.snr_low_db") cfg.snr_low_db = detail::parse_double(val, key);
        else if (key == "link.snr_high_db") cfg.snr_high_db = detail::parse_double(val, key);
        else if (key == "link.power1") cfg.power1 = detail::parse_double(val, key);
        else if (key == "link.power2") cfg.power2 = detail::parse_double(val, key);
        else if (key == "link.bandwidth1") cfg.bandwidth1 = detail::parse_double(val, key);
        else if (key == "link.bandwidth2") cfg.bandwidth2 = detail::parse_double(val, key);
        else if (key == "link.clip_ratio") cfg.clip_ratio = detail::parse_double(val, key);
        else if (key == "link.csi_mode") cfg.csi_mode = csi_mode_from_string(val);
        else if (key == "link.csi_error_variance") cfg.csi_error_variance = detail::parse_double(val, key);
        else if (key == "sweep.clip_ratios") {
            cfg.clip_ratios.clear();
            for (const auto& s : detail::split_list(val))
                cfg.clip_ratios.push_back(detail::parse_double(s, key));
        } else if (key == "sweep.pilot_counts") {
            cfg.pilot_counts.clear();
            for (const auto& s : detail::split_list(val))
                cfg.pilot_counts.push_back(static_cast<int>(detail::parse_long(s, key)));
        } else if (key == "sweep.csi_error_variances") {
            cfg.csi_error_variances.clear();
            for (const auto& s : detail::split_list(val))
                cfg.csi_error_variances.push_back(detail::parse_double(s, key));
        } else if (key == "sweep.snr_grid_db") {
            cfg.snr_grid_db.clear();
            for (const auto& s : detail::split_list(val))
                cfg.snr_grid_db.push_back(detail::parse_double(s, key));
        } else if (key == "run.trials") {
            cfg.trials = detail::parse_long(val, key);
        } else if (key == "run.seed") {
            cfg.seed = static_cast<std::uint64_t>(detail::parse_long(val, key));
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "' at line " +
                                        std::to_string(lineno));
        }
    }
    cfg.validate();
    return cfg;
}

inline std::string ExperimentConfig::serialize() const {
    std::ostringstream out;
    out.precision(17);
    out << "[channel]\n";
    out << "num_taps = " << num_taps << "\n";
    out << "decay = " << decay << "\n\n";
    out << "[ofdm]\n";
    out << "n_info_symbols = " << n_info_symbols << "\n";
    out << "n_pilot_symbols = " << n_pilot_symbols << "\n";
    out << "n_subcarriers = " << n_subcarriers << "\n";
    out << "cp_length = " << cp_length << "\n\n";
    out << "[source]\n";
    out << "correlation = " << correlation << "\n";
    out << "variance1 = " << source_var1 << "\n";
    out << "variance2 = " << source_var2 << "\n\n";
    out << "[link]\n";
    out << "snr_low_db = " << snr_low_db << "\n";
    out << "snr_high_db = " << snr_high_db << "\n";
    out << "power1 = " << power1 << "\n";
    out << "power2 = " << power2 << "\n";
    out << "bandwidth1 = " << bandwidth1 << "\n";
    out << "bandwidth2 = " << bandwidth2 << "\n";
    if (std::isinf(clip_ratio)) out << "clip_ratio = inf\n";
    else out << "clip_ratio = " << clip_ratio << "\n";
    out << "csi_mode = " << to_string(csi_mode) << "\n";
    out << "csi_error_variance = " << csi_error_variance << "\n\n";
    out << "[sweep]\n";
    out << "clip_ratios = ";
    for (std::size_t i = 0; i < clip_ratios.size(); ++i)
        out << (i ? "," : "") << clip_ratios[i];
    out << "\npilot_counts = ";
    for (std::size_t i = 0; i < pilot_counts.size(); ++i)
        out << (i ? "," : "") << pilot_counts[i];
    out << "\ncsi_error_variances = ";
    for (std::size_t i = 0; i < csi_error_variances.size(); ++i)
        out << (i ? "," : "") << csi_error_variances[i];
    out << "\nsnr_grid_db = ";
    for (std::size_t i = 0; i < snr_grid_db.size(); ++i)
        out << (i ? "," : "") << snr_grid_db[i];
    out << "\n\n[run]\n";
    out << "trials = " << trials << "\n";
    out << "seed = " << seed << "\n";
    return out.str();
}

} // namespace cvphy

#endif
