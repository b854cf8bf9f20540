#ifndef CVPHY_CSV_HPP
#define CVPHY_CSV_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvphy {

/**
 * Minimal numeric CSV table: a header row plus double-valued rows. All values
 * are written with 12 significant digits ("%.12g"), so identical data always
 * produces byte-identical files.
 */
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline std::string format_csv(const CsvTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out.push_back(',');
        out += table.header[i];
    }
    out.push_back('\n');
    char buf[64];
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw std::invalid_argument("format_csv: row width does not match header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out.push_back(',');
            std::snprintf(buf, sizeof(buf), "%.12g", row[i]);
            out += buf;
        }
        out.push_back('\n');
    }
    return out;
}

inline void write_csv(const CsvTable& table, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_csv: cannot open '" + path + "' for writing");
    f << format_csv(table);
    if (!f) throw std::runtime_error("write_csv: write failed for '" + path + "'");
}

inline CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                cells.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        cells.push_back(cur);
        if (first) {
            table.header = cells;
            first = false;
        } else {
            std::vector<double> row;
            row.reserve(cells.size());
            for (const std::string& c : cells) row.push_back(std::stod(c));
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_csv: cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_csv(ss.str());
}

} // namespace cvphy

#endif
