#pragma once

#include <htex/errors.hpp>
#include <htex/quantifiers.hpp>

#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace htex {

/// One analysed object: an image (or generated surface) under one transform,
/// symbolized by one method at one (D, tau).
struct AnalysisRow {
    std::string label;
    std::string source;
    std::string method = "hilbert";  // hilbert | patch2d
    int dim = 0;
    int tau = 1;
    std::string transform = "id";
    InfoTriple triple;
    std::uint64_t samples = 0;
    bool undersampled = false;
    std::optional<std::uint64_t> seed;
};

inline constexpr std::array<std::string_view, 12> kCsvColumns = {
    "label", "source", "method", "D", "tau", "transform",
    "H", "C", "F", "samples", "undersampled", "seed"};

/// 12 significant digits, '.' decimal point regardless of locale.
inline std::string format_real(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::general, 12);
    return std::string(buf.data(), res.ptr);
}

namespace detail {

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

template <typename T>
T parse_number(const std::string& s, std::string_view column) {
    T v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument("csv: bad value '" + s + "' in column " + std::string(column));
    }
    return v;
}

}  // namespace detail

inline std::string csv_header() {
    std::string h;
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
        if (i) h += ',';
        h += kCsvColumns[i];
    }
    return h;
}

inline std::string to_csv_line(const AnalysisRow& r) {
    std::string s;
    s += detail::csv_field(r.label) + ',';
    s += detail::csv_field(r.source) + ',';
    s += detail::csv_field(r.method) + ',';
    s += std::to_string(r.dim) + ',';
    s += std::to_string(r.tau) + ',';
    s += detail::csv_field(r.transform) + ',';
    s += format_real(r.triple.entropy) + ',';
    s += format_real(r.triple.complexity) + ',';
    s += format_real(r.triple.fisher) + ',';
    s += std::to_string(r.samples) + ',';
    s += r.undersampled ? "true," : "false,";
    if (r.seed) s += std::to_string(*r.seed);
    return s;
}

inline void write_csv(std::ostream& out, const std::vector<AnalysisRow>& rows) {
    out << csv_header() << '\n';
    for (const auto& r : rows) out << to_csv_line(r) << '\n';
}

inline void write_csv(const std::filesystem::path& path, const std::vector<AnalysisRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path.string());
    write_csv(out, rows);
    if (!out) throw io_error("write failed: " + path.string());
}

inline std::vector<AnalysisRow> read_csv(std::istream& in, const std::string& name = "csv") {
    std::string line;
    if (!std::getline(in, line)) return {};
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != csv_header()) throw io_error(name + ": unexpected header '" + line + "'");
    std::vector<AnalysisRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != kCsvColumns.size()) {
            throw io_error(name + ":" + std::to_string(lineno) + ": expected " +
                           std::to_string(kCsvColumns.size()) + " fields, got " +
                           std::to_string(f.size()));
        }
        AnalysisRow r;
        try {
            r.label = f[0];
            r.source = f[1];
            r.method = f[2];
            r.dim = detail::parse_number<int>(f[3], "D");
            r.tau = detail::parse_number<int>(f[4], "tau");
            r.transform = f[5];
            r.triple.entropy = detail::parse_number<double>(f[6], "H");
            r.triple.complexity = detail::parse_number<double>(f[7], "C");
            r.triple.fisher = detail::parse_number<double>(f[8], "F");
            r.samples = detail::parse_number<std::uint64_t>(f[9], "samples");
            if (f[10] != "true" && f[10] != "false") {
                throw std::invalid_argument("csv: undersampled must be true or false");
            }
            r.undersampled = f[10] == "true";
            if (!f[11].empty()) r.seed = detail::parse_number<std::uint64_t>(f[11], "seed");
        } catch (const std::invalid_argument& e) {
            throw io_error(name + ":" + std::to_string(lineno) + ": " + e.what());
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::vector<AnalysisRow> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    return read_csv(in, path.string());
}

}  // namespace htex
