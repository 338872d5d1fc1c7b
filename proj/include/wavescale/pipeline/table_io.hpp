#pragma once

// Spectra and trait tables, their CSV layouts, and atomic file output.
//
// Spectra CSV: header "sample_id,animal_id,<wavenumber>,...", one row per
// sample. Traits CSV: header "animal_id,<trait>,...", empty cell = missing.
// Lines starting with '#' are comments.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wavescale/error.hpp"
#include "wavescale/pipeline/config.hpp"

namespace wavescale::pipeline {

struct SpectraTable {
    std::vector<std::string> sample_id;
    std::vector<std::string> animal_id;
    std::vector<double> wavenumbers;
    std::vector<std::vector<double>> values;  // samples x channels
    SpectrumMode mode = SpectrumMode::Transmittance;

    std::size_t samples() const noexcept { return values.size(); }
    std::size_t channels() const noexcept { return wavenumbers.size(); }
};

struct TraitTable {
    std::vector<std::string> animal_id;
    std::vector<std::string> traits;
    std::vector<std::vector<double>> values;  // animals x traits, NaN = missing

    std::size_t rows() const noexcept { return values.size(); }

    std::optional<std::size_t> trait_index(const std::string& t) const {
        for (std::size_t i = 0; i < traits.size(); ++i) {
            if (traits[i] == t) return i;
        }
        return std::nullopt;
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r' || s[a] == '"')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r' || s[b - 1] == '"')) --b;
    return std::string(s.substr(a, b - a));
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

// Non-comment, non-blank lines with their 1-based line numbers.
inline std::vector<std::pair<std::size_t, std::string>> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::vector<std::pair<std::size_t, std::string>> out;
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        out.emplace_back(no, line);
    }
    return out;
}

}  // namespace detail

inline SpectraTable load_spectra_csv(const std::string& path, SpectrumMode mode) {
    const auto lines = detail::read_lines(path);
    if (lines.empty()) throw Error(path + ": empty spectra file");
    const auto header = detail::split_csv(lines[0].second);
    if (header.size() < 3) throw Error(path + ": header needs sample_id, animal_id and at least one wavenumber");
    SpectraTable t;
    t.mode = mode;
    for (std::size_t c = 2; c < header.size(); ++c) {
        const auto v = detail::parse_number(header[c]);
        if (!v) throw Error(path + ": header column " + std::to_string(c + 1) + " is not a wavenumber: '" + header[c] + "'");
        if (!t.wavenumbers.empty() && *v <= t.wavenumbers.back()) {
            throw Error(path + ": wavenumbers not strictly increasing at column " + std::to_string(c + 1));
        }
        t.wavenumbers.push_back(*v);
    }
    std::set<std::string> seen;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto& [no, text] = lines[r];
        const auto cells = detail::split_csv(text);
        if (cells.size() != header.size()) {
            throw Error(path + ": row " + std::to_string(no) + " has " + std::to_string(cells.size() - std::min<std::size_t>(2, cells.size())) +
                        " values, expected " + std::to_string(t.channels()));
        }
        if (!seen.insert(cells[0]).second) throw Error(path + ": row " + std::to_string(no) + ": duplicate sample_id '" + cells[0] + "'");
        std::vector<double> row;
        row.reserve(t.channels());
        for (std::size_t c = 2; c < cells.size(); ++c) {
            const auto v = detail::parse_number(cells[c]);
            if (!v) {
                throw Error(path + ": row " + std::to_string(no) + ", column " + std::to_string(c + 1) +
                            ": not a number: '" + cells[c] + "'");
            }
            row.push_back(*v);
        }
        t.sample_id.push_back(cells[0]);
        t.animal_id.push_back(cells[1]);
        t.values.push_back(std::move(row));
    }
    return t;
}

inline TraitTable load_traits_csv(const std::string& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty()) throw Error(path + ": empty traits file");
    const auto header = detail::split_csv(lines[0].second);
    if (header.size() < 2) throw Error(path + ": header needs animal_id and at least one trait");
    TraitTable t;
    const auto& known = known_traits();
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (std::find(known.begin(), known.end(), header[c]) == known.end()) {
            throw Error(path + ": unknown trait '" + header[c] + "' in column " + std::to_string(c + 1));
        }
        t.traits.push_back(header[c]);
    }
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto& [no, text] = lines[r];
        const auto cells = detail::split_csv(text);
        if (cells.size() != header.size()) {
            throw Error(path + ": row " + std::to_string(no) + " has " + std::to_string(cells.size()) +
                        " cells, expected " + std::to_string(header.size()));
        }
        std::vector<double> row;
        for (std::size_t c = 1; c < cells.size(); ++c) {
            if (cells[c].empty() || cells[c] == "NA" || cells[c] == "NaN") {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            const auto v = detail::parse_number(cells[c]);
            if (!v) {
                throw Error(path + ": row " + std::to_string(no) + ", column " + std::to_string(c + 1) +
                            ": not a number: '" + cells[c] + "'");
            }
            row.push_back(*v);
        }
        t.animal_id.push_back(cells[0]);
        t.values.push_back(std::move(row));
    }
    return t;
}

// Shortest round-trip representation; NaN written as empty.
inline std::string fmt_num(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// Writes to a sibling temporary file, then renames over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) throw Error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

inline std::string spectra_to_csv(const SpectraTable& t, const std::string& comment = "") {
    std::ostringstream o;
    if (!comment.empty()) o << comment;
    o << "sample_id,animal_id";
    for (double w : t.wavenumbers) o << ',' << fmt_num(w);
    o << '\n';
    for (std::size_t i = 0; i < t.samples(); ++i) {
        o << t.sample_id[i] << ',' << t.animal_id[i];
        for (double v : t.values[i]) o << ',' << fmt_num(v);
        o << '\n';
    }
    return o.str();
}

inline std::string traits_to_csv(const TraitTable& t, const std::string& comment = "") {
    std::ostringstream o;
    if (!comment.empty()) o << comment;
    o << "animal_id";
    for (const auto& n : t.traits) o << ',' << n;
    o << '\n';
    for (std::size_t i = 0; i < t.rows(); ++i) {
        o << t.animal_id[i];
        for (double v : t.values[i]) o << ',' << fmt_num(v);
        o << '\n';
    }
    return o.str();
}

}  // namespace wavescale::pipeline
