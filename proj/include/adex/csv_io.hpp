#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "adex/error.hpp"
#include "adex/types.hpp"

namespace adex {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r')
        out.back().pop_back();
    return out;
}

inline double parse_double(std::string_view token, const std::string& context) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value))
        throw FormatError("unparseable number '" + std::string(token) + "' in " + context);
    return value;
}

inline std::int64_t parse_int(std::string_view token, const std::string& context) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw FormatError("unparseable integer '" + std::string(token) + "' in " + context);
    return value;
}

/// Shortest round-trip decimal form of a double.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        out << content;
        if (!out)
            throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot move '" + tmp.string() + "' into place: " + ec.message());
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Trace files: UTF-8 CSV, header "t,<feature1>,...", one row per record,
// integer timestamps, decimal float values, missing cells empty.
// ---------------------------------------------------------------------------

inline Trace read_trace(const std::filesystem::path& path, double fill_value = 0.0) {
    auto in = detail::open_input(path);
    std::string line;
    if (!std::getline(in, line))
        throw FormatError("'" + path.string() + "': missing header row");
    auto header = detail::split_csv_line(line);
    if (header.empty() || header[0] != "t")
        throw FormatError("'" + path.string() + "': header must start with 't'");
    if (header.size() < 2)
        throw FormatError("'" + path.string() + "': header names no features");

    Trace trace;
    trace.trace_id = path.stem().string();
    trace.features.assign(header.begin() + 1, header.end());

    std::vector<double> cells;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r")
            continue;
        auto tokens = detail::split_csv_line(line);
        if (tokens.size() != header.size())
            throw FormatError("'" + path.string() + "' row " + std::to_string(row + 1) +
                              ": expected " + std::to_string(header.size()) + " columns, got " +
                              std::to_string(tokens.size()));
        trace.timestamps.push_back(detail::parse_int(tokens[0], path.string()));
        for (std::size_t c = 1; c < tokens.size(); ++c)
            cells.push_back(tokens[c].empty() ? fill_value
                                              : detail::parse_double(tokens[c], path.string()));
        ++row;
    }

    trace.values.rows = trace.timestamps.size();
    trace.values.cols = trace.features.size();
    trace.values.data = std::move(cells);
    trace.validate();
    return trace;
}

inline void write_trace(const Trace& trace, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "t";
    for (const auto& f : trace.features)
        out << "," << f;
    out << "\n";
    for (std::size_t r = 0; r < trace.record_count(); ++r) {
        out << trace.timestamps[r];
        for (std::size_t c = 0; c < trace.feature_count(); ++c)
            out << "," << detail::format_double(trace.values.at(r, c));
        out << "\n";
    }
    detail::write_file_atomic(path, out.str());
}

// ---------------------------------------------------------------------------
// Ground-truth files
// ---------------------------------------------------------------------------

inline constexpr const char* kGroundTruthHeader =
    "app_id,trace_id,anomaly_type,root_cause_start,root_cause_end,"
    "extended_effect_start,extended_effect_end";

inline GroundTruthTable read_ground_truth(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    std::string line;
    if (!std::getline(in, line))
        throw FormatError("'" + path.string() + "': missing header row");
    auto header = detail::split_csv_line(line);
    if (header.size() != 7 || header[0] != "app_id" || header[1] != "trace_id")
        throw FormatError("'" + path.string() + "': expected the 7-column ground-truth header");

    GroundTruthTable table;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r")
            continue;
        auto tokens = detail::split_csv_line(line);
        if (tokens.size() != 7)
            throw FormatError("'" + path.string() + "' row " + std::to_string(row + 1) +
                              ": expected 7 columns");
        GroundTruthEntry e;
        e.app_id = static_cast<int>(detail::parse_int(tokens[0], path.string()));
        e.trace_id = tokens[1];
        e.anomaly_type = anomaly_type_from_string(tokens[2]);
        e.root_cause_start = detail::parse_int(tokens[3], path.string());
        e.root_cause_end = detail::parse_int(tokens[4], path.string());
        if (!tokens[5].empty() || !tokens[6].empty()) {
            if (tokens[5].empty() || tokens[6].empty())
                throw FormatError("'" + path.string() + "' row " + std::to_string(row + 1) +
                                  ": half-specified EEI columns");
            e.extended_effect_start = detail::parse_int(tokens[5], path.string());
            e.extended_effect_end = detail::parse_int(tokens[6], path.string());
        }
        e.validate();
        table.push_back(std::move(e));
        ++row;
    }
    return table;
}

inline void write_ground_truth(const GroundTruthTable& table, const std::filesystem::path& path) {
    std::ostringstream out;
    out << kGroundTruthHeader << "\n";
    for (const auto& e : table) {
        out << e.app_id << "," << e.trace_id << "," << to_string(e.anomaly_type) << ","
            << e.root_cause_start << "," << e.root_cause_end << ",";
        if (e.has_eei())
            out << *e.extended_effect_start << "," << *e.extended_effect_end;
        else
            out << ",";
        out << "\n";
    }
    detail::write_file_atomic(path, out.str());
}

// ---------------------------------------------------------------------------
// Score files: CSV "t,score" per trace (external-detector import/export).
// ---------------------------------------------------------------------------

inline ScoreSeries read_score_series(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    std::string line;
    if (!std::getline(in, line))
        throw FormatError("'" + path.string() + "': missing header row");
    auto header = detail::split_csv_line(line);
    if (header.size() != 2 || header[0] != "t" || header[1] != "score")
        throw FormatError("'" + path.string() + "': expected header 't,score'");
    ScoreSeries series;
    series.trace_id = path.stem().string();
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r")
            continue;
        auto tokens = detail::split_csv_line(line);
        if (tokens.size() != 2)
            throw FormatError("'" + path.string() + "': expected 2 columns");
        series.scores.push_back(detail::parse_double(tokens[1], path.string()));
    }
    return series;
}

inline void write_score_series(const ScoreSeries& series,
                               const std::vector<std::int64_t>& timestamps,
                               const std::filesystem::path& path) {
    std::ostringstream out;
    out << "t,score\n";
    for (std::size_t i = 0; i < series.scores.size(); ++i) {
        std::int64_t t = i < timestamps.size() ? timestamps[i] : static_cast<std::int64_t>(i);
        out << t << "," << detail::format_double(series.scores[i]) << "\n";
    }
    detail::write_file_atomic(path, out.str());
}

} // namespace adex
