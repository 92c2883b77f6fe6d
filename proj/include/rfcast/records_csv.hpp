#pragma once

// Prediction CSV: header `quarter,predicted,actual,train_window_end`, quarters
// as YYYYQn, reals with six decimals, LF line endings.

#include "rfcast/backtest.hpp"
#include "rfcast/error.hpp"
#include "rfcast/quarter.hpp"
#include "rfcast/text.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace rfcast {

inline constexpr const char* kRecordsHeader = "quarter,predicted,actual,train_window_end";

[[nodiscard]] inline std::string format_fixed(double v, int decimals = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    std::string s(buf);
    // Avoid "-0.000000".
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') {
        s.erase(0, 1);
    }
    return s;
}

inline void write_records_csv(std::ostream& out, std::span<const PredictionRecord> records) {
    out << kRecordsHeader << '\n';
    for (const auto& r : records) {
        out << format_quarter(r.quarter) << ',' << format_fixed(r.predicted) << ',' << format_fixed(r.actual) << ','
            << format_quarter(r.train_window_end) << '\n';
    }
}

[[nodiscard]] inline std::vector<PredictionRecord> read_records_csv(std::istream& in) {
    std::vector<PredictionRecord> records;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (!header_seen) {
            if (line != kRecordsHeader) {
                throw ParseError("line 1: expected header '" + std::string(kRecordsHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 4) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                             std::to_string(fields.size()));
        }
        try {
            records.push_back({parse_quarter(fields[0]), parse_real(fields[1]), parse_real(fields[2]),
                               parse_quarter(fields[3])});
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        } catch (const DomainError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!header_seen) {
        throw ParseError("line 1: empty predictions file");
    }
    return records;
}

} // namespace rfcast
