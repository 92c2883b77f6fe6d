#pragma once

// Raw CSV ingestion and dataset assembly.
//
// Raw CSV grammar: UTF-8, header `period,value`, LF or CRLF line endings,
// period `YYYYQ[1-4]` (quarterly files) or `YYYY-MM` (monthly files), value a
// decimal literal or empty (a missing observation).
//
// Manifest (see keyvalue.hpp for the syntax):
//
//   country = US
//   [tbill_3m]
//   file = raw/tbill_3m.csv        # relative to the manifest
//   frequency = monthly            # quarterly | monthly
//   aggregation = average          # average | last   (monthly only)
//   transform = none               # none | annualized_growth | pct_change |
//                                  # ratio_numerator | ratio_denominator
//   ratio = debt_gdp_ratio         # output id, ratio_* entries only
//
// Each non-ratio entry yields a series under its block name; each ratio pair
// yields one series under its `ratio` id.

#include "rfcast/country.hpp"
#include "rfcast/error.hpp"
#include "rfcast/keyvalue.hpp"
#include "rfcast/quarter.hpp"
#include "rfcast/series.hpp"
#include "rfcast/text.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace rfcast {

enum class Frequency { quarterly, monthly };
enum class Aggregation { average, last };
enum class Transform { none, annualized_growth, pct_change, ratio_numerator, ratio_denominator };

struct RawObservation {
    std::string period;
    std::optional<double> value;  // nullopt marks a missing observation
};

struct YearMonth {
    int year;
    int month;

    [[nodiscard]] std::int64_t ordinal() const noexcept { return static_cast<std::int64_t>(year) * 12 + (month - 1); }
    [[nodiscard]] Quarter quarter() const { return {year, (month - 1) / 3 + 1}; }
};

[[nodiscard]] inline YearMonth parse_year_month(std::string_view text) {
    auto fail = [&] { return ParseError("invalid month '" + std::string(text) + "': expected YYYY-MM"); };
    if (text.size() != 7 || text[4] != '-') {
        throw fail();
    }
    for (std::size_t i : {0U, 1U, 2U, 3U, 5U, 6U}) {
        if (text[i] < '0' || text[i] > '9') {
            throw fail();
        }
    }
    const int year = std::stoi(std::string(text.substr(0, 4)));
    const int month = std::stoi(std::string(text.substr(5, 2)));
    if (month < 1 || month > 12) {
        throw fail();
    }
    return {year, month};
}

namespace detail {

inline std::int64_t period_ordinal(const std::string& period, Frequency f) {
    return f == Frequency::quarterly ? parse_quarter(period).ordinal() : parse_year_month(period).ordinal();
}

} // namespace detail

[[nodiscard]] inline std::vector<RawObservation> parse_csv(std::istream& in, Frequency frequency,
                                                           const std::string& source) {
    std::vector<RawObservation> obs;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line_no == 1) {
            if (line.starts_with("\xEF\xBB\xBF")) {
                line.erase(0, 3);
            }
            if (line != "period,value") {
                throw ParseError(source + ": line 1: expected header 'period,value'");
            }
            continue;
        }
        if (line.empty()) {
            continue;
        }
        const auto where = source + ": line " + std::to_string(line_no);
        const auto fields = split(line, ',');
        if (fields.size() != 2) {
            throw ParseError(where + ": expected 2 fields, got " + std::to_string(fields.size()));
        }
        RawObservation o{fields[0], std::nullopt};
        try {
            (void)detail::period_ordinal(o.period, frequency);
            if (!fields[1].empty()) {
                o.value = parse_real(fields[1]);
            }
        } catch (const Error& e) {
            throw ParseError(where + ": " + e.what());
        }
        if (!seen.insert(o.period).second) {
            throw ParseError(where + ": duplicate period '" + o.period + "'");
        }
        obs.push_back(std::move(o));
    }
    if (line_no == 0) {
        throw ParseError(source + ": line 1: missing header 'period,value'");
    }
    return obs;
}

/// Reads a `period,value` file; every period must match `frequency`'s grammar.
[[nodiscard]] inline std::vector<RawObservation> load_csv(const std::string& path, Frequency frequency) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    return parse_csv(in, frequency, path);
}

namespace detail {

template <class Key>
void require_contiguous(const std::vector<std::pair<Key, double>>& sorted, const std::string& id, auto fmt) {
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].first.ordinal() != sorted[i - 1].first.ordinal() + 1) {
            throw AlignmentError("series '" + id + "' has a gap between " + fmt(sorted[i - 1].first) + " and " +
                                 fmt(sorted[i].first));
        }
    }
}

} // namespace detail

/// Quarterly observations to a gap-free series. Missing values are errors.
[[nodiscard]] inline QuarterlySeries quarterly_series(const std::vector<RawObservation>& obs, const std::string& id) {
    std::vector<std::pair<Quarter, double>> rows;
    for (const auto& o : obs) {
        if (!o.value) {
            throw DomainError("series '" + id + "' is missing a value for " + o.period);
        }
        rows.emplace_back(parse_quarter(o.period), *o.value);
    }
    if (rows.empty()) {
        throw DomainError("series '" + id + "' has no observations");
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    detail::require_contiguous(rows, id, [](Quarter q) { return format_quarter(q); });
    std::vector<double> values;
    for (const auto& r : rows) {
        values.push_back(r.second);
    }
    return {id, rows.front().first, std::move(values)};
}

/// Monthly observations to quarterly: 3-month mean (`average`) or final month (`last`).
[[nodiscard]] inline QuarterlySeries monthly_to_quarterly(const std::vector<RawObservation>& obs,
                                                          Aggregation aggregation, const std::string& id = "series") {
    std::vector<std::pair<YearMonth, std::optional<double>>> rows;
    for (const auto& o : obs) {
        rows.emplace_back(parse_year_month(o.period), o.value);
    }
    if (rows.empty()) {
        throw DomainError("series '" + id + "' has no observations");
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first.ordinal() < b.first.ordinal(); });

    // Group present months by quarter.
    std::map<std::int64_t, std::vector<std::pair<int, double>>> by_quarter;
    for (const auto& [ym, v] : rows) {
        auto& bucket = by_quarter[ym.quarter().ordinal()];
        if (v) {
            bucket.emplace_back(ym.month, *v);
        }
    }
    std::vector<double> values;
    std::optional<std::int64_t> prev;
    for (const auto& [qord, months] : by_quarter) {
        const Quarter q = Quarter::from_ordinal(qord);
        if (prev && qord != *prev + 1) {
            throw AlignmentError("series '" + id + "' has a gap between " +
                                 format_quarter(Quarter::from_ordinal(*prev)) + " and " + format_quarter(q));
        }
        prev = qord;
        const int final_month = q.q * 3;
        if (aggregation == Aggregation::average) {
            if (months.size() != 3) {
                throw DomainError("series '" + id + "': incomplete quarter " + format_quarter(q) + " (" +
                                  std::to_string(months.size()) + " of 3 months present)");
            }
            values.push_back((months[0].second + months[1].second + months[2].second) / 3.0);
        } else {
            if (months.empty() || months.back().first != final_month) {
                throw DomainError("series '" + id + "': incomplete quarter " + format_quarter(q) +
                                  " (final month missing)");
            }
            values.push_back(months.back().second);
        }
    }
    return {id, Quarter::from_ordinal(by_quarter.begin()->first), std::move(values)};
}

struct ManifestEntry {
    std::string series_id;
    std::filesystem::path file_path;
    Frequency frequency = Frequency::quarterly;
    Transform transform = Transform::none;
    std::optional<Aggregation> aggregation;
    std::string ratio_id;  // output id for ratio_* entries
};

struct DatasetManifest {
    Country country = Country::US;
    std::vector<ManifestEntry> entries;
};

namespace detail {

inline Frequency parse_frequency(const std::string& s, const std::string& ctx) {
    if (s == "quarterly") {
        return Frequency::quarterly;
    }
    if (s == "monthly") {
        return Frequency::monthly;
    }
    throw ConfigError(ctx + ": unknown frequency '" + s + "'");
}

inline Aggregation parse_aggregation(const std::string& s, const std::string& ctx) {
    if (s == "average") {
        return Aggregation::average;
    }
    if (s == "last") {
        return Aggregation::last;
    }
    throw ConfigError(ctx + ": unknown aggregation '" + s + "'");
}

inline Transform parse_transform(const std::string& s, const std::string& ctx) {
    static const std::map<std::string, Transform> names{{"none", Transform::none},
                                                         {"annualized_growth", Transform::annualized_growth},
                                                         {"pct_change", Transform::pct_change},
                                                         {"ratio_numerator", Transform::ratio_numerator},
                                                         {"ratio_denominator", Transform::ratio_denominator}};
    const auto it = names.find(s);
    if (it == names.end()) {
        throw ConfigError(ctx + ": unknown transform '" + s + "'");
    }
    return it->second;
}

} // namespace detail

/// Parses and validates a manifest; relative file paths resolve against `base_dir`.
[[nodiscard]] inline DatasetManifest parse_manifest(const KeyValueFile& kv, const std::filesystem::path& base_dir,
                                                    const std::string& source) {
    DatasetManifest m;
    kv.top().require_known({"country"}, source);
    m.country = parse_country(kv.top().get("country", source));
    for (std::size_t i = 1; i < kv.blocks.size(); ++i) {
        const auto& b = kv.blocks[i];
        const auto ctx = source + " [" + b.name + "]";
        b.require_known({"file", "frequency", "aggregation", "transform", "ratio"}, ctx);
        ManifestEntry e;
        e.series_id = b.name;
        e.file_path = b.get("file", ctx);
        if (e.file_path.is_relative()) {
            e.file_path = base_dir / e.file_path;
        }
        e.frequency = detail::parse_frequency(b.get("frequency", ctx), ctx);
        e.transform = detail::parse_transform(b.get_or("transform", "none"), ctx);
        if (e.frequency == Frequency::monthly) {
            e.aggregation = detail::parse_aggregation(b.get("aggregation", ctx), ctx);
        } else if (b.has("aggregation")) {
            throw ConfigError(ctx + ": aggregation applies to monthly series only");
        }
        const bool is_ratio = e.transform == Transform::ratio_numerator || e.transform == Transform::ratio_denominator;
        if (is_ratio) {
            e.ratio_id = b.get("ratio", ctx);
        } else if (b.has("ratio")) {
            throw ConfigError(ctx + ": 'ratio' is only valid with a ratio_numerator/ratio_denominator transform");
        }
        m.entries.push_back(std::move(e));
    }
    // Ratio entries must pair up exactly, and no output id may collide.
    std::map<std::string, std::pair<int, int>> pairs;
    std::set<std::string> outputs;
    for (const auto& e : m.entries) {
        if (e.transform == Transform::ratio_numerator) {
            ++pairs[e.ratio_id].first;
        } else if (e.transform == Transform::ratio_denominator) {
            ++pairs[e.ratio_id].second;
        } else if (!outputs.insert(e.series_id).second) {
            throw ConfigError(source + ": duplicate series id '" + e.series_id + "'");
        }
    }
    for (const auto& [id, counts] : pairs) {
        if (counts.first != 1 || counts.second != 1) {
            throw ConfigError(source + ": ratio '" + id + "' needs exactly one numerator and one denominator");
        }
        if (!outputs.insert(id).second) {
            throw ConfigError(source + ": ratio id '" + id + "' collides with another series id");
        }
    }
    return m;
}

[[nodiscard]] inline DatasetManifest load_manifest(const std::filesystem::path& path) {
    return parse_manifest(load_key_value(path.string()), path.parent_path(), path.string());
}

/// Loads every manifest entry, converts to quarterly, applies transforms and
/// joins ratio pairs. Start/end of every assembled series goes to `log`.
[[nodiscard]] inline std::map<std::string, QuarterlySeries> assemble_dataset(const DatasetManifest& manifest,
                                                                            std::ostream* log = nullptr) {
    std::map<std::string, QuarterlySeries> out;
    std::map<std::string, const QuarterlySeries*> numerators;
    std::map<std::string, const QuarterlySeries*> denominators;
    std::vector<QuarterlySeries> ratio_inputs;
    ratio_inputs.reserve(manifest.entries.size());

    for (const auto& e : manifest.entries) {
        try {
            if (!std::filesystem::exists(e.file_path)) {
                throw Error("data file '" + e.file_path.string() + "' not found");
            }
            const auto raw = load_csv(e.file_path.string(), e.frequency);
            QuarterlySeries s = e.frequency == Frequency::monthly ? monthly_to_quarterly(raw, *e.aggregation, e.series_id)
                                                                  : quarterly_series(raw, e.series_id);
            switch (e.transform) {
            case Transform::none:
                break;
            case Transform::annualized_growth:
                s = annualized_growth(s);
                break;
            case Transform::pct_change:
                s = pct_change(s);
                break;
            case Transform::ratio_numerator:
            case Transform::ratio_denominator:
                ratio_inputs.push_back(std::move(s));
                (e.transform == Transform::ratio_numerator ? numerators : denominators)[e.ratio_id] = &ratio_inputs.back();
                continue;
            }
            out.insert_or_assign(e.series_id, std::move(s));
        } catch (const Error& err) {
            throw DataError("series '" + e.series_id + "': " + err.what());
        }
    }
    for (const auto& [id, num] : numerators) {
        try {
            out.insert_or_assign(id, ratio_series(*num, *denominators.at(id), id));
        } catch (const Error& err) {
            throw DataError("series '" + id + "': " + err.what());
        }
    }
    if (log != nullptr) {
        for (const auto& [id, s] : out) {
            *log << "series " << id << ": " << format_quarter(s.start()) << ".." << format_quarter(s.end()) << " ("
                 << s.size() << " quarters)\n";
        }
    }
    return out;
}

} // namespace rfcast
