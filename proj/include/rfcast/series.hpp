#pragma once

#include "rfcast/error.hpp"
#include "rfcast/quarter.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace rfcast {

/// Gap-free quarterly sequence: values[i] belongs to quarter_add(start, i).
class QuarterlySeries {
public:
    QuarterlySeries(std::string id, Quarter start, std::vector<double> values)
        : id_(std::move(id)), start_(start), values_(std::move(values)) {
        if (values_.empty()) {
            throw DomainError("series '" + id_ + "' must contain at least one value");
        }
    }

    [[nodiscard]] const std::string& id() const noexcept { return id_; }
    [[nodiscard]] Quarter start() const noexcept { return start_; }
    [[nodiscard]] Quarter end() const { return quarter_add(start_, static_cast<std::int64_t>(values_.size()) - 1); }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] QuarterRange range() const { return {start_, end()}; }

    [[nodiscard]] bool covers(Quarter q) const { return start_ <= q && q <= end(); }
    [[nodiscard]] bool covers(Quarter first, Quarter last) const { return covers(first) && covers(last); }

    /// Value at quarter `q`; CoverageError naming the series and quarter when out of range.
    [[nodiscard]] double at(Quarter q) const {
        if (!covers(q)) {
            throw CoverageError("series '" + id_ + "' has no value for " + format_quarter(q) +
                                " (covers " + format_quarter(start_) + ".." + format_quarter(end()) + ")");
        }
        return values_[static_cast<std::size_t>(quarter_diff(q, start_))];
    }

    [[nodiscard]] QuarterlySeries renamed(std::string id) const { return {std::move(id), start_, values_}; }

    [[nodiscard]] QuarterlySeries slice(Quarter first, Quarter last) const {
        if (last < first) {
            throw AlignmentError("empty slice requested from series '" + id_ + "'");
        }
        (void)at(first);
        (void)at(last);
        const auto off = static_cast<std::ptrdiff_t>(quarter_diff(first, start_));
        const auto len = static_cast<std::ptrdiff_t>(quarter_diff(last, first)) + 1;
        return {id_, first, std::vector<double>(values_.begin() + off, values_.begin() + off + len)};
    }

    friend bool operator==(const QuarterlySeries&, const QuarterlySeries&) = default;

private:
    std::string id_;
    Quarter start_;
    std::vector<double> values_;
};

namespace detail {

inline void require_positive(const QuarterlySeries& s, const char* op) {
    if (s.size() < 2) {
        throw DomainError(std::string(op) + " needs at least two observations in series '" + s.id() + "'");
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(s.values()[i] > 0.0)) {
            throw DomainError(std::string(op) + ": non-positive value " + std::to_string(s.values()[i]) +
                              " in series '" + s.id() + "' at " +
                              format_quarter(quarter_add(s.start(), static_cast<std::int64_t>(i))));
        }
    }
}

} // namespace detail

/// Compound annualised quarter-on-quarter growth in percent: ((l_t / l_{t-1})^4 - 1) * 100.
[[nodiscard]] inline QuarterlySeries annualized_growth(const QuarterlySeries& levels) {
    detail::require_positive(levels, "annualized_growth");
    const auto& v = levels.values();
    std::vector<double> out(v.size() - 1);
    for (std::size_t i = 1; i < v.size(); ++i) {
        out[i - 1] = (std::pow(v[i] / v[i - 1], 4.0) - 1.0) * 100.0;
    }
    return {levels.id(), quarter_add(levels.start(), 1), std::move(out)};
}

/// Quarter-on-quarter percent change: (v_t / v_{t-1} - 1) * 100.
[[nodiscard]] inline QuarterlySeries pct_change(const QuarterlySeries& series) {
    detail::require_positive(series, "pct_change");
    const auto& v = series.values();
    std::vector<double> out(v.size() - 1);
    for (std::size_t i = 1; i < v.size(); ++i) {
        out[i - 1] = 100.0 * (v[i] - v[i - 1]) / v[i - 1];
    }
    return {series.id(), quarter_add(series.start(), 1), std::move(out)};
}

/// Element-wise numerator / denominator over the overlap of the two ranges.
[[nodiscard]] inline QuarterlySeries ratio_series(const QuarterlySeries& numerator,
                                                  const QuarterlySeries& denominator,
                                                  std::string id = {}) {
    const Quarter first = std::max(numerator.start(), denominator.start());
    const Quarter last = std::min(numerator.end(), denominator.end());
    if (last < first) {
        throw AlignmentError("series '" + numerator.id() + "' and '" + denominator.id() + "' do not overlap");
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(quarter_diff(last, first) + 1));
    for (Quarter q = first; q <= last; q = quarter_add(q, 1)) {
        const double d = denominator.at(q);
        if (d == 0.0) {
            throw DomainError("zero denominator in '" + denominator.id() + "' at " + format_quarter(q));
        }
        out.push_back(numerator.at(q) / d);
    }
    if (id.empty()) {
        id = numerator.id() + "_over_" + denominator.id();
    }
    return {std::move(id), first, std::move(out)};
}

} // namespace rfcast
