#pragma once

#include "rfcast/error.hpp"

#include <charconv>
#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace rfcast {

/// A calendar quarter, e.g. 1990Q2.
struct Quarter {
    int year = 1970;
    int q = 1;  // 1..4

    constexpr Quarter() = default;
    constexpr Quarter(int y, int quarter) : year(y), q(quarter) {
        if (quarter < 1 || quarter > 4) {
            throw DomainError("quarter must be in 1..4, got " + std::to_string(quarter));
        }
    }

    /// Quarters since year 0, Q1. Floor semantics make negative years consistent.
    [[nodiscard]] constexpr std::int64_t ordinal() const noexcept {
        return static_cast<std::int64_t>(year) * 4 + (q - 1);
    }

    [[nodiscard]] static constexpr Quarter from_ordinal(std::int64_t ord) {
        std::int64_t y = ord / 4;
        std::int64_t r = ord % 4;
        if (r < 0) {
            r += 4;
            --y;
        }
        return Quarter(static_cast<int>(y), static_cast<int>(r) + 1);
    }

    friend constexpr bool operator==(const Quarter&, const Quarter&) = default;
    friend constexpr std::strong_ordering operator<=>(const Quarter& a, const Quarter& b) {
        return a.ordinal() <=> b.ordinal();
    }
};

[[nodiscard]] constexpr Quarter quarter_add(Quarter q, std::int64_t n) {
    return Quarter::from_ordinal(q.ordinal() + n);
}

/// Signed number of quarters from `b` to `a`.
[[nodiscard]] constexpr std::int64_t quarter_diff(Quarter a, Quarter b) noexcept {
    return a.ordinal() - b.ordinal();
}

[[nodiscard]] inline std::string format_quarter(Quarter q) {
    return std::to_string(q.year) + "Q" + std::to_string(q.q);
}

/// Parses "<year>Q<1-4>". Anything else is a ParseError naming the token.
[[nodiscard]] inline Quarter parse_quarter(std::string_view text) {
    auto fail = [&](const char* why) -> ParseError {
        return ParseError("invalid quarter '" + std::string(text) + "': " + why);
    };
    const auto pos = text.find('Q');
    if (pos == std::string_view::npos || pos == 0 || pos + 2 != text.size()) {
        throw fail("expected <year>Q<1-4>");
    }
    int year = 0;
    const auto year_part = text.substr(0, pos);
    const auto* first = year_part.data();
    const auto* last = first + year_part.size();
    if (*first == '+') {
        throw fail("bad year");
    }
    auto [ptr, ec] = std::from_chars(first, last, year);
    if (ec != std::errc{} || ptr != last) {
        throw fail("bad year");
    }
    const char digit = text[pos + 1];
    if (digit < '1' || digit > '4') {
        throw fail("quarter digit must be 1..4");
    }
    return Quarter(year, digit - '0');
}

inline std::ostream& operator<<(std::ostream& os, Quarter q) {
    return os << format_quarter(q);
}

/// Inclusive quarter range, as used for sample windows (e.g. 1990Q2:2016Q2).
struct QuarterRange {
    Quarter first;
    Quarter last;

    [[nodiscard]] std::int64_t size() const noexcept {
        return last < first ? 0 : quarter_diff(last, first) + 1;
    }
    [[nodiscard]] bool contains(Quarter q) const noexcept { return first <= q && q <= last; }

    friend bool operator==(const QuarterRange&, const QuarterRange&) = default;
};

/// Parses "YYYYQn:YYYYQn". The range may not be reversed.
[[nodiscard]] inline QuarterRange parse_quarter_range(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw ParseError("invalid window '" + std::string(text) + "': expected YYYYQn:YYYYQn");
    }
    QuarterRange r{parse_quarter(text.substr(0, colon)), parse_quarter(text.substr(colon + 1))};
    if (r.last < r.first) {
        throw ParseError("invalid window '" + std::string(text) + "': first quarter after last");
    }
    return r;
}

} // namespace rfcast
