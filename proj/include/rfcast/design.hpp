#pragma once

#include "rfcast/error.hpp"
#include "rfcast/quarter.hpp"
#include "rfcast/series.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rfcast {

/// Strictly increasing positive lags, in quarters.
class LagSpec {
public:
    LagSpec(std::initializer_list<int> lags) : LagSpec(std::vector<int>(lags)) {}
    explicit LagSpec(std::vector<int> lags) : lags_(std::move(lags)) {
        if (lags_.empty()) {
            throw ConfigError("lag spec must contain at least one lag");
        }
        for (std::size_t i = 0; i < lags_.size(); ++i) {
            if (lags_[i] < 1) {
                throw ConfigError("lags must be >= 1, got " + std::to_string(lags_[i]));
            }
            if (i > 0 && lags_[i] <= lags_[i - 1]) {
                throw ConfigError("lags must be strictly increasing");
            }
        }
    }

    [[nodiscard]] const std::vector<int>& lags() const noexcept { return lags_; }
    [[nodiscard]] int min() const noexcept { return lags_.front(); }
    [[nodiscard]] int max() const noexcept { return lags_.back(); }
    [[nodiscard]] std::size_t size() const noexcept { return lags_.size(); }

    friend bool operator==(const LagSpec&, const LagSpec&) = default;

private:
    std::vector<int> lags_;
};

/// Dense row-major matrix; just enough for design matrices and forests.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    [[nodiscard]] double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    [[nodiscard]] std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    [[nodiscard]] std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

    /// First `n` rows as a new matrix.
    [[nodiscard]] Matrix head(std::size_t n) const {
        Matrix out(n, cols_);
        std::copy_n(data_.begin(), n * cols_, out.data_.begin());
        return out;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct DesignMatrix {
    std::vector<Quarter> target_quarters;
    std::vector<double> y;
    Matrix X;
    std::vector<std::string> feature_names;
};

/// Called for every feature cell read: (series id, quarter read, target quarter of the row).
/// Used to audit that no row consumes data from after its forecast origin.
using FeatureAccessObserver = std::function<void(const std::string&, Quarter, Quarter)>;

namespace detail {

inline void require_coverage(const QuarterlySeries& s, Quarter first, Quarter last) {
    for (Quarter q : {first, last}) {
        if (!s.covers(q)) {
            throw CoverageError("insufficient history: series '" + s.id() + "' is missing " + format_quarter(q) +
                                " (covers " + format_quarter(s.start()) + ".." + format_quarter(s.end()) + ")");
        }
    }
}

} // namespace detail

/// Feature row for one target quarter, columns ordered series-major then lag ascending.
[[nodiscard]] inline std::vector<double> feature_row(std::span<const QuarterlySeries> features, const LagSpec& lag_spec,
                                                     Quarter target, const FeatureAccessObserver& observer = {}) {
    std::vector<double> row;
    row.reserve(features.size() * lag_spec.size());
    for (const auto& s : features) {
        detail::require_coverage(s, quarter_add(target, -lag_spec.max()), quarter_add(target, -lag_spec.min()));
        for (int k : lag_spec.lags()) {
            const Quarter src = quarter_add(target, -k);
            if (observer) {
                observer(s.id(), src, target);
            }
            row.push_back(s.at(src));
        }
    }
    return row;
}

/// Target vector plus lagged feature matrix for targets first_target..last_target.
[[nodiscard]] inline DesignMatrix build_design_matrix(const QuarterlySeries& target,
                                                      std::span<const QuarterlySeries> features,
                                                      const LagSpec& lag_spec, Quarter first_target,
                                                      Quarter last_target,
                                                      const FeatureAccessObserver& observer = {}) {
    if (last_target < first_target) {
        throw AlignmentError("design matrix target window is empty: " + format_quarter(first_target) + ".." +
                             format_quarter(last_target));
    }
    if (features.empty()) {
        throw ConfigError("design matrix needs at least one feature series");
    }
    detail::require_coverage(target, first_target, last_target);
    for (const auto& s : features) {
        detail::require_coverage(s, quarter_add(first_target, -lag_spec.max()),
                                 quarter_add(last_target, -lag_spec.min()));
    }

    const auto n = static_cast<std::size_t>(quarter_diff(last_target, first_target) + 1);
    const std::size_t p = features.size() * lag_spec.size();
    DesignMatrix dm;
    dm.X = Matrix(n, p);
    dm.y.reserve(n);
    dm.target_quarters.reserve(n);
    for (const auto& s : features) {
        for (int k : lag_spec.lags()) {
            dm.feature_names.push_back(s.id() + "_lag" + std::to_string(k));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Quarter tq = quarter_add(first_target, static_cast<std::int64_t>(i));
        dm.target_quarters.push_back(tq);
        dm.y.push_back(target.at(tq));
        const auto row = feature_row(features, lag_spec, tq, observer);
        std::copy(row.begin(), row.end(), dm.X.row(i).begin());
    }
    return dm;
}

} // namespace rfcast
