#pragma once

// Expanding-window walk-forward backtests and forecast-evaluation regressions.
//
// For each predicted quarter T in [first_predict, last_predict] the model is
// refit on targets train_start..T-1 and applied to the feature row of T.
// Training targets run through T-1 for every horizon, so for h > 1 the most
// recent training targets would not yet have been published at a genuine
// forecast origin. This replicates the published protocol rather than a
// real-time one. Feature values, by contrast, never come from after
// T - min(lags).

#include "rfcast/country.hpp"
#include "rfcast/design.hpp"
#include "rfcast/error.hpp"
#include "rfcast/forest.hpp"
#include "rfcast/forest_io.hpp"
#include "rfcast/ols.hpp"
#include "rfcast/parallel.hpp"
#include "rfcast/quarter.hpp"
#include "rfcast/rng.hpp"
#include "rfcast/series.hpp"

#include <bit>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rfcast {

enum class ModelKind { random_forest, ols_linear };

[[nodiscard]] inline std::string_view to_string(ModelKind m) {
    return m == ModelKind::random_forest ? "random_forest" : "ols_linear";
}

/// Accepts "random_forest"/"rf" and "ols_linear"/"ols".
[[nodiscard]] inline ModelKind parse_model_kind(std::string_view s) {
    if (s == "random_forest" || s == "rf") {
        return ModelKind::random_forest;
    }
    if (s == "ols_linear" || s == "ols") {
        return ModelKind::ols_linear;
    }
    throw ConfigError("unknown model '" + std::string(s) + "' (expected rf or ols)");
}

struct HorizonSpec {
    int horizon;
    LagSpec lag_spec;

    HorizonSpec(int h, LagSpec lags) : horizon(h), lag_spec(std::move(lags)) {
        if (h != 1 && h != 3 && h != 6) {
            throw ConfigError("horizon must be 1, 3 or 6, got " + std::to_string(h));
        }
        if (lag_spec.min() < horizon) {
            throw ConfigError("lag " + std::to_string(lag_spec.min()) + " is not observable " +
                              std::to_string(horizon) + " quarters ahead");
        }
    }

    /// US lag windows: h=1 -> 1..4, h=3 -> 3..6, h=6 -> 6,7.
    /// UK: h=1 and h=3 as US; h=6 -> 6..9, which is an inferred choice.
    [[nodiscard]] static HorizonSpec preset(Country country, int h) {
        switch (h) {
        case 1:
            return {1, LagSpec{1, 2, 3, 4}};
        case 3:
            return {3, LagSpec{3, 4, 5, 6}};
        case 6:
            return country == Country::US ? HorizonSpec{6, LagSpec{6, 7}} : HorizonSpec{6, LagSpec{6, 7, 8, 9}};
        default:
            throw ConfigError("no preset lag window for horizon " + std::to_string(h));
        }
    }
};

struct BacktestConfig {
    Quarter train_start{1970, 2};
    Quarter first_predict{1990, 2};
    Quarter last_predict{2016, 2};
    ModelKind model = ModelKind::random_forest;
    HorizonSpec horizon_spec = HorizonSpec::preset(Country::US, 1);
    ForestConfig forest_config;
    std::string target_series_id = "gdp_growth_third_estimate";
    std::vector<std::string> feature_series_ids{"tbill_3m", "gov_bond_10y", "equity_pct_change", "debt_gdp_ratio"};

    void validate() const {
        if (!(train_start < first_predict)) {
            throw ConfigError("train_start must precede first_predict");
        }
        if (last_predict < first_predict) {
            throw ConfigError("last_predict must not precede first_predict");
        }
        if (feature_series_ids.empty()) {
            throw ConfigError("at least one feature series is required");
        }
    }
};

struct PredictionRecord {
    Quarter quarter;
    double predicted = 0.0;
    double actual = 0.0;
    Quarter train_window_end;

    friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

struct RecessionFlag {
    Quarter quarter;
    double predicted = 0.0;
    double actual = 0.0;

    friend bool operator==(const RecessionFlag&, const RecessionFlag&) = default;
};

struct EvaluationReport {
    OlsFit fit;  // actual regressed on predicted
    BiasTest bias;
    std::size_t n = 0;
    double slope_p = 1.0;
    std::vector<RecessionFlag> recession_flags;
};

using Dataset = std::map<std::string, QuarterlySeries>;

/// Counts feature reads that land after the forecast origin of their window.
struct LookAheadAudit {
    std::size_t reads = 0;
    std::size_t violations = 0;
    std::vector<std::string> examples;  // first few violations, for diagnostics

    void merge(const LookAheadAudit& other) {
        reads += other.reads;
        violations += other.violations;
        for (const auto& e : other.examples) {
            if (examples.size() < 10) {
                examples.push_back(e);
            }
        }
    }
};

struct BacktestOptions {
    std::size_t workers = 1;
    LookAheadAudit* audit = nullptr;
    /// When set, per-window forests are cached here, keyed by a fingerprint of
    /// the configuration and the training data.
    std::optional<std::filesystem::path> model_cache;
};

[[nodiscard]] inline const QuarterlySeries& dataset_series(const Dataset& dataset, const std::string& id) {
    const auto it = dataset.find(id);
    if (it == dataset.end()) {
        throw ConfigError("dataset has no series '" + id + "'");
    }
    return it->second;
}

/// Seed of the forest trained to predict `predicted`; independent of all other windows.
[[nodiscard]] inline std::uint64_t window_seed(std::uint64_t master_seed, Quarter predicted) {
    return CounterRng::derive_key(master_seed, static_cast<std::uint64_t>(predicted.ordinal()));
}

namespace detail {

inline std::uint64_t fingerprint(const ForestConfig& c, const Matrix& X, std::span<const double> y) {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    auto feed = [&h](std::uint64_t v) { h = mix64(h ^ (v + kGolden + (h << 6U) + (h >> 2U))); };
    feed(kForestFormatVersion);
    feed(c.n_trees);
    feed(c.mtry.value_or(0));
    feed(c.min_node_size);
    feed(c.bootstrap ? 1 : 0);
    feed(c.seed);
    feed(X.rows());
    feed(X.cols());
    for (double v : X.data()) {
        feed(std::bit_cast<std::uint64_t>(v));
    }
    for (double v : y) {
        feed(std::bit_cast<std::uint64_t>(v));
    }
    return h;
}

inline Forest cached_fit(const ForestConfig& config, const Matrix& X, std::span<const double> y, Quarter predicted,
                         const std::filesystem::path& dir) {
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(fingerprint(config, X, y)));
    const auto path = dir / (format_quarter(predicted) + "-" + hex + ".forest");
    if (std::filesystem::exists(path)) {
        return load_forest(path.string());
    }
    Forest forest = fit_forest(config, X, y, 1);
    std::filesystem::create_directories(dir);
    const auto tmp = path.string() + ".tmp";
    save_forest(tmp, forest);
    std::filesystem::rename(tmp, path);
    return forest;
}

} // namespace detail

/// Walk-forward backtest; one record per quarter in [first_predict, last_predict].
[[nodiscard]] inline std::vector<PredictionRecord> run_backtest(const BacktestConfig& config, const Dataset& dataset,
                                                                const BacktestOptions& options = {}) {
    config.validate();
    const auto& lags = config.horizon_spec.lag_spec;
    const auto& target = dataset_series(dataset, config.target_series_id);
    std::vector<QuarterlySeries> features;
    for (const auto& id : config.feature_series_ids) {
        features.push_back(dataset_series(dataset, id));
    }
    // Check the whole run up front: a gap must fail loudly, never shorten the window.
    detail::require_coverage(target, config.train_start, config.last_predict);
    for (const auto& s : features) {
        detail::require_coverage(s, quarter_add(config.train_start, -lags.max()),
                                 quarter_add(config.last_predict, -lags.min()));
    }

    const auto count = static_cast<std::size_t>(quarter_diff(config.last_predict, config.first_predict) + 1);
    std::vector<PredictionRecord> records(count);
    std::vector<LookAheadAudit> audits(options.audit != nullptr ? count : 0);

    parallel_for(count, options.workers, [&](std::size_t i) {
        const Quarter predicted = quarter_add(config.first_predict, static_cast<std::int64_t>(i));
        const Quarter window_end = quarter_add(predicted, -1);
        FeatureAccessObserver observer;
        if (options.audit != nullptr) {
            const Quarter origin = quarter_add(predicted, -lags.min());
            auto& audit = audits[i];
            observer = [&audit, origin, predicted](const std::string& id, Quarter read, Quarter) {
                ++audit.reads;
                if (origin < read) {
                    ++audit.violations;
                    if (audit.examples.size() < 10) {
                        audit.examples.push_back("window " + format_quarter(predicted) + " read " + id + "@" +
                                                 format_quarter(read));
                    }
                }
            };
        }
        const auto dm = build_design_matrix(target, features, lags, config.train_start, window_end, observer);
        const auto x = feature_row(features, lags, predicted, observer);

        double prediction = 0.0;
        if (config.model == ModelKind::random_forest) {
            ForestConfig fc = config.forest_config;
            fc.seed = window_seed(config.forest_config.seed, predicted);
            const Forest forest = options.model_cache ? detail::cached_fit(fc, dm.X, dm.y, predicted, *options.model_cache)
                                                      : fit_forest(fc, dm.X, dm.y, 1);
            prediction = predict(forest, x);
        } else {
            const auto fit = fit_ols(dm.X, dm.y);
            prediction = fit.intercept;
            for (std::size_t j = 0; j < x.size(); ++j) {
                prediction += fit.coefficients[j] * x[j];
            }
        }
        records[i] = PredictionRecord{predicted, prediction, target.at(predicted), window_end};
    });

    if (options.audit != nullptr) {
        for (const auto& a : audits) {
            options.audit->merge(a);
        }
    }
    return records;
}

/// Records whose prediction is below `threshold`, in quarter order.
[[nodiscard]] inline std::vector<RecessionFlag> recession_flags(std::span<const PredictionRecord> records,
                                                                double threshold = 0.0) {
    std::vector<RecessionFlag> flags;
    for (const auto& r : records) {
        if (r.predicted < threshold) {
            flags.push_back({r.quarter, r.predicted, r.actual});
        }
    }
    std::sort(flags.begin(), flags.end(), [](const auto& a, const auto& b) { return a.quarter < b.quarter; });
    return flags;
}

/// Regresses actual on predicted (with intercept) and collects bias tests and recession flags.
[[nodiscard]] inline EvaluationReport evaluate(std::span<const PredictionRecord> records) {
    if (records.size() < 4) {
        throw SampleSizeError("evaluate needs at least 4 prediction records, got " + std::to_string(records.size()));
    }
    std::vector<double> predicted;
    std::vector<double> actual;
    for (const auto& r : records) {
        predicted.push_back(r.predicted);
        actual.push_back(r.actual);
    }
    if (std::all_of(predicted.begin(), predicted.end(), [&](double v) { return v == predicted.front(); })) {
        throw SingularityError("evaluation regression is singular: every prediction equals " +
                               std::to_string(predicted.front()) +
                               ", so the prediction column is collinear with the constant");
    }
    EvaluationReport report;
    report.fit = fit_ols(std::span<const double>(predicted), std::span<const double>(actual));
    report.bias = bias_test(report.fit);
    report.n = records.size();
    report.slope_p = slope_p_value(report.fit);
    report.recession_flags = recession_flags(records);
    return report;
}

namespace detail {

inline void require_window(Quarter first, Quarter last) {
    if (last < first) {
        throw AlignmentError("empty window " + format_quarter(first) + ".." + format_quarter(last));
    }
}

} // namespace detail

/// Evaluation regression of `actual` on a forecast series indexed by target quarter.
[[nodiscard]] inline EvaluationReport spf_benchmark(const QuarterlySeries& spf_mean, const QuarterlySeries& actual,
                                                    Quarter first, Quarter last) {
    detail::require_window(first, last);
    detail::require_coverage(spf_mean, first, last);
    detail::require_coverage(actual, first, last);
    std::vector<PredictionRecord> records;
    for (Quarter q = first; q <= last; q = quarter_add(q, 1)) {
        records.push_back({q, spf_mean.at(q), actual.at(q), quarter_add(q, -1)});
    }
    return evaluate(records);
}

/// Quarters in [first, last] with a negative mean forecast.
[[nodiscard]] inline std::size_t spf_negative_growth_count(const QuarterlySeries& spf_mean, Quarter first,
                                                           Quarter last) {
    detail::require_window(first, last);
    detail::require_coverage(spf_mean, first, last);
    std::size_t count = 0;
    for (Quarter q = first; q <= last; q = quarter_add(q, 1)) {
        count += spf_mean.at(q) < 0.0 ? 1 : 0;
    }
    return count;
}

} // namespace rfcast
