#pragma once

// Run specification: one key-value file binding a dataset manifest, a
// backtest configuration and output paths. Relative paths resolve against
// the run spec's directory. Unknown keys are errors.
//
//   manifest      = us.manifest                 (required)
//   model         = rf | ols                    (default rf)
//   horizon       = 1 | 3 | 6                   (required)
//   lags          = 3,4,5,6                     (default: country preset)
//   train_start   = 1970Q2                      (required)
//   first_predict = 1990Q2                      (required)
//   last_predict  = 2016Q2                      (required)
//   target        = gdp_growth_third_estimate   (required)
//   features      = tbill_3m,gov_bond_10y,...   (required)
//   seed          = 1                           (default 1)
//   n_trees / mtry / min_node_size / bootstrap  (forest settings, defaults as ForestConfig)
//   predictions   = out/us_h6.csv               (default predictions.csv)
//   excerpt       = 2008Q1:2009Q4               (optional, used by `report`)
//   spf_h1 / spf_h3 = series ids of mean SPF forecasts (optional)
//   model_cache   = cache/                      (optional forest cache directory)

#include "rfcast/backtest.hpp"
#include "rfcast/data.hpp"
#include "rfcast/error.hpp"
#include "rfcast/keyvalue.hpp"
#include "rfcast/text.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace rfcast {

struct RunSpec {
    std::filesystem::path source;
    std::filesystem::path manifest_path;
    DatasetManifest manifest;
    BacktestConfig backtest;
    std::filesystem::path predictions_path;
    std::optional<QuarterRange> excerpt;
    std::optional<std::string> spf_h1;
    std::optional<std::string> spf_h3;
    std::optional<std::filesystem::path> model_cache;
};

namespace detail {

inline std::uint64_t parse_u64(const std::string& s, const std::string& what) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError(what + ": expected a non-negative integer, got '" + s + "'");
    }
    return v;
}

inline std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
    std::vector<int> out;
    for (const auto& tok : split(s, ',')) {
        out.push_back(static_cast<int>(parse_u64(std::string(trim(tok)), what)));
    }
    return out;
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() ? base / path : path;
}

inline std::vector<std::string> parse_id_list(const std::string& s) {
    std::vector<std::string> out;
    for (const auto& tok : split(s, ',')) {
        const auto t = trim(tok);
        if (t.empty()) {
            throw ConfigError("empty series id in list '" + s + "'");
        }
        out.emplace_back(t);
    }
    return out;
}

} // namespace detail

[[nodiscard]] inline RunSpec parse_runspec(const KeyValueFile& kv, const std::filesystem::path& source) {
    const auto ctx = source.string();
    if (kv.blocks.size() > 1) {
        throw ConfigError(ctx + ": run specs have no [blocks] (found '" + kv.blocks[1].name + "')");
    }
    const auto& t = kv.top();
    t.require_known({"manifest", "model", "horizon", "lags", "train_start", "first_predict", "last_predict", "target",
                     "features", "seed", "n_trees", "mtry", "min_node_size", "bootstrap", "predictions", "excerpt",
                     "spf_h1", "spf_h3", "model_cache"},
                    ctx);
    const auto base = source.parent_path();
    RunSpec rs;
    rs.source = source;
    rs.manifest_path = detail::resolve(base, t.get("manifest", ctx));
    if (!std::filesystem::exists(rs.manifest_path)) {
        throw ConfigError(ctx + ": manifest '" + rs.manifest_path.string() + "' not found");
    }
    rs.manifest = load_manifest(rs.manifest_path);

    auto& bt = rs.backtest;
    try {
        bt.model = parse_model_kind(t.get_or("model", "rf"));
        const int horizon = static_cast<int>(detail::parse_u64(t.get("horizon", ctx), "horizon"));
        bt.horizon_spec = t.has("lags") ? HorizonSpec(horizon, LagSpec(detail::parse_int_list(t.get("lags", ctx), "lags")))
                                        : HorizonSpec::preset(rs.manifest.country, horizon);
        bt.train_start = parse_quarter(t.get("train_start", ctx));
        bt.first_predict = parse_quarter(t.get("first_predict", ctx));
        bt.last_predict = parse_quarter(t.get("last_predict", ctx));
        bt.target_series_id = t.get("target", ctx);
        bt.feature_series_ids = detail::parse_id_list(t.get("features", ctx));
        bt.forest_config.seed = detail::parse_u64(t.get_or("seed", "1"), "seed");
        if (t.has("n_trees")) {
            bt.forest_config.n_trees = detail::parse_u64(t.get("n_trees", ctx), "n_trees");
        }
        if (t.has("mtry")) {
            bt.forest_config.mtry = detail::parse_u64(t.get("mtry", ctx), "mtry");
        }
        if (t.has("min_node_size")) {
            bt.forest_config.min_node_size = detail::parse_u64(t.get("min_node_size", ctx), "min_node_size");
        }
        if (t.has("bootstrap")) {
            const auto& b = t.get("bootstrap", ctx);
            if (b != "true" && b != "false") {
                throw ConfigError("bootstrap must be true or false");
            }
            bt.forest_config.bootstrap = b == "true";
        }
        bt.validate();
        if (t.has("excerpt")) {
            rs.excerpt = parse_quarter_range(t.get("excerpt", ctx));
        }
    } catch (const Error& e) {
        throw ConfigError(ctx + ": " + e.what());
    }
    rs.predictions_path = detail::resolve(base, t.get_or("predictions", "predictions.csv"));
    if (t.has("spf_h1")) {
        rs.spf_h1 = t.get("spf_h1", ctx);
    }
    if (t.has("spf_h3")) {
        rs.spf_h3 = t.get("spf_h3", ctx);
    }
    if (t.has("model_cache")) {
        rs.model_cache = detail::resolve(base, t.get("model_cache", ctx));
    }
    return rs;
}

[[nodiscard]] inline RunSpec load_runspec(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw ConfigError("run spec '" + path.string() + "' not found");
    }
    return parse_runspec(load_key_value(path.string()), path);
}

} // namespace rfcast
