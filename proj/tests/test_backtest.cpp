#include "rfcast/backtest.hpp"
#include "rfcast/synthetic.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

using rfcast::Quarter;
using rfcast::QuarterlySeries;

namespace {

// Four features over 1960Q1..2016Q4 and a target that is noise unless `linear`.
rfcast::Dataset us_shaped_dataset(std::uint64_t seed, bool linear) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    const Quarter start{1960, 1};
    const std::size_t n = 57 * 4;
    rfcast::Dataset ds;
    const std::vector<std::string> ids{"tbill_3m", "gov_bond_10y", "equity_pct_change", "debt_gdp_ratio"};
    std::vector<std::vector<double>> cols;
    for (const auto& id : ids) {
        std::vector<double> v(n);
        for (auto& x : v) {
            x = nd(gen);
        }
        cols.push_back(v);
        ds.emplace(id, QuarterlySeries(id, start, v));
    }
    std::vector<double> y(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        if (!linear) {
            y[t] = 2.0 + nd(gen);
            continue;
        }
        y[t] = 1.5;
        for (std::size_t k = 1; k <= 4; ++k) {
            if (t >= k) {
                y[t] += 0.25 * static_cast<double>(k) * cols[k - 1][t - k] - 0.1 * cols[3][t - k];
            }
        }
    }
    ds.emplace("gdp_growth_third_estimate", QuarterlySeries("gdp_growth_third_estimate", start, y));
    return ds;
}

rfcast::BacktestConfig quick_rf_config(int h = 1) {
    rfcast::BacktestConfig c;
    c.horizon_spec = rfcast::HorizonSpec::preset(rfcast::Country::US, h);
    c.forest_config.n_trees = 10;
    c.forest_config.seed = 3;
    return c;
}

std::vector<rfcast::PredictionRecord> make_records(const std::vector<double>& pred, const std::vector<double>& actual) {
    std::vector<rfcast::PredictionRecord> out;
    Quarter q{2000, 1};
    for (std::size_t i = 0; i < pred.size(); ++i) {
        out.push_back({q, pred[i], actual[i], rfcast::quarter_add(q, -1)});
        q = rfcast::quarter_add(q, 1);
    }
    return out;
}

} // namespace

TEST(HorizonSpec, Presets) {
    using rfcast::Country;
    using rfcast::HorizonSpec;
    EXPECT_EQ(HorizonSpec::preset(Country::US, 1).lag_spec.lags(), (std::vector<int>{1, 2, 3, 4}));
    EXPECT_EQ(HorizonSpec::preset(Country::US, 3).lag_spec.lags(), (std::vector<int>{3, 4, 5, 6}));
    EXPECT_EQ(HorizonSpec::preset(Country::US, 6).lag_spec.lags(), (std::vector<int>{6, 7}));
    EXPECT_EQ(HorizonSpec::preset(Country::UK, 3).lag_spec.lags(), (std::vector<int>{3, 4, 5, 6}));
    EXPECT_EQ(HorizonSpec::preset(Country::UK, 6).lag_spec.lags(), (std::vector<int>{6, 7, 8, 9}));
    EXPECT_THROW(HorizonSpec(3, rfcast::LagSpec{2, 3}), rfcast::ConfigError);
    EXPECT_THROW(HorizonSpec(2, rfcast::LagSpec{2, 3}), rfcast::ConfigError);
    EXPECT_THROW((void)HorizonSpec::preset(Country::US, 4), rfcast::ConfigError);
}

TEST(BacktestConfig, Validation) {
    rfcast::BacktestConfig c;
    c.train_start = c.first_predict;
    EXPECT_THROW(c.validate(), rfcast::ConfigError);
    c = rfcast::BacktestConfig{};
    c.last_predict = rfcast::quarter_add(c.first_predict, -1);
    EXPECT_THROW(c.validate(), rfcast::ConfigError);
    EXPECT_EQ(rfcast::parse_model_kind("rf"), rfcast::ModelKind::random_forest);
    EXPECT_EQ(rfcast::parse_model_kind("ols_linear"), rfcast::ModelKind::ols_linear);
    EXPECT_THROW((void)rfcast::parse_model_kind("lasso"), rfcast::ConfigError);
}

TEST(RunBacktest, UsWindowHas105RecordsAndGrowingWindows) {
    const auto ds = us_shaped_dataset(1, false);
    for (int h : {1, 3, 6}) {
        const auto records = rfcast::run_backtest(quick_rf_config(h), ds);
        ASSERT_EQ(records.size(), 105U);
        EXPECT_EQ(records.front().quarter, (Quarter{1990, 2}));
        EXPECT_EQ(records.back().quarter, (Quarter{2016, 2}));
        for (const auto& r : records) {
            EXPECT_EQ(r.train_window_end, rfcast::quarter_add(r.quarter, -1));
            EXPECT_EQ(r.actual, ds.at("gdp_growth_third_estimate").at(r.quarter));
        }
    }
}

TEST(RunBacktest, FirstWindowHasEightyRows) {
    const auto ds = us_shaped_dataset(1, false);
    const auto c = quick_rf_config(1);
    std::vector<QuarterlySeries> features;
    for (const auto& id : c.feature_series_ids) {
        features.push_back(ds.at(id));
    }
    const auto& target = ds.at(c.target_series_id);
    const auto first = rfcast::build_design_matrix(target, features, c.horizon_spec.lag_spec, c.train_start,
                                                   rfcast::quarter_add(c.first_predict, -1));
    EXPECT_EQ(first.X.rows(), 80U);
    EXPECT_EQ(first.target_quarters.front(), (Quarter{1970, 2}));
    EXPECT_EQ(first.target_quarters.back(), (Quarter{1990, 1}));
    const auto next =
        rfcast::build_design_matrix(target, features, c.horizon_spec.lag_spec, c.train_start, c.first_predict);
    EXPECT_EQ(next.X.rows(), first.X.rows() + 1);
}

TEST(RunBacktest, OlsRecoversExactLinearTarget) {
    const auto ds = us_shaped_dataset(2, true);
    auto c = quick_rf_config(1);
    c.model = rfcast::ModelKind::ols_linear;
    const auto records = rfcast::run_backtest(c, ds);
    ASSERT_EQ(records.size(), 105U);
    for (const auto& r : records) {
        EXPECT_NEAR(r.predicted, r.actual, 1e-9) << rfcast::format_quarter(r.quarter);
    }
}

TEST(RunBacktest, NoFeatureReadAfterForecastOrigin) {
    const auto ds = us_shaped_dataset(3, false);
    for (int h : {1, 3, 6}) {
        for (auto model : {rfcast::ModelKind::random_forest, rfcast::ModelKind::ols_linear}) {
            auto c = quick_rf_config(h);
            c.model = model;
            rfcast::LookAheadAudit audit;
            rfcast::BacktestOptions opt;
            opt.audit = &audit;
            opt.workers = 2;
            (void)rfcast::run_backtest(c, ds, opt);
            EXPECT_GT(audit.reads, 0U);
            EXPECT_EQ(audit.violations, 0U) << (audit.examples.empty() ? "" : audit.examples.front());
        }
    }
}

TEST(RunBacktest, BitIdenticalAcrossRunsAndWorkerCounts) {
    const auto ds = us_shaped_dataset(4, false);
    const auto c = quick_rf_config(3);
    const auto base = rfcast::run_backtest(c, ds);
    for (std::size_t workers : {1U, 2U, 8U}) {
        rfcast::BacktestOptions opt;
        opt.workers = workers;
        EXPECT_EQ(rfcast::run_backtest(c, ds, opt), base) << workers;
    }
}

TEST(RunBacktest, WindowSeedsAreStableWhenTheRangeChanges) {
    const auto ds = us_shaped_dataset(5, false);
    auto c = quick_rf_config(1);
    const auto full = rfcast::run_backtest(c, ds);
    c.first_predict = Quarter{2000, 1};
    c.last_predict = Quarter{2001, 4};
    const auto part = rfcast::run_backtest(c, ds);
    for (const auto& r : part) {
        const auto it = std::find_if(full.begin(), full.end(), [&](const auto& f) { return f.quarter == r.quarter; });
        ASSERT_NE(it, full.end());
        EXPECT_EQ(*it, r);
    }
}

TEST(RunBacktest, ModelCacheGivesIdenticalRecords) {
    const auto ds = us_shaped_dataset(6, false);
    auto c = quick_rf_config(1);
    c.first_predict = Quarter{2010, 1};
    const auto dir = std::filesystem::temp_directory_path() / "rfcast_cache_test";
    std::filesystem::remove_all(dir);
    rfcast::BacktestOptions opt;
    opt.model_cache = dir;
    const auto plain = rfcast::run_backtest(c, ds);
    const auto cold = rfcast::run_backtest(c, ds, opt);
    const auto warm = rfcast::run_backtest(c, ds, opt);
    EXPECT_EQ(cold, plain);
    EXPECT_EQ(warm, plain);
    const auto files = std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{});
    EXPECT_EQ(files, static_cast<long>(plain.size()));
    std::filesystem::remove_all(dir);
}

TEST(RunBacktest, CoverageGapIsAnErrorNamingTheSeries) {
    auto ds = us_shaped_dataset(7, false);
    const auto& bond = ds.at("gov_bond_10y");
    ds.insert_or_assign("gov_bond_10y", bond.slice(Quarter{1975, 1}, bond.end()));
    try {
        (void)rfcast::run_backtest(quick_rf_config(1), ds);
        FAIL() << "expected a coverage error";
    } catch (const rfcast::CoverageError& e) {
        EXPECT_NE(std::string(e.what()).find("gov_bond_10y"), std::string::npos) << e.what();
    }
    ds.erase("tbill_3m");
    EXPECT_THROW((void)rfcast::run_backtest(quick_rf_config(1), ds), rfcast::ConfigError);
}

TEST(Evaluate, PerfectForecasts) {
    const std::vector<double> v{1.0, -0.5, 2.5, 3.0, 0.25, 4.0};
    const auto report = rfcast::evaluate(make_records(v, v));
    EXPECT_NEAR(report.fit.slope(), 1.0, 1e-12);
    EXPECT_NEAR(report.fit.intercept, 0.0, 1e-12);
    EXPECT_NEAR(report.fit.adj_r2, 1.0, 1e-12);
    EXPECT_EQ(report.n, 6U);
    ASSERT_EQ(report.recession_flags.size(), 1U);
    EXPECT_EQ(report.recession_flags[0].quarter, (Quarter{2000, 2}));
}

TEST(Evaluate, RejectsConstantAndShortSeries) {
    const std::vector<double> c(8, 2.0);
    const std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8};
    EXPECT_THROW((void)rfcast::evaluate(make_records(c, a)), rfcast::SingularityError);
    EXPECT_THROW((void)rfcast::evaluate(make_records({1, 2, 3}, {1, 2, 3})), rfcast::SampleSizeError);
}

TEST(RecessionFlags, ThresholdSemantics) {
    EXPECT_TRUE(rfcast::recession_flags(make_records({0.5, 1.0, 2.0}, {0, 0, 0})).empty());
    const auto flags = rfcast::recession_flags(make_records({0.5, 1.5}, {0.1, 0.2}), 1.0);
    ASSERT_EQ(flags.size(), 1U);
    EXPECT_EQ(flags[0].predicted, 0.5);
    EXPECT_EQ(flags[0].actual, 0.1);
    const auto neg = rfcast::recession_flags(make_records({-1.0, 0.0, -0.0, -2.0}, {1, 2, 3, 4}));
    ASSERT_EQ(neg.size(), 2U);
    EXPECT_LT(neg[0].quarter, neg[1].quarter);
}

TEST(SpfBenchmark, SelfRegressionAndCoverage) {
    const QuarterlySeries actual("a", Quarter{1970, 1}, {1.0, 2.0, -1.0, 3.5, 0.5, 2.0, 2.5, 1.0});
    const auto report = rfcast::spf_benchmark(actual, actual, Quarter{1970, 2}, Quarter{1971, 4});
    EXPECT_NEAR(report.fit.slope(), 1.0, 1e-12);
    EXPECT_NEAR(report.fit.intercept, 0.0, 1e-12);
    EXPECT_EQ(report.n, 7U);
    EXPECT_THROW((void)rfcast::spf_benchmark(actual, actual, Quarter{1970, 1}, Quarter{1972, 1}), rfcast::CoverageError);
    EXPECT_THROW((void)rfcast::spf_benchmark(actual, actual, Quarter{1971, 1}, Quarter{1970, 1}), rfcast::AlignmentError);
}

TEST(SpfBenchmark, NegativeCount) {
    const QuarterlySeries spf("spf_h3", Quarter{1970, 2}, {2.0, 1.0, -1.0, 0.0, 3.0});
    EXPECT_EQ(rfcast::spf_negative_growth_count(spf, Quarter{1970, 2}, Quarter{1971, 2}), 1U);
    EXPECT_EQ(rfcast::spf_negative_growth_count(spf, Quarter{1971, 1}, Quarter{1971, 2}), 0U);
    EXPECT_THROW((void)rfcast::spf_negative_growth_count(spf, Quarter{1971, 2}, Quarter{1971, 1}), rfcast::Error);
    EXPECT_THROW((void)rfcast::spf_negative_growth_count(spf, Quarter{1970, 1}, Quarter{1971, 1}), rfcast::CoverageError);
}

TEST(ThresholdProblem, ForestBeatsLinearModel) {
    const auto p = rfcast::synthetic::threshold_problem(11);
    auto rf = p.config;
    rf.forest_config.n_trees = 100;
    auto ols = p.config;
    ols.model = rfcast::ModelKind::ols_linear;
    const auto rf_eval = rfcast::evaluate(rfcast::run_backtest(rf, p.dataset));
    const auto ols_eval = rfcast::evaluate(rfcast::run_backtest(ols, p.dataset));
    EXPECT_GT(rf_eval.fit.adj_r2, ols_eval.fit.adj_r2);
}
