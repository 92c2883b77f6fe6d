#pragma once

// Synthetic test beds with known structure. Nothing here is used by the
// real-data pipeline; it exists for demos, CLI smoke runs and checks of the
// models against a data-generating process whose answer is known.

#include "rfcast/backtest.hpp"
#include "rfcast/quarter.hpp"
#include "rfcast/rng.hpp"
#include "rfcast/series.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace rfcast::synthetic {

/// Threshold process:
///   s_t = 0.8 s_{t-1} + e_t,    y_t = 2 - 6 * 1[s_{t-3} > 1] + 0.5 u_t,
/// with e, u standard normal. The regime switch is invisible to a linear model.
struct ThresholdProblem {
    Dataset dataset;  // "y" (target) and "s" (driver)
    BacktestConfig config;
};

[[nodiscard]] inline ThresholdProblem threshold_problem(std::uint64_t seed, std::size_t n_train = 200,
                                                        std::size_t n_predict = 60) {
    constexpr int kBurnIn = 100;
    constexpr int kMaxLag = 6;
    const Quarter first_target{1950, 1};
    const Quarter s_start = quarter_add(first_target, -kMaxLag);
    const std::size_t total = kMaxLag + n_train + n_predict;

    CounterRng rng = CounterRng::derive(seed, 0x7468726573686f6cULL);
    double s = 0.0;
    for (int i = 0; i < kBurnIn; ++i) {
        s = 0.8 * s + rng.normal();
    }
    std::vector<double> sv(total);
    for (auto& v : sv) {
        s = 0.8 * s + rng.normal();
        v = s;
    }
    std::vector<double> yv(n_train + n_predict);
    for (std::size_t i = 0; i < yv.size(); ++i) {
        const double s_lag3 = sv[i + kMaxLag - 3];
        yv[i] = 2.0 - 6.0 * (s_lag3 > 1.0 ? 1.0 : 0.0) + 0.5 * rng.normal();
    }

    ThresholdProblem p;
    p.dataset.emplace("s", QuarterlySeries("s", s_start, std::move(sv)));
    p.dataset.emplace("y", QuarterlySeries("y", first_target, std::move(yv)));
    p.config.train_start = first_target;
    p.config.first_predict = quarter_add(first_target, static_cast<std::int64_t>(n_train));
    p.config.last_predict = quarter_add(first_target, static_cast<std::int64_t>(n_train + n_predict - 1));
    p.config.horizon_spec = HorizonSpec(3, LagSpec{3, 4, 5, 6});
    p.config.target_series_id = "y";
    p.config.feature_series_ids = {"s"};
    p.config.forest_config.seed = seed;
    return p;
}

/// Writes a complete raw snapshot shaped like the US inputs (monthly rates and
/// equity closes, quarterly credit, nominal GDP, target growth and mean survey
/// forecasts) plus a manifest, generated from a threshold process. Covers
/// 1960Q1..2016Q4. Returns the manifest path.
inline std::filesystem::path write_raw_snapshot(const std::filesystem::path& dir, std::uint64_t seed) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "raw");
    const Quarter first{1960, 1};
    const Quarter last{2016, 4};
    const auto nq = static_cast<std::size_t>(quarter_diff(last, first) + 1);

    CounterRng rng = CounterRng::derive(seed, 0x736e617073686f74ULL);
    std::vector<double> driver(nq);
    double s = 0.0;
    for (int i = 0; i < 50; ++i) {
        s = 0.8 * s + rng.normal();
    }
    for (auto& v : driver) {
        s = 0.8 * s + rng.normal();
        v = s;
    }

    auto open = [&](const std::string& name) {
        std::ofstream out(dir / "raw" / name, std::ios::binary);
        out << "period,value\n";
        return out;
    };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        return std::string(buf);
    };

    auto tbill = open("tbill_3m.csv");
    auto bond = open("gov_bond_10y.csv");
    auto equity = open("equity_index.csv");
    double level = 100.0;
    for (std::size_t i = 0; i < nq; ++i) {
        const Quarter q = quarter_add(first, static_cast<std::int64_t>(i));
        for (int m = 1; m <= 3; ++m) {
            char period[16];
            std::snprintf(period, sizeof(period), "%04d-%02d", q.year, (q.q - 1) * 3 + m);
            const double rate = std::max(0.05, 5.0 + 1.2 * driver[i] + 0.2 * rng.normal());
            tbill << period << ',' << fmt(rate) << '\n';
            bond << period << ',' << fmt(rate + 1.5 - 0.4 * driver[i] + 0.2 * rng.normal()) << '\n';
            level *= 1.0 + 0.006 - 0.01 * driver[i] + 0.03 * rng.normal();
            equity << period << ',' << fmt(level) << '\n';
        }
    }

    auto debt = open("private_debt.csv");
    auto ngdp = open("nominal_gdp.csv");
    auto gdp = open("gdp_growth_third.csv");
    auto spf1 = open("spf_mean_h1.csv");
    auto spf3 = open("spf_mean_h3.csv");
    double nominal = 500.0;
    for (std::size_t i = 0; i < nq; ++i) {
        const Quarter q = quarter_add(first, static_cast<std::int64_t>(i));
        nominal *= 1.015;
        const double ratio = 1.2 + 0.004 * static_cast<double>(i) + 0.05 * (i >= 3 ? driver[i - 3] : 0.0);
        debt << format_quarter(q) << ',' << fmt(ratio * nominal) << '\n';
        ngdp << format_quarter(q) << ',' << fmt(nominal) << '\n';
        const double regime = i >= 3 && driver[i - 3] > 1.0 ? 1.0 : 0.0;
        const double growth = 3.0 - 6.0 * regime + 1.5 * rng.normal();
        gdp << format_quarter(q) << ',' << fmt(growth) << '\n';
        spf1 << format_quarter(q) << ',' << fmt(0.5 * growth + 1.5 + 1.2 * rng.normal()) << '\n';
        spf3 << format_quarter(q) << ',' << fmt(std::max(0.5, 2.6 + 0.3 * rng.normal())) << '\n';
    }

    const auto manifest = dir / "synthetic.manifest";
    std::ofstream m(manifest, std::ios::binary);
    m << "# Synthetic snapshot with the same shape as the US inputs. Not real data.\n"
         "country = US\n\n"
         "[gdp_growth_third_estimate]\nfile = raw/gdp_growth_third.csv\nfrequency = quarterly\n\n"
         "[tbill_3m]\nfile = raw/tbill_3m.csv\nfrequency = monthly\naggregation = average\n\n"
         "[gov_bond_10y]\nfile = raw/gov_bond_10y.csv\nfrequency = monthly\naggregation = average\n\n"
         "[equity_pct_change]\nfile = raw/equity_index.csv\nfrequency = monthly\naggregation = last\n"
         "transform = pct_change\n\n"
         "[private_debt]\nfile = raw/private_debt.csv\nfrequency = quarterly\ntransform = ratio_numerator\n"
         "ratio = debt_gdp_ratio\n\n"
         "[nominal_gdp]\nfile = raw/nominal_gdp.csv\nfrequency = quarterly\ntransform = ratio_denominator\n"
         "ratio = debt_gdp_ratio\n\n"
         "[spf_mean_h1]\nfile = raw/spf_mean_h1.csv\nfrequency = quarterly\n\n"
         "[spf_mean_h3]\nfile = raw/spf_mean_h3.csv\nfrequency = quarterly\n";
    return manifest;
}

} // namespace rfcast::synthetic
