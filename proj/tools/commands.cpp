#include "commands.hpp"

#include "svg_plot.hpp"

#include "rfcast/data.hpp"
#include "rfcast/parallel.hpp"
#include "rfcast/records_csv.hpp"
#include "rfcast/runspec.hpp"
#include "rfcast/text.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

namespace fs = std::filesystem;

namespace rfcast::cli {

namespace {

std::string fixed(double v, int decimals = 3) { return format_fixed(v, decimals); }

// Write to a sibling temp file, then rename; a failure never leaves a partial file.
void write_file_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path() && !fs::is_directory(path.parent_path())) {
        throw Error("cannot write '" + path.string() + "': directory does not exist");
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw Error("cannot write '" + path.string() + "'");
        }
        f << content;
        f.close();
        if (!f) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error("failed writing '" + path.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error("cannot write '" + path.string() + "'");
    }
}

std::vector<PredictionRecord> read_predictions(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    try {
        return read_records_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

struct LoadedRun {
    RunSpec spec;
    Dataset dataset;
};

LoadedRun load_run(const std::string& runspec_path) {
    LoadedRun run{load_runspec(runspec_path), {}};
    run.dataset = assemble_dataset(run.spec.manifest, &std::cerr);
    return run;
}

std::string lag_list(const LagSpec& lags) {
    std::string s;
    for (int k : lags.lags()) {
        s += (s.empty() ? "" : ",") + std::to_string(k);
    }
    return s;
}

BacktestOptions options_for(const RunSpec& spec) {
    BacktestOptions opts;
    opts.workers = default_worker_count();
    opts.model_cache = spec.model_cache;
    return opts;
}

} // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    for (const auto& raw : split(text, ',')) {
        const std::string tok(trim(raw));
        if (tok.empty()) {
            continue;
        }
        if (const auto dots = tok.find(".."); dots != std::string::npos) {
            const auto a = detail::parse_u64(tok.substr(0, dots), "--seeds");
            const auto b = detail::parse_u64(tok.substr(dots + 2), "--seeds");
            if (b < a) {
                throw ConfigError("--seeds: reversed range '" + tok + "'");
            }
            for (auto s = a; s <= b; ++s) {
                seeds.push_back(s);
            }
        } else {
            seeds.push_back(detail::parse_u64(tok, "--seeds"));
        }
    }
    if (seeds.empty()) {
        throw ConfigError("--seeds: at least one seed is required");
    }
    return seeds;
}

std::string format_evaluation_table(const EvaluationReport& r, const std::string& regressor_label) {
    std::ostringstream out;
    auto row = [&out](const std::string& label, const std::string& value) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%-28s %s\n", label.c_str(), value.c_str());
        out << buf;
    };
    out << "Dependent variable: actual GDP growth, annualised quarter on quarter, per cent\n";
    row(regressor_label, fixed(r.fit.slope()) + " (" + fixed(r.fit.slope_se()) + ")");
    row("Constant", fixed(r.fit.intercept) + " (" + fixed(r.fit.intercept_se()) + ")");
    row("Observations", std::to_string(r.n));
    row("Adjusted R2", fixed(r.fit.adj_r2));
    row("Residual Std. Error", fixed(r.fit.residual_se));
    row("p-value, slope = 0", fixed(r.slope_p));
    row("p-value, slope = 1", fixed(r.bias.p_slope) + " (t = " + fixed(r.bias.t_slope, 2) + ")");
    row("p-value, constant = 0", fixed(r.bias.p_intercept) + " (t = " + fixed(r.bias.t_intercept, 2) + ")");
    if (r.recession_flags.empty()) {
        out << "Recession flags (prediction < 0): none\n";
    } else {
        out << "Recession flags (prediction < 0):\n";
        for (const auto& f : r.recession_flags) {
            out << "  " << format_quarter(f.quarter) << "  predicted " << fixed(f.predicted, 2) << "  actual "
                << fixed(f.actual, 2) << '\n';
        }
    }
    return out.str();
}

std::string format_evaluation_kv(const EvaluationReport& r) {
    std::ostringstream out;
    auto kv = [&out](const char* k, double v) { out << k << '=' << format_fixed(v) << '\n'; };
    out << "n=" << r.n << '\n';
    kv("slope", r.fit.slope());
    kv("slope_se", r.fit.slope_se());
    kv("intercept", r.fit.intercept);
    kv("intercept_se", r.fit.intercept_se());
    kv("r2", r.fit.r2);
    kv("adj_r2", r.fit.adj_r2);
    kv("residual_se", r.fit.residual_se);
    kv("slope_p", r.slope_p);
    kv("t_slope_eq_1", r.bias.t_slope);
    kv("p_slope_eq_1", r.bias.p_slope);
    kv("t_intercept_eq_0", r.bias.t_intercept);
    kv("p_intercept_eq_0", r.bias.p_intercept);
    std::string flags;
    for (const auto& f : r.recession_flags) {
        flags += (flags.empty() ? "" : ",") + format_quarter(f.quarter);
    }
    out << "recession_flags=" << flags << '\n';
    return out.str();
}

void cmd_backtest(const BacktestArgs& args, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    auto run = load_run(args.runspec);
    auto config = run.spec.backtest;
    if (args.seed) {
        config.forest_config.seed = *args.seed;
    }
    if (args.model) {
        config.model = parse_model_kind(*args.model);
    }
    const fs::path dest = args.out ? fs::path(*args.out) : run.spec.predictions_path;
    const auto records = run_backtest(config, run.dataset, options_for(run.spec));
    std::ostringstream csv;
    write_records_csv(csv, records);
    write_file_atomic(dest, csv.str());
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    out << "n=" << records.size() << " horizon=" << config.horizon_spec.horizon << " model=" << to_string(config.model)
        << " elapsed=" << fixed(elapsed.count(), 2) << "s output=" << dest.string() << '\n';
}

void cmd_evaluate(const EvaluateArgs& args, std::ostream& out) {
    const auto records = read_predictions(args.predictions);
    const auto report = evaluate(records);
    const std::string kv_path = args.out.value_or(args.predictions + ".eval.txt");
    write_file_atomic(kv_path, format_evaluation_kv(report));
    out << format_evaluation_table(report, "Prediction");
}

void cmd_spf_bench(const SpfBenchArgs& args, std::ostream& out) {
    if (args.horizon != 1 && args.horizon != 3) {
        throw ConfigError("--horizon must be 1 or 3 for spf-bench");
    }
    auto run = load_run(args.runspec);
    const auto& id = args.horizon == 1 ? run.spec.spf_h1 : run.spec.spf_h3;
    if (!id) {
        throw ConfigError(args.runspec + ": no spf_h" + std::to_string(args.horizon) + " series configured");
    }
    const auto& spf = dataset_series(run.dataset, *id);
    const auto& actual = dataset_series(run.dataset, run.spec.backtest.target_series_id);
    const QuarterRange window = args.window ? parse_quarter_range(*args.window)
                                            : QuarterRange{run.spec.backtest.train_start, run.spec.backtest.last_predict};
    const auto report = spf_benchmark(spf, actual, window.first, window.last);

    std::ostringstream text;
    text << "SPF mean forecast, " << args.horizon << " quarter" << (args.horizon == 1 ? "" : "s") << " ahead, "
         << format_quarter(window.first) << "-" << format_quarter(window.last) << "\n";
    text << format_evaluation_table(report, "SPF");
    if (args.horizon == 3) {
        text << "Quarters with negative mean forecast: "
             << spf_negative_growth_count(spf, window.first, window.last) << '\n';
    }
    if (args.out) {
        write_file_atomic(*args.out, text.str());
    }
    out << text.str();
}

void cmd_plot(const PlotArgs& args, std::ostream& out) {
    const auto records = read_predictions(args.predictions);
    if (records.empty()) {
        throw DataError(args.predictions + ": no prediction rows to plot");
    }
    PlotOptions opts;
    opts.title = args.title.value_or("Actual and predicted GDP growth, " + format_quarter(records.front().quarter) +
                                     "-" + format_quarter(records.back().quarter));
    fs::path svg_path(args.out);
    fs::path points_path = svg_path;
    points_path.replace_extension(".points.csv");
    const auto svg = render_svg(records, opts);
    const auto points = tidy_points_csv(records);
    write_file_atomic(svg_path, svg);
    write_file_atomic(points_path, points);
    out << "wrote " << svg_path.string() << " and " << points_path.string() << '\n';
}

void cmd_report(const ReportArgs& args, std::ostream& out) {
    const auto seeds = parse_seed_list(args.seeds);
    auto run = load_run(args.runspec);
    auto config = run.spec.backtest;
    if (args.model) {
        config.model = parse_model_kind(*args.model);
    }
    std::optional<QuarterRange> excerpt = run.spec.excerpt;
    if (args.window) {
        excerpt = parse_quarter_range(*args.window);
    }

    std::vector<std::vector<PredictionRecord>> runs;
    std::vector<EvaluationReport> evals;
    for (auto seed : seeds) {
        config.forest_config.seed = seed;
        runs.push_back(run_backtest(config, run.dataset, options_for(run.spec)));
        evals.push_back(evaluate(runs.back()));
    }

    std::ostringstream md;
    md << "# Walk-forward report\n\n";
    md << "- run spec: `" << fs::path(args.runspec).filename().string() << "`\n";
    md << "- model: " << to_string(config.model) << ", horizon " << config.horizon_spec.horizon << ", lags "
       << lag_list(config.horizon_spec.lag_spec) << "\n";
    md << "- predictions: " << format_quarter(config.first_predict) << "-" << format_quarter(config.last_predict)
       << " (" << runs.front().size() << " quarters), training from " << format_quarter(config.train_start) << "\n\n";

    md << "## Evaluation per seed\n\n";
    md << "| seed | slope (se) | constant (se) | adj. R2 | resid. s.e. | p(slope=0) | negative predictions |\n";
    md << "|---:|---:|---:|---:|---:|---:|---|\n";
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const auto& e = evals[i];
        std::string flags;
        for (const auto& f : e.recession_flags) {
            flags += (flags.empty() ? "" : " ") + format_quarter(f.quarter);
        }
        md << "| " << seeds[i] << " | " << fixed(e.fit.slope()) << " (" << fixed(e.fit.slope_se()) << ") | "
           << fixed(e.fit.intercept) << " (" << fixed(e.fit.intercept_se()) << ") | " << fixed(e.fit.adj_r2) << " | "
           << fixed(e.fit.residual_se) << " | " << fixed(e.slope_p) << " | " << (flags.empty() ? "none" : flags)
           << " |\n";
    }
    std::vector<double> adj;
    for (const auto& e : evals) {
        adj.push_back(e.fit.adj_r2);
    }
    const double mean = std::accumulate(adj.begin(), adj.end(), 0.0) / static_cast<double>(adj.size());
    md << "\nAdjusted R2 across " << seeds.size() << " seed" << (seeds.size() == 1 ? "" : "s") << ": mean "
       << fixed(mean) << ", min " << fixed(*std::min_element(adj.begin(), adj.end())) << ", max "
       << fixed(*std::max_element(adj.begin(), adj.end())) << "\n";

    if (excerpt) {
        md << "\n## " << format_quarter(excerpt->first) << "-" << format_quarter(excerpt->last) << "\n\n";
        const bool many = seeds.size() > 1;
        md << "| Period | Actual | Prediction made " << config.horizon_spec.horizon << " quarter"
           << (config.horizon_spec.horizon == 1 ? "" : "s") << " previously" << (many ? " (seed mean)" : "")
           << (many ? " | seed min | seed max |\n|---|---:|---:|---:|---:|\n" : " |\n|---|---:|---:|\n");
        for (Quarter q = excerpt->first; q <= excerpt->last; q = quarter_add(q, 1)) {
            if (!(config.first_predict <= q && q <= config.last_predict)) {
                throw ConfigError("excerpt quarter " + format_quarter(q) + " is outside the prediction window");
            }
            const auto idx = static_cast<std::size_t>(quarter_diff(q, config.first_predict));
            double sum = 0.0;
            double lo = runs.front()[idx].predicted;
            double hi = lo;
            for (const auto& r : runs) {
                sum += r[idx].predicted;
                lo = std::min(lo, r[idx].predicted);
                hi = std::max(hi, r[idx].predicted);
            }
            md << "| " << format_quarter(q) << " | " << fixed(runs.front()[idx].actual, 2) << " | "
               << fixed(sum / static_cast<double>(runs.size()), 2);
            if (many) {
                md << " | " << fixed(lo, 2) << " | " << fixed(hi, 2);
            }
            md << " |\n";
        }
    }
    if (args.out) {
        write_file_atomic(*args.out, md.str());
    }
    out << md.str();
}

} // namespace rfcast::cli
