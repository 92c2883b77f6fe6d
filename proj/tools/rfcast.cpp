// rfcast: walk-forward GDP growth forecasting from the command line.

#include "commands.hpp"

#include "rfcast/error.hpp"
#include "rfcast/parallel.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Walk-forward random-forest and OLS forecasts of quarterly GDP growth"};
    app.require_subcommand(1);
    app.footer(std::string("Environment: ") + rfcast::kThreadsEnv +
               " sets the worker count (default: available parallelism). It never changes results.");

    rfcast::cli::BacktestArgs bt;
    auto* backtest = app.add_subcommand("backtest", "Run the expanding-window backtest and write predictions CSV");
    backtest->add_option("--runspec", bt.runspec, "Run specification file")->required()->check(CLI::ExistingFile);
    backtest->add_option("--seed", bt.seed, "Master seed for the random forest (overrides the run spec)");
    backtest->add_option("--model", bt.model, "Model: rf or ols (overrides the run spec)")
        ->check(CLI::IsMember({"rf", "ols", "random_forest", "ols_linear"}));
    backtest->add_option("--out", bt.out, "Predictions CSV path (overrides the run spec)");

    rfcast::cli::EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Regress actuals on predictions and print the evaluation table");
    evaluate->add_option("predictions", ev.predictions, "Predictions CSV written by backtest")->required();
    evaluate->add_option("--out", ev.out, "Key-value copy of the results (default <predictions>.eval.txt)");

    rfcast::cli::SpfBenchArgs spf;
    auto* spf_bench = app.add_subcommand("spf-bench", "Evaluate mean SPF forecasts against actual growth");
    spf_bench->add_option("--runspec", spf.runspec, "Run specification file")->required()->check(CLI::ExistingFile);
    spf_bench->add_option("--horizon", spf.horizon, "Forecast horizon in quarters: 1 or 3")
        ->required()
        ->check(CLI::IsMember({1, 3}));
    spf_bench->add_option("--window", spf.window, "Sample window YYYYQn:YYYYQn (default: run spec range)");
    spf_bench->add_option("--out", spf.out, "Also write the report to this file");

    rfcast::cli::PlotArgs plot;
    auto* plot_cmd = app.add_subcommand("plot", "Draw actual and predicted growth as SVG plus a tidy points CSV");
    plot_cmd->add_option("predictions", plot.predictions, "Predictions CSV written by backtest")->required();
    plot_cmd->add_option("--out", plot.out, "SVG output path; points go to <stem>.points.csv")->required();
    plot_cmd->add_option("--title", plot.title, "Figure title");

    rfcast::cli::ReportArgs rep;
    auto* report = app.add_subcommand("report", "Backtest over several seeds and print a markdown report");
    report->add_option("--runspec", rep.runspec, "Run specification file")->required()->check(CLI::ExistingFile);
    report->add_option("--seeds", rep.seeds, "Seeds, e.g. 1..10 or 1,2,3")->required();
    report->add_option("--model", rep.model, "Model: rf or ols (overrides the run spec)")
        ->check(CLI::IsMember({"rf", "ols", "random_forest", "ols_linear"}));
    report->add_option("--window", rep.window, "Excerpt window YYYYQn:YYYYQn (overrides the run spec)");
    report->add_option("--out", rep.out, "Also write the markdown report to this file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*backtest) {
            rfcast::cli::cmd_backtest(bt, std::cout);
        } else if (*evaluate) {
            rfcast::cli::cmd_evaluate(ev, std::cout);
        } else if (*spf_bench) {
            rfcast::cli::cmd_spf_bench(spf, std::cout);
        } else if (*plot_cmd) {
            rfcast::cli::cmd_plot(plot, std::cout);
        } else if (*report) {
            rfcast::cli::cmd_report(rep, std::cout);
        }
    } catch (const rfcast::Error& e) {
        std::cerr << "rfcast: error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "rfcast: unexpected error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
