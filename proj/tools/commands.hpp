#pragma once

#include "rfcast/backtest.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace rfcast::cli {

struct BacktestArgs {
    std::string runspec;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> model;
    std::optional<std::string> out;
};

struct EvaluateArgs {
    std::string predictions;
    std::optional<std::string> out;  // key-value copy; default <predictions>.eval.txt
};

struct SpfBenchArgs {
    std::string runspec;
    int horizon = 1;
    std::optional<std::string> window;
    std::optional<std::string> out;
};

struct PlotArgs {
    std::string predictions;
    std::string out;
    std::optional<std::string> title;
};

struct ReportArgs {
    std::string runspec;
    std::string seeds;
    std::optional<std::string> model;
    std::optional<std::string> window;
    std::optional<std::string> out;
};

// Each command writes its data output to `out` (standard output in the
// binary) and throws rfcast::Error on failure. Files are written atomically.
void cmd_backtest(const BacktestArgs& args, std::ostream& out);
void cmd_evaluate(const EvaluateArgs& args, std::ostream& out);
void cmd_spf_bench(const SpfBenchArgs& args, std::ostream& out);
void cmd_plot(const PlotArgs& args, std::ostream& out);
void cmd_report(const ReportArgs& args, std::ostream& out);

/// "1,2,5" or "1..10" (inclusive), or a mix: "1..3,7".
[[nodiscard]] std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// Evaluation regression laid out like a published regression table.
[[nodiscard]] std::string format_evaluation_table(const EvaluationReport& report, const std::string& regressor_label);

/// Machine-readable key=value lines for an evaluation.
[[nodiscard]] std::string format_evaluation_kv(const EvaluationReport& report);

} // namespace rfcast::cli
