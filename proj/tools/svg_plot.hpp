#pragma once

#include "rfcast/backtest.hpp"

#include <span>
#include <string>

namespace rfcast::cli {

struct PlotOptions {
    std::string title = "Actual and predicted annualised quarter-on-quarter GDP growth";
    int width = 900;
    int height = 480;
};

/// Static SVG: quarters on x, percent growth on y; solid black actual, dashed
/// red predicted, zero line, legend, year labels every fourth quarter.
[[nodiscard]] std::string render_svg(std::span<const PredictionRecord> records, const PlotOptions& options = {});

/// Tidy long-format points: `quarter,series,value` with series actual|predicted.
[[nodiscard]] std::string tidy_points_csv(std::span<const PredictionRecord> records);

} // namespace rfcast::cli
