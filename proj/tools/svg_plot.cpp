#include "svg_plot.hpp"

#include "rfcast/records_csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace rfcast::cli {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

// Round the y range outwards to a multiple of `step` and pick a step giving ~5-10 ticks.
double tick_step(double span) {
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (raw <= m * mag) {
            return m * mag;
        }
    }
    return 10.0 * mag;
}

} // namespace

std::string render_svg(std::span<const PredictionRecord> records, const PlotOptions& options) {
    const double left = 60.0;
    const double right = 20.0;
    const double top = 50.0;
    const double bottom = 50.0;
    const double w = options.width - left - right;
    const double h = options.height - top - bottom;

    double lo = 0.0;
    double hi = 0.0;
    for (const auto& r : records) {
        lo = std::min({lo, r.actual, r.predicted});
        hi = std::max({hi, r.actual, r.predicted});
    }
    if (hi - lo < 1e-9) {
        hi = lo + 1.0;
    }
    const double step = tick_step(hi - lo);
    lo = std::floor(lo / step) * step;
    hi = std::ceil(hi / step) * step;

    const std::size_t n = records.size();
    auto x_of = [&](std::size_t i) {
        return n == 1 ? left + w / 2.0 : left + w * static_cast<double>(i) / static_cast<double>(n - 1);
    };
    auto y_of = [&](double v) { return top + h * (hi - v) / (hi - lo); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
        << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\" font-family=\"sans-serif\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << num(options.width / 2.0) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << escape_xml(options.title) << "</text>\n";

    // Axes and y ticks.
    svg << "<g stroke=\"#888\" stroke-width=\"1\">\n";
    svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\""
        << num(top + h) << "\"/>\n";
    svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + h) << "\" x2=\"" << num(left + w) << "\" y2=\""
        << num(top + h) << "\"/>\n";
    svg << "</g>\n<g font-size=\"11\" text-anchor=\"end\">\n";
    for (double v = lo; v <= hi + step / 2; v += step) {
        svg << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y_of(v) + 4) << "\">" << num(v) << "</text>\n";
    }
    svg << "</g>\n";
    svg << "<text x=\"16\" y=\"" << num(top + h / 2) << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << num(top + h / 2) << ")\">annualised growth, per cent</text>\n";

    // Year labels on every fourth quarter.
    svg << "<g font-size=\"11\" text-anchor=\"middle\">\n";
    for (std::size_t i = 0; i < n; ++i) {
        if ((i % 4) == 0) {
            svg << "<text x=\"" << num(x_of(i)) << "\" y=\"" << num(top + h + 18) << "\">" << records[i].quarter.year
                << "</text>\n";
        }
    }
    svg << "</g>\n";

    // Zero line.
    svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(y_of(0.0)) << "\" x2=\"" << num(left + w) << "\" y2=\""
        << num(y_of(0.0)) << "\" stroke=\"#aaa\" stroke-width=\"1\"/>\n";

    auto polyline = [&](auto value, const char* colour, const char* dash, const char* id) {
        svg << "<polyline id=\"" << id << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.8\"";
        if (dash != nullptr) {
            svg << " stroke-dasharray=\"" << dash << '"';
        }
        svg << " points=\"";
        for (std::size_t i = 0; i < n; ++i) {
            svg << (i == 0 ? "" : " ") << num(x_of(i)) << ',' << num(y_of(value(records[i])));
        }
        svg << "\"/>\n";
        for (std::size_t i = 0; i < n && n == 1; ++i) {
            svg << "<circle cx=\"" << num(x_of(i)) << "\" cy=\"" << num(y_of(value(records[i]))) << "\" r=\"3\" fill=\""
                << colour << "\"/>\n";
        }
    };
    polyline([](const PredictionRecord& r) { return r.actual; }, "black", nullptr, "actual");
    polyline([](const PredictionRecord& r) { return r.predicted; }, "#d00", "5,4", "predicted");

    // Legend.
    const double lx = left + w - 170;
    const double ly = top + 12;
    svg << "<g font-size=\"12\">\n";
    svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 30) << "\" y2=\"" << num(ly)
        << "\" stroke=\"black\" stroke-width=\"1.8\"/>\n";
    svg << "<text x=\"" << num(lx + 36) << "\" y=\"" << num(ly + 4) << "\">actual</text>\n";
    svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly + 18) << "\" x2=\"" << num(lx + 30) << "\" y2=\""
        << num(ly + 18) << "\" stroke=\"#d00\" stroke-width=\"1.8\" stroke-dasharray=\"5,4\"/>\n";
    svg << "<text x=\"" << num(lx + 36) << "\" y=\"" << num(ly + 22) << "\">predicted</text>\n";
    svg << "</g>\n</svg>\n";
    return svg.str();
}

std::string tidy_points_csv(std::span<const PredictionRecord> records) {
    std::ostringstream out;
    out << "quarter,series,value\n";
    for (const auto& r : records) {
        out << format_quarter(r.quarter) << ",actual," << format_fixed(r.actual) << '\n';
        out << format_quarter(r.quarter) << ",predicted," << format_fixed(r.predicted) << '\n';
    }
    return out.str();
}

} // namespace rfcast::cli
