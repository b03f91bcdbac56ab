#include "uidforge/chart.hpp"

#include "uidforge/csv_io.hpp"
#include "uidforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace uidforge {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 30.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;
constexpr int kYTicks = 5;

/// Round the axis maximum up to 1, 2 or 5 times a power of ten.
double nice_ceiling(double value) {
    if (!(value > 0.0)) {
        return 1.0;
    }
    const double magnitude = std::pow(10.0, std::floor(std::log10(value)));
    for (double step : {1.0, 2.0, 5.0, 10.0}) {
        if (step * magnitude >= value) {
            return step * magnitude;
        }
    }
    return 10.0 * magnitude;
}

} // namespace

std::string format_series_chart(const DemandSeries &series) {
    const auto &rows = series.rows;
    if (rows.size() < 2) {
        throw InsufficientDataError(
            fmt::format("chart needs at least 2 rows, series has {}", rows.size()));
    }

    double peak = 0.0;
    for (const auto &row : rows) {
        peak = std::max({peak, row.new_cards_male, row.new_cards_female});
    }
    const double y_max = nice_ceiling(peak);
    const int first_year = rows.front().year;
    const int last_year = rows.back().year;
    if (last_year <= first_year) {
        throw DomainError(fmt::format("chart years must increase ({} .. {})", first_year, last_year));
    }
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;

    const auto x_of = [&](int year) {
        return kLeft + plot_w * (year - first_year) / static_cast<double>(last_year - first_year);
    };
    const auto y_of = [&](double value) { return kTop + plot_h * (1.0 - value / y_max); };

    std::string svg;
    svg += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
        "viewBox=\"0 0 {0:.0f} {1:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
        kWidth, kHeight);
    svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n",
                       kWidth, kHeight);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"25\" text-anchor=\"middle\" font-size=\"15\">"
                       "Predicted annual number of cards newly required</text>\n",
                       kWidth / 2.0);

    // Axes.
    svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" "
                       "stroke=\"black\"/>\n",
                       kLeft, kTop, kTop + plot_h);
    svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" "
                       "stroke=\"black\"/>\n",
                       kLeft, kTop + plot_h, kLeft + plot_w);
    for (int i = 0; i <= kYTicks; ++i) {
        const double value = y_max * i / kYTicks;
        const double y = y_of(value);
        svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" "
                           "stroke=\"black\"/>\n",
                           kLeft - 5.0, y, kLeft, y);
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.0f}</text>\n",
                           kLeft - 8.0, y + 4.0, value);
    }
    const int span = last_year - first_year;
    const int year_step = std::max(1, (span + 9) / 10);
    for (int year = first_year; year <= last_year; year += year_step) {
        const double x = x_of(year);
        svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" "
                           "stroke=\"black\"/>\n",
                           x, kTop + plot_h, kTop + plot_h + 5.0);
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", x,
                           kTop + plot_h + 20.0, year);
    }
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">Year</text>\n",
                       kLeft + plot_w / 2.0, kHeight - 15.0);
    svg += fmt::format("<text x=\"20\" y=\"{0:.2f}\" text-anchor=\"middle\" "
                       "transform=\"rotate(-90 20 {0:.2f})\">Cards newly required</text>\n",
                       kTop + plot_h / 2.0);

    struct Line {
        const char *label;
        const char *colour;
        double DemandRow::*value;
    };
    const Line lines[] = {{"Male", "#1f77b4", &DemandRow::new_cards_male},
                          {"Female", "#d62728", &DemandRow::new_cards_female}};
    double legend_y = kTop + 10.0;
    for (const auto &line : lines) {
        std::string points;
        for (const auto &row : rows) {
            if (!points.empty()) {
                points += ' ';
            }
            points += fmt::format("{:.2f},{:.2f}", x_of(row.year), y_of(row.*line.value));
        }
        svg += fmt::format("<polyline id=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\" "
                           "points=\"{}\"/>\n",
                           line.label, line.colour, points);
        const double legend_x = kLeft + plot_w - 110.0;
        svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" "
                           "stroke=\"{}\" stroke-width=\"2\"/>\n",
                           legend_x, legend_y, legend_x + 25.0, legend_y, line.colour);
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", legend_x + 32.0,
                           legend_y + 4.0, line.label);
        legend_y += 18.0;
    }
    svg += "</svg>\n";
    return svg;
}

void render_series_chart(const DemandSeries &series, const std::filesystem::path &path) {
    write_text_file(path, format_series_chart(series));
}

} // namespace uidforge
