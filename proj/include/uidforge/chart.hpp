#pragma once

#include "uidforge/card_ledger.hpp"

#include <filesystem>
#include <string>

namespace uidforge {

/// Standalone SVG line chart of the male and female new-card series over
/// years: one polyline per sex, labelled axes and a legend. Output bytes
/// depend only on the series. Throws InsufficientDataError below 2 rows.
std::string format_series_chart(const DemandSeries &series);
void render_series_chart(const DemandSeries &series, const std::filesystem::path &path);

} // namespace uidforge
