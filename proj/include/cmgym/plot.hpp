#pragma once

#include <string>
#include <vector>

#include "cmgym/harness.hpp"

namespace cmgym {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal static SVG line chart with markers and a legend.
std::string line_chart_svg(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                           const std::string& y_label);

/// Mean max P_dest against E_max, one line per P_nav value.
std::vector<Series> max_p_dest_series(const std::vector<SweepRow>& rows);

}  // namespace cmgym
