#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tomoprint::charts {

struct Bar {
    std::string label;
    double value = 0;
    std::string group;  // bars sharing a group share a colour
};

/// Standalone SVG bar chart; y axis starts at zero.
std::string bar_chart_svg(const std::string& title, const std::string& y_label, const std::vector<Bar>& bars);
void write_bar_chart(const std::filesystem::path& path, const std::string& title, const std::string& y_label,
                     const std::vector<Bar>& bars);

}  // namespace tomoprint::charts
