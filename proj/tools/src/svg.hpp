#pragma once

#include "nodeid/identify.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nodeid::cli {

struct Series {
    std::string label;
    std::string color;
    bool dashed = false;
    std::vector<std::pair<double, double>> points;
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

/// Side-by-side static line charts. Axis ranges come from the data (y always
/// includes [0, 1]); output depends only on the input.
void write_line_panels(std::ostream& out, const std::string& title, std::span<const Panel> panels);

/// (a) accuracy vs k, (b) accuracy vs k / log2 n, (c) E[1/|bucket|] and
/// singleton probability vs k.
void write_separation_svg(std::ostream& out, std::span<const SeparationRecord> records);

}  // namespace nodeid::cli
