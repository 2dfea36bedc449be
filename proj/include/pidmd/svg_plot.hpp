#pragma once

// Minimal deterministic SVG charts: identical input gives identical bytes.
// Both charts use a log10 y axis spanning whole decades around the data.

#include "pidmd/metrics.hpp"

#include <string>
#include <vector>

namespace pidmd {

/// One box per method from its five-number summary; methods without a
/// finite summary are drawn as a labelled gap.
std::string box_plot_svg(const std::vector<MethodSummary>& rows, const std::string& title);

struct LineSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;  // non-finite or non-positive points are skipped
};

std::string line_plot_svg(const std::vector<LineSeries>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label);

}  // namespace pidmd
