#pragma once

#include <map>
#include <optional>
#include <vector>

#include "stfh/types.hpp"

namespace stfh {

/// Unit-level measurements keyed by (area, time), both 0-based.
struct UnitObservations {
  std::map<std::pair<int, int>, std::vector<double>> values;
};

/// Sample mean; absent for an empty list.
std::optional<double> direct_mean(const std::vector<double>& values);

/// Variance of the sample mean, 1/(n(n-1)) sum (y - ybar)^2; absent for
/// n < 2. Exactly zero when all values coincide.
std::optional<double> direct_variance(const std::vector<double>& values);

/// Direct estimates plus missingness class for every cell of the panel.
/// Cells without observations become NoPlots.
DirectTable build_direct_table(const UnitObservations& obs, const PanelIndex& idx);

}  // namespace stfh
