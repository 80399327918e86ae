#include "stfh/direct.hpp"

#include <string>

namespace stfh {

std::optional<double> direct_mean(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (double y : values) sum += y;
  return sum / static_cast<double>(values.size());
}

std::optional<double> direct_variance(const std::vector<double>& values) {
  const auto n = values.size();
  if (n < 2) return std::nullopt;
  // Two-pass form; the expanded one-pass sum cancels catastrophically for
  // large means.
  const double mean = *direct_mean(values);
  double ss = 0.0;
  for (double y : values) {
    const double d = y - mean;
    ss += d * d;
  }
  return ss / (static_cast<double>(n) * static_cast<double>(n - 1));
}

DirectTable build_direct_table(const UnitObservations& obs, const PanelIndex& idx) {
  idx.validate();
  DirectTable table;
  table.idx = idx;
  table.cells.assign(static_cast<size_t>(idx.N()), DirectCell{});

  for (const auto& [key, values] : obs.values) {
    auto [j, t] = key;
    if (!idx.contains(j, t))
      fail("OutOfRangeCell", "cell (" + std::to_string(j) + "," + std::to_string(t) +
                                 ") outside the declared panel");
    DirectCell& c = table.cell(j, t);
    c.n = static_cast<int>(values.size());
    auto m = direct_mean(values);
    auto v = direct_variance(values);
    c.mu_hat = m ? *m : kNaN;
    c.sigma2_hat = v ? *v : kNaN;
    c.cls = classify_cell(c.n, m.has_value(), v.has_value(), v ? *v : kNaN);
  }
  return table;
}

}  // namespace stfh
