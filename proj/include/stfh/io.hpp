#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stfh/graph.hpp"
#include "stfh/posterior.hpp"
#include "stfh/sampler.hpp"
#include "stfh/types.hpp"

namespace stfh {

/// Panel CSV: header `area_id,time,n,mu_hat,sigma2_hat` plus one column per
/// covariate. Area order follows first appearance in the file; times sort
/// numerically. Empty mu_hat/sigma2_hat fields mean absent; rows with n >= 2
/// but no usable variance are coerced to missing and counted.
struct LoadedPanel {
  PanelData data;
  std::vector<std::string> area_labels;   // index -> label
  std::vector<long long> time_labels;     // index -> label
  nlohmann::json standardization;         // covariate -> {mean, sd} when applied
  int coerced_cells = 0;
};

LoadedPanel load_panel_csv(const std::string& path, bool standardize);

/// Edge list, one `i j` pair of 1-based area indices per line; blank lines
/// and `#` comments are skipped. With link_islands, isolated nodes gain an
/// edge to the nearest index instead of failing; added pairs are reported.
AreaGraph load_adjacency(const std::string& path, int J, bool link_islands = false,
                         std::vector<std::pair<int, int>>* island_links = nullptr);

PriorConfig load_priors(const std::string& path);

struct AggregateDef {
  std::string name;
  std::vector<int> areas;  // 0-based
};

/// Lines of `name member member ...` using panel area labels.
std::vector<AggregateDef> load_aggregates(const std::string& path,
                                          const std::vector<std::string>& area_labels);

/// Lines of `label hectares`; every area must be present.
Eigen::VectorXd load_areas(const std::string& path,
                           const std::vector<std::string>& area_labels);

std::uint64_t config_hash(const nlohmann::json& config);

struct EmitOptions {
  int t1 = 0;
  int t2 = -1;  // negative: T-1
  double level = 0.95;
  bool dump_draws = false;
};

struct RunMeta {
  std::vector<std::string> area_labels;
  std::vector<std::string> time_labels;
  nlohmann::json config;  // semantic run configuration; hashed into meta.json
  nlohmann::json extra;   // merged into meta.json verbatim
};

/// Writes summary.csv, waic.csv, trend.csv, change.csv, aggregates.csv and
/// meta.json (plus draws.bin with dump_draws) into outdir. Output is
/// deterministic for identical draws and options.
void emit_results(const PosteriorDraws& draws, const DirectTable& table,
                  const Eigen::VectorXd& area_ha, const std::vector<AggregateDef>& groups,
                  const RunMeta& meta, const EmitOptions& opt, const std::string& outdir);

void write_draw_dump(const std::string& path, const PosteriorDraws& draws);
PosteriorDraws read_draw_dump(const std::string& path);

}  // namespace stfh
