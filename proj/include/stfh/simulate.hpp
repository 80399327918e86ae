#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stfh/graph.hpp"
#include "stfh/sampler.hpp"
#include "stfh/types.hpp"

namespace stfh {

/// Synthetic population on a square unit grid partitioned into square areal
/// blocks. The outcome is an intercept plus a Gaussian-process random walk
/// plus a covariate effect plus white noise, truncated at zero and forced to
/// zero wherever the covariate surface is zero.
struct PopulationConfig {
  int grid = 70;            // units per side
  int areas_per_side = 7;   // square partition; J = areas_per_side^2
  int T = 8;
  double zeta0 = 1.5;
  double zeta1 = 2.0;
  double sigma2_y = 1000.0;
  double sigma2_w = 10.0;
  double gamma = 0.003;     // decay per km; distances scale with spacing_km
  double spacing_km = 1.0;
  double nugget = 1e-8;     // relative jitter on the GP covariance diagonal
  int max_units = 5000;
  std::uint64_t seed = 1;

  int units() const { return grid * grid; }
  int J() const { return areas_per_side * areas_per_side; }

  void validate() const {
    if (grid < 1 || areas_per_side < 1 || T < 1) fail("BadPopulation", "bad dimensions");
    if (grid % areas_per_side != 0)
      fail("BadPopulation", "grid must be divisible by areas_per_side");
    if (units() > max_units)
      fail("TooManyUnits", std::to_string(units()) + " units exceeds the dense-GP limit of " +
                               std::to_string(max_units));
    if (gamma <= 0.0) fail("BadPopulation", "gamma must be positive");
    if (sigma2_y < 0.0 || sigma2_w < 0.0) fail("BadPopulation", "negative variance");
    if (spacing_km <= 0.0) fail("BadPopulation", "spacing must be positive");
  }
};

struct Population {
  PopulationConfig cfg;
  PanelIndex idx;                        // J areas, T times
  Eigen::MatrixXd y;                     // units x T outcomes
  Eigen::MatrixXd v;                     // units x T covariate surface
  std::vector<int> area_of;              // unit -> area
  std::vector<std::vector<int>> units_in_area;
  Eigen::MatrixXd mu_true;               // J x T within-area means
  Eigen::VectorXd theta_true;            // J least-squares slopes of mu_true
  Eigen::VectorXd delta_true;            // J change between first and last time
  Eigen::MatrixXd x_area;                // N x 1 area-mean covariate, flat order
};

Population generate_population(const PopulationConfig& cfg);

/// Rook adjacency of the square area partition.
AreaGraph population_graph(const PopulationConfig& cfg);

/// Without-replacement samples for every cell, n(j,t) units each; one table
/// per replicate. Deterministic given the seed.
std::vector<DirectTable> draw_replicates(const Population& pop, const Eigen::MatrixXi& n,
                                         int R, std::uint64_t seed);

/// Panel ready for model fitting: direct table plus the area-mean covariate.
PanelData make_panel_data(const Population& pop, const DirectTable& table);

/// Point estimates and interval bounds for one estimator across replicates;
/// NaN marks unavailable entries.
struct EstimatorOutput {
  std::string name;
  Eigen::MatrixXd mu_point, mu_lo, mu_hi;        // R x N
  Eigen::MatrixXd theta_point, theta_lo, theta_hi;  // R x J
  Eigen::MatrixXd delta_point, delta_lo, delta_hi;  // R x J
};

/// Direct estimator on one replicate table: means with t-based confidence
/// intervals where n >= 2 and the variance estimate is positive; the trend
/// and change rows use the per-cell means that exist.
void append_direct_estimates(const DirectTable& table, int t1, int t2, double level, int row,
                             EstimatorOutput& out);

/// Posterior means and equal-tailed credible intervals from a model fit.
void append_model_estimates(const PosteriorDraws& draws, const PanelIndex& idx, int t1, int t2,
                            double level, int row, EstimatorOutput& out);

struct CellScore {
  double bias = kNaN;
  double rmse = kNaN;
  double cover = kNaN;
  double width = kNaN;
  int r_est = 0;   // replicates with a point estimate
  int r_int = 0;   // replicates with an interval
};

/// Scores one target family against its truths; column k of the estimate
/// matrices holds replicate values for target k.
std::vector<CellScore> score_estimators(const Eigen::VectorXd& truth,
                                        const Eigen::MatrixXd& point,
                                        const Eigen::MatrixXd& lo, const Eigen::MatrixXd& hi);

struct SimStudyConfig {
  PopulationConfig pop;
  Eigen::MatrixXi n;  // J x T sample sizes
  int R = 25;
  std::vector<std::string> model_names;
  std::vector<ModelSpec> models;
  SamplerConfig sampler;
  int t1 = 0;          // change endpoints, 0-based; t2 < 0 means T-1
  int t2 = -1;
  double level = 0.95;
  std::uint64_t replicate_seed = 99;
};

struct SimStudyResult {
  Population pop;
  Eigen::MatrixXi n;
  std::vector<EstimatorOutput> estimators;  // direct first, then models
};

/// Full replicate pipeline: population, samples, direct estimates, model fits.
SimStudyResult run_sim_study(const SimStudyConfig& cfg);

/// Deterministic mixed sample-size pattern covering the taxonomy the panel
/// cares about: all-empty areas, single-plot-heavy areas, small through large
/// samples up to n_max, and a fully saturated class.
Eigen::MatrixXi mixed_sample_sizes(int J, int T, int n_max, std::uint64_t seed);

}  // namespace stfh
