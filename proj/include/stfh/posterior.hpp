#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stfh/sampler.hpp"
#include "stfh/types.hpp"

namespace stfh {

/// Least-squares slope of one area's latent mean series, one value per draw.
/// mu_draws is M x N in flat order.
Eigen::VectorXd trend_draws(const Eigen::MatrixXd& mu_draws, const PanelIndex& idx, int j);

/// M x J matrix of slopes, all areas.
Eigen::MatrixXd trend_draws_all(const Eigen::MatrixXd& mu_draws, const PanelIndex& idx);

/// mu[j, t2] - mu[j, t1] per draw; 0-based times, t1 < t2.
Eigen::VectorXd change_draws(const Eigen::MatrixXd& mu_draws, const PanelIndex& idx, int j,
                             int t1, int t2);
Eigen::MatrixXd change_draws_all(const Eigen::MatrixXd& mu_draws, const PanelIndex& idx, int t1,
                                 int t2);

/// Area-weighted aggregate functionals over a group of areas. Every output is
/// a per-draw transform of the same mu draws; nothing is re-sampled.
struct AggregateDraws {
  std::string name;
  double area_total = 0.0;     // sum of member areas
  Eigen::MatrixXd omega;       // M x T totals
  Eigen::MatrixXd mu;          // M x T densities
  Eigen::VectorXd theta;       // M trend of the density series
  Eigen::VectorXd delta;       // M change of the density series
  Eigen::VectorXd theta_total; // M, area_total * theta
  Eigen::VectorXd delta_total; // M
};

AggregateDraws totals_and_aggregates(const Eigen::MatrixXd& mu_draws, const PanelIndex& idx,
                                     const Eigen::VectorXd& area_ha,
                                     const std::vector<int>& group, const std::string& name,
                                     int t1, int t2);

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool excludes_zero = false;
};

/// Equal-tailed interval at `level`; quantiles are linear-interpolation order
/// statistics matching a plain sort-based computation.
Summary summarize(const Eigen::VectorXd& draws, double level = 0.95);

double quantile(const Eigen::VectorXd& draws, double prob);

struct WaicResult {
  double elpd = 0.0;
  double p_eff = 0.0;
  double waic = 0.0;
  Eigen::VectorXd pointwise_elpd;
  Eigen::VectorXd pointwise_lpd;
  Eigen::VectorXd pointwise_p;
};

/// loglik is M draws by n_cells pointwise log-likelihoods over observed cells.
WaicResult waic(const Eigen::MatrixXd& loglik);

struct ElpdDiff {
  double diff = 0.0;  // elpd(a) - elpd(b)
  double tau = 0.0;   // paired standard error
};

/// Difference computed cell-by-cell; both reports must cover the same cells.
ElpdDiff elpd_compare(const WaicResult& a, const WaicResult& b);

/// Per-draw log N(mu_hat | mu, sigma2_cell) over the observed cells.
Eigen::MatrixXd pointwise_loglik(const PosteriorDraws& draws, const DirectTable& table);

/// Split-R-hat over the chains recorded in the draws; values near 1 indicate
/// mixing. draws must hold whole chains in contiguous equal-sized blocks.
double split_rhat(const Eigen::VectorXd& values, int n_chains);

/// Effective sample size via initial-positive-sequence autocorrelation.
double effective_sample_size(const Eigen::VectorXd& values, int n_chains);

}  // namespace stfh
