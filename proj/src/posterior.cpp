#include "stfh/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stfh {

namespace {

// Centered time weights (t - tbar) and their squared norm.
Eigen::VectorXd time_weights(int T, double* denom) {
  Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(T, 0, T - 1);
  w.array() -= w.mean();
  *denom = w.squaredNorm();
  return w;
}

}  // namespace

Eigen::VectorXd trend_draws(const Eigen::MatrixXd& mu_draws, const PanelIndex& idx, int j) {
  if (idx.T < 2) fail("DegenerateTime", "trend requires at least two time steps");
  double denom;
  Eigen::VectorXd w = time_weights(idx.T, &denom);
  // slope = sum_t w_t (mu_t - mubar) / sum w^2; the mubar term drops since
  // sum w = 0
  return mu_draws.middleCols(j * idx.T, idx.T) * w / denom;
}

Eigen::MatrixXd trend_draws_all(const Eigen::MatrixXd& mu_draws, const PanelIndex& idx) {
  Eigen::MatrixXd out(mu_draws.rows(), idx.J);
  for (int j = 0; j < idx.J; ++j) out.col(j) = trend_draws(mu_draws, idx, j);
  return out;
}

Eigen::VectorXd change_draws(const Eigen::MatrixXd& mu_draws, const PanelIndex& idx, int j,
                             int t1, int t2) {
  if (!(0 <= t1 && t1 < t2 && t2 < idx.T))
    fail("BadTimePair", "need 0 <= t1 < t2 < T");
  return mu_draws.col(idx.flat(j, t2)) - mu_draws.col(idx.flat(j, t1));
}

Eigen::MatrixXd change_draws_all(const Eigen::MatrixXd& mu_draws, const PanelIndex& idx, int t1,
                                 int t2) {
  Eigen::MatrixXd out(mu_draws.rows(), idx.J);
  for (int j = 0; j < idx.J; ++j) out.col(j) = change_draws(mu_draws, idx, j, t1, t2);
  return out;
}

AggregateDraws totals_and_aggregates(const Eigen::MatrixXd& mu_draws, const PanelIndex& idx,
                                     const Eigen::VectorXd& area_ha,
                                     const std::vector<int>& group, const std::string& name,
                                     int t1, int t2) {
  if (group.empty()) fail("EmptyGroup", "aggregate group has no members");
  if (area_ha.size() != idx.J) fail("BadPanel", "area vector length mismatch");
  for (int j : group) {
    if (j < 0 || j >= idx.J) fail("EmptyGroup", "group member out of range");
    if (!(area_ha[j] > 0.0)) fail("NonPositiveArea", "area must be positive");
  }

  const int M = static_cast<int>(mu_draws.rows());
  AggregateDraws out;
  out.name = name;
  out.omega = Eigen::MatrixXd::Zero(M, idx.T);
  for (int j : group) {
    out.area_total += area_ha[j];
    out.omega += area_ha[j] * mu_draws.middleCols(j * idx.T, idx.T);
  }
  out.mu = out.omega / out.area_total;

  if (idx.T >= 2) {
    double denom;
    Eigen::VectorXd w = time_weights(idx.T, &denom);
    out.theta = out.mu * w / denom;
    out.delta = out.mu.col(t2) - out.mu.col(t1);
    out.theta_total = out.area_total * out.theta;
    out.delta_total = out.area_total * out.delta;
  }
  return out;
}

double quantile(const Eigen::VectorXd& draws, double prob) {
  if (draws.size() == 0) fail("BadSummary", "no draws");
  std::vector<double> sorted(draws.data(), draws.data() + draws.size());
  std::sort(sorted.begin(), sorted.end());
  const double pos = prob * (sorted.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(pos));
  const auto hi = static_cast<size_t>(std::ceil(pos));
  if (lo == hi) return sorted[lo];
  const double h = pos - lo;
  return (1.0 - h) * sorted[lo] + h * sorted[hi];
}

Summary summarize(const Eigen::VectorXd& draws, double level) {
  if (draws.size() < 1) fail("BadSummary", "no draws");
  Summary s;
  s.mean = draws.mean();
  const double n = static_cast<double>(draws.size());
  s.sd = n > 1 ? std::sqrt((draws.array() - s.mean).square().sum() / (n - 1.0)) : 0.0;
  s.median = quantile(draws, 0.5);
  const double tail = (1.0 - level) / 2.0;
  s.lo = quantile(draws, tail);
  s.hi = quantile(draws, 1.0 - tail);
  s.excludes_zero = (s.lo > 0.0) || (s.hi < 0.0);
  return s;
}

WaicResult waic(const Eigen::MatrixXd& loglik) {
  if (!loglik.allFinite()) fail("NonFiniteLogLik", "pointwise log-likelihood not finite");
  const int M = static_cast<int>(loglik.rows());
  const int n = static_cast<int>(loglik.cols());
  if (M < 1 || n < 1) fail("NonFiniteLogLik", "empty log-likelihood matrix");

  WaicResult r;
  r.pointwise_lpd.resize(n);
  r.pointwise_p.resize(n);
  r.pointwise_elpd.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto col = loglik.col(i);
    const double mx = col.maxCoeff();
    // log mean exp with max compensation
    r.pointwise_lpd[i] = mx + std::log((col.array() - mx).exp().mean());
    const double mean = col.mean();
    r.pointwise_p[i] = M > 1 ? (col.array() - mean).square().sum() / (M - 1.0) : 0.0;
    r.pointwise_elpd[i] = r.pointwise_lpd[i] - r.pointwise_p[i];
  }
  r.elpd = r.pointwise_elpd.sum();
  r.p_eff = r.pointwise_p.sum();
  r.waic = -2.0 * r.elpd;
  return r;
}

ElpdDiff elpd_compare(const WaicResult& a, const WaicResult& b) {
  if (a.pointwise_elpd.size() != b.pointwise_elpd.size())
    fail("NonFiniteLogLik", "reports cover different cells");
  const int n = static_cast<int>(a.pointwise_elpd.size());
  Eigen::VectorXd d = a.pointwise_elpd - b.pointwise_elpd;
  ElpdDiff out;
  out.diff = d.sum();
  if (n > 1) {
    const double var = (d.array() - d.mean()).square().sum() / (n - 1.0);
    out.tau = std::sqrt(n * var);
  }
  return out;
}

Eigen::MatrixXd pointwise_loglik(const PosteriorDraws& draws, const DirectTable& table) {
  const int M = draws.M();
  const int n = static_cast<int>(draws.observed.size());
  constexpr double half_log_2pi = 0.9189385332046727;
  Eigen::MatrixXd ll(M, n);
  for (int c = 0; c < n; ++c) {
    const double muhat = table.cells[draws.observed[c]].mu_hat;
    for (int l = 0; l < M; ++l) {
      const double s2 = draws.sigma2_cell(l, c);
      const double resid = muhat - draws.mu(l, draws.observed[c]);
      ll(l, c) = -half_log_2pi - 0.5 * std::log(s2) - 0.5 * resid * resid / s2;
    }
  }
  return ll;
}

double split_rhat(const Eigen::VectorXd& values, int n_chains) {
  const int per = static_cast<int>(values.size()) / n_chains;
  if (per < 4) fail("BadSummary", "too few draws per chain for split R-hat");
  const int half = per / 2;
  const int m = 2 * n_chains;  // split halves
  Eigen::VectorXd means(m), vars(m);
  for (int c = 0; c < n_chains; ++c) {
    for (int s = 0; s < 2; ++s) {
      const auto seg = values.segment(c * per + s * half, half);
      const double mean = seg.mean();
      means[2 * c + s] = mean;
      vars[2 * c + s] = (seg.array() - mean).square().sum() / (half - 1.0);
    }
  }
  const double W = vars.mean();
  const double B = half * (means.array() - means.mean()).square().sum() / (m - 1.0);
  if (W <= 0.0) return 1.0;
  const double var_plus = (half - 1.0) / half * W + B / half;
  return std::sqrt(var_plus / W);
}

double effective_sample_size(const Eigen::VectorXd& values, int n_chains) {
  const int per = static_cast<int>(values.size()) / n_chains;
  if (per < 4) fail("BadSummary", "too few draws per chain for ESS");

  // within-chain autocovariances, averaged across chains
  Eigen::VectorXd acov = Eigen::VectorXd::Zero(per);
  Eigen::VectorXd means(n_chains), vars(n_chains);
  for (int c = 0; c < n_chains; ++c) {
    const auto seg = values.segment(c * per, per);
    means[c] = seg.mean();
    Eigen::VectorXd centered = seg.array() - means[c];
    vars[c] = centered.squaredNorm() / (per - 1.0);
    for (int lag = 0; lag < per - 1; ++lag)
      acov[lag] += centered.head(per - lag).dot(centered.tail(per - lag)) / per / n_chains;
  }
  const double W = vars.mean();
  double B = 0.0;
  if (n_chains > 1) B = per * (means.array() - means.mean()).square().sum() / (n_chains - 1.0);
  const double var_plus = (per - 1.0) / per * W + (n_chains > 1 ? B / per : 0.0);
  if (var_plus <= 0.0) return static_cast<double>(values.size());

  // Geyer initial positive sequence on paired autocorrelations.
  double rho_sum = 0.0;
  for (int lag = 1; lag + 1 < per; lag += 2) {
    const double rho_a = 1.0 - (W - acov[lag]) / var_plus;
    const double rho_b = 1.0 - (W - acov[lag + 1]) / var_plus;
    if (rho_a + rho_b < 0.0) break;
    rho_sum += rho_a + rho_b;
  }
  const double tau = 1.0 + 2.0 * rho_sum;
  return values.size() / std::max(tau, 1.0);
}

}  // namespace stfh
