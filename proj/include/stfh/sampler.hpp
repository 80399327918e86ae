#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "stfh/kernels.hpp"
#include "stfh/rng.hpp"
#include "stfh/types.hpp"

namespace stfh {

struct SamplerConfig {
  int n_chains = 3;
  int iterations = 2000;
  int burn_in = 1000;
  int thin = 1;
  std::uint64_t seed = 1;
  double initial_step = 0.5;    // random-walk sd on the logit scale
  int adapt_window = 50;        // burn-in only; steps are frozen afterwards
  double target_accept = 0.35;
  bool store_eta = false;

  int draws_per_chain() const { return (iterations - burn_in) / thin; }

  void validate() const {
    if (n_chains < 1) fail("BadSamplerConfig", "need at least one chain");
    if (iterations <= burn_in) fail("BadSamplerConfig", "iterations must exceed burn_in");
    if (burn_in < 0 || thin < 1) fail("BadSamplerConfig", "bad burn_in or thin");
    if ((iterations - burn_in) % thin != 0)
      fail("BadSamplerConfig", "thin must divide iterations - burn_in");
    if (initial_step <= 0 || adapt_window < 1) fail("BadSamplerConfig", "bad adaptation");
    if (target_accept <= 0 || target_accept >= 1)
      fail("BadSamplerConfig", "target acceptance must be in (0,1)");
  }
};

struct AcceptanceStat {
  std::string target;
  long proposals = 0;
  long accepts = 0;
  double final_step = 0.0;
  double rate() const { return proposals ? double(accepts) / double(proposals) : 0.0; }
};

/// Thinned post-burn-in draws, chains concatenated in chain order. Row l of
/// each matrix belongs to draw l; rho_eta0 is NaN for Sub2.
struct PosteriorDraws {
  int J = 0, T = 0, p = 0, q = 0;
  Variant variant = Variant::Sub1;
  std::uint64_t seed = 0;
  int n_chains = 0;

  Eigen::MatrixXd mu;           // M x N
  Eigen::MatrixXd beta;         // M x (p+1)
  Eigen::MatrixXd sigma2_cell;  // M x n_obs
  Eigen::VectorXd sigma2_eps;   // M
  Eigen::VectorXd sigma2_eta0;  // M
  Eigen::VectorXd rho_eta0;     // M
  Eigen::VectorXd alpha_eta0;   // M
  Eigen::MatrixXd sigma2_eta_s;  // M x q
  Eigen::MatrixXd rho_eta_s;     // M x q
  Eigen::MatrixXd eta0;          // M x N when stored, else 0 x 0
  std::vector<int> chain;        // M
  std::vector<int> observed;     // flat indices of observed cells

  std::vector<AcceptanceStat> acceptance;

  int M() const { return static_cast<int>(mu.rows()); }
  int draws_per_chain() const { return n_chains ? M() / n_chains : 0; }
};

/// Gibbs/Metropolis machinery for one model on one panel. Step methods mutate
/// the supplied state in place so chains can run them in any orchestration;
/// instances are not shared across threads (sparse factorization workspaces).
class Sampler {
 public:
  Sampler(const PanelData& data, const ModelSpec& spec, const AreaGraph& graph);

  ParameterState initial_state() const;

  void update_mu_observed(ParameterState& s, Rng& rng) const;
  void update_mu_missing(ParameterState& s, Rng& rng) const;
  void update_beta(ParameterState& s, Rng& rng) const;
  void update_eta0(ParameterState& s, Rng& rng);
  void update_eta_s(ParameterState& s, Rng& rng, int k);
  void update_sigma2_cells(ParameterState& s, Rng& rng) const;
  void update_sigma2_eta0(ParameterState& s, Rng& rng) const;
  void update_sigma2_eta_s(ParameterState& s, Rng& rng, int k) const;
  void update_sigma2_eps(ParameterState& s, Rng& rng) const;

  /// Joint logit random walk on (rho, alpha) of the intercept process (alpha
  /// only for Sub2). Returns whether the proposal was accepted.
  bool update_corr_eta0(ParameterState& s, Rng& rng, double step);
  bool update_rho_eta_s(ParameterState& s, Rng& rng, int k, double step);

  /// Log target for the intercept-process correlation update: Gaussian log
  /// density of eta0 under its prior plus the uniform-bounds Jacobian terms.
  double log_target_eta0(const ParameterState& s, double rho, double alpha) const;
  double log_target_eta_s(const ParameterState& s, int k, double rho) const;

  /// eta0 + X beta + SVC contribution, length N.
  Eigen::VectorXd mean_vector(const ParameterState& s) const;

  const std::vector<int>& observed() const { return observed_; }
  const ModelSpec& spec() const { return *spec_; }
  const PanelData& data() const { return *data_; }
  const AreaGraph& graph() const { return *graph_; }
  const KroneckerKernel& kron() const { return kron_; }

 private:
  double eta0_prior_quadform_unit(const Eigen::VectorXd& eta0, double rho, double alpha) const;
  void refresh_eta0_precision(double sigma2_eta, double rho, double alpha, double sigma2_eps);
  Eigen::VectorXd svc_contribution(const ParameterState& s, int skip_k) const;

  const PanelData* data_;
  const ModelSpec* spec_;
  const AreaGraph* graph_;
  CarKernel car_;
  Ar1Kernel ar_;
  KroneckerKernel kron_;

  Eigen::MatrixXd design_;  // N x (p+1), intercept first
  Eigen::MatrixXd XtX_;
  Eigen::MatrixXd xtil_;        // N x q
  Eigen::MatrixXd xtil_sumsq_;  // J x q, per-area sums of squares

  std::vector<int> observed_;
  Eigen::VectorXd muhat_obs_, sigma2hat_obs_;
  Eigen::VectorXi n_obs_;
  std::vector<bool> is_observed_;

  SpMat eta0_prec_;  // N x N, fixed pattern
  Eigen::SimplicialLLT<SpMat> eta0_llt_;
  bool eta0_analyzed_ = false;

  std::vector<SpMat> eta_s_prec_;
  std::vector<std::unique_ptr<Eigen::SimplicialLLT<SpMat>>> eta_s_llt_;
  std::vector<bool> eta_s_analyzed_;
};

/// Runs the configured number of independent chains (distinct sub-seeds, one
/// thread each), executing the full step schedule per iteration and storing
/// thinned post-burn-in states. Deterministic given (seed, config, data).
PosteriorDraws run_chains(const PanelData& data, const ModelSpec& spec, const AreaGraph& graph,
                          const SamplerConfig& config);

}  // namespace stfh
