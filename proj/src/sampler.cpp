#include "stfh/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>
#include <vector>

namespace stfh {

namespace {

constexpr double kBoundEps = 1e-8;

double logit(double u) { return std::log(u / (1.0 - u)); }
double inv_logit(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Map x in (lo, hi) to the real line and back.
double to_unconstrained(double x, double lo, double hi) { return logit((x - lo) / (hi - lo)); }
double from_unconstrained(double z, double lo, double hi) {
  double x = lo + (hi - lo) * inv_logit(z);
  return std::clamp(x, lo + kBoundEps, hi - kBoundEps);
}

double log_jacobian(double x, double lo, double hi) {
  return std::log(x - lo) + std::log(hi - x);
}

}  // namespace

Sampler::Sampler(const PanelData& data, const ModelSpec& spec, const AreaGraph& graph)
    : data_(&data),
      spec_(&spec),
      graph_(&graph),
      car_(graph),
      ar_(data.idx.T),
      kron_(graph, data.idx.T) {
  data.validate();
  spec.validate();
  const int N = data.idx.N();
  const int J = data.idx.J;
  const int T = data.idx.T;
  if (graph.J() != J) fail("BadPanel", "graph size does not match panel");
  if (data.X.cols() != spec.p) fail("BadModelSpec", "covariate count mismatch");

  design_.resize(N, spec.p + 1);
  design_.col(0).setOnes();
  if (spec.p > 0) design_.rightCols(spec.p) = data.X;
  XtX_ = design_.transpose() * design_;

  const int q = spec.q();
  xtil_.resize(N, q);
  xtil_sumsq_ = Eigen::MatrixXd::Zero(J, q);
  for (int k = 0; k < q; ++k) {
    xtil_.col(k) = data.X.col(spec.svc[k]);
    for (int j = 0; j < J; ++j)
      xtil_sumsq_(j, k) = xtil_.col(k).segment(j * T, T).squaredNorm();
  }

  is_observed_.assign(N, false);
  for (int i = 0; i < N; ++i)
    if (data.table.observed(i)) {
      is_observed_[i] = true;
      observed_.push_back(i);
    }
  const int n_obs = static_cast<int>(observed_.size());
  muhat_obs_.resize(n_obs);
  sigma2hat_obs_.resize(n_obs);
  n_obs_.resize(n_obs);
  for (int c = 0; c < n_obs; ++c) {
    const auto& cell = data.table.cells[observed_[c]];
    muhat_obs_[c] = cell.mu_hat;
    sigma2hat_obs_[c] = cell.sigma2_hat;
    n_obs_[c] = cell.n;
  }

  // Fixed sparsity pattern for the eta0 conditional precision:
  // (spatial pattern) x (tridiagonal). Sub2 has no cross-area coupling.
  std::vector<Eigen::Triplet<double>> trips;
  auto add_block = [&](int j1, int j2) {
    for (int t1 = 0; t1 < T; ++t1)
      for (int t2 = std::max(0, t1 - 1); t2 <= std::min(T - 1, t1 + 1); ++t2)
        trips.emplace_back(j1 * T + t1, j2 * T + t2, 1.0);
  };
  for (int j = 0; j < J; ++j) add_block(j, j);
  if (spec.variant != Variant::Sub2) {
    for (auto [a, b] : graph.edges()) {
      add_block(a - 1, b - 1);
      add_block(b - 1, a - 1);
    }
  }
  eta0_prec_.resize(N, N);
  eta0_prec_.setFromTriplets(trips.begin(), trips.end());
  eta0_prec_.makeCompressed();

  eta_s_prec_.resize(q);
  eta_s_analyzed_.assign(q, false);
  for (int k = 0; k < q; ++k) {
    eta_s_llt_.push_back(std::make_unique<Eigen::SimplicialLLT<SpMat>>());
    eta_s_prec_[k] = car_.precision_matrix(0.5);  // pattern: adjacency + diagonal
  }
}

Eigen::VectorXd Sampler::svc_contribution(const ParameterState& s, int skip_k) const {
  const int N = data_->idx.N();
  const int T = data_->idx.T;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(N);
  for (int k = 0; k < spec_->q(); ++k) {
    if (k == skip_k) continue;
    const Eigen::VectorXd& eta = s.eta_s[k];
    for (int j = 0; j < data_->idx.J; ++j)
      out.segment(j * T, T) += eta[j] * xtil_.col(k).segment(j * T, T);
  }
  return out;
}

Eigen::VectorXd Sampler::mean_vector(const ParameterState& s) const {
  Eigen::VectorXd m = s.eta0 + design_ * s.beta;
  if (spec_->q() > 0) m += svc_contribution(s, -1);
  return m;
}

ParameterState Sampler::initial_state() const {
  const auto& idx = data_->idx;
  const auto& prior = spec_->prior;
  const int N = idx.N();
  const int q = spec_->q();
  const int n_obs = static_cast<int>(observed_.size());

  ParameterState s;
  s.eta0 = Eigen::VectorXd::Zero(N);
  s.eta_s.assign(q, Eigen::VectorXd::Zero(idx.J));

  // Ridge fit of beta against observed direct estimates.
  Eigen::MatrixXd A =
      Eigen::MatrixXd::Identity(spec_->p + 1, spec_->p + 1) / prior.sigma2_beta;
  Eigen::VectorXd rhs =
      Eigen::VectorXd::Constant(spec_->p + 1, prior.mu_beta / prior.sigma2_beta);
  for (int c = 0; c < n_obs; ++c) {
    const auto row = design_.row(observed_[c]);
    A += row.transpose() * row;
    rhs += row.transpose() * muhat_obs_[c];
  }
  s.beta = A.llt().solve(rhs);

  Eigen::VectorXd fitted = design_ * s.beta;
  s.mu = fitted;
  for (int c = 0; c < n_obs; ++c) s.mu[observed_[c]] = muhat_obs_[c];

  s.sigma2_cell = sigma2hat_obs_;
  auto ig_mean = [](double a, double b) { return a > 1.0 ? b / (a - 1.0) : b; };
  s.sigma2_eps = ig_mean(prior.a_eps, prior.b_eps);
  s.sigma2_eta0 = ig_mean(prior.a_eta0, prior.b_eta0);
  s.alpha_eta0 = 0.5 * (prior.alpha_lo + prior.alpha_hi);
  s.rho_eta0 = spec_->variant == Variant::Sub2 ? kNaN : 0.5 * (prior.rho_lo + prior.rho_hi);
  s.sigma2_eta_s = Eigen::VectorXd::Constant(q, ig_mean(prior.a_eta_s, prior.b_eta_s));
  s.rho_eta_s = Eigen::VectorXd::Constant(q, 0.5 * (prior.rho_lo + prior.rho_hi));
  return s;
}

void Sampler::update_mu_observed(ParameterState& s, Rng& rng) const {
  Eigen::VectorXd m = mean_vector(s);
  for (size_t c = 0; c < observed_.size(); ++c) {
    const int i = observed_[c];
    const double prec = 1.0 / s.sigma2_cell[c] + 1.0 / s.sigma2_eps;
    const double mean =
        (muhat_obs_[c] / s.sigma2_cell[c] + m[i] / s.sigma2_eps) / prec;
    s.mu[i] = mean + rng.normal() / std::sqrt(prec);
  }
}

void Sampler::update_mu_missing(ParameterState& s, Rng& rng) const {
  Eigen::VectorXd m = mean_vector(s);
  const double sd = std::sqrt(s.sigma2_eps);
  for (int i = 0; i < data_->idx.N(); ++i)
    if (!is_observed_[i]) s.mu[i] = m[i] + sd * rng.normal();
}

void Sampler::update_beta(ParameterState& s, Rng& rng) const {
  const auto& prior = spec_->prior;
  const int P = spec_->p + 1;
  Eigen::VectorXd resid = s.mu - s.eta0;
  if (spec_->q() > 0) resid -= svc_contribution(s, -1);

  Eigen::MatrixXd prec = XtX_ / s.sigma2_eps;
  prec.diagonal().array() += 1.0 / prior.sigma2_beta;
  Eigen::VectorXd v = design_.transpose() * resid / s.sigma2_eps;
  v.array() += prior.mu_beta / prior.sigma2_beta;

  Eigen::VectorXd noise(P);
  for (int i = 0; i < P; ++i) noise[i] = rng.normal();
  s.beta = sample_mvn_from_precision(prec, v, noise);
}

void Sampler::refresh_eta0_precision(double sigma2_eta, double rho, double alpha,
                                     double sigma2_eps) {
  const int T = data_->idx.T;
  const Eigen::VectorXd& d = graph_->degrees();
  const bool spatial = spec_->variant != Variant::Sub2;
  const double ss = 1.0 / (1.0 - alpha * alpha);
  const double cell_prec = 1.0 / sigma2_eps;

  for (int col = 0; col < eta0_prec_.outerSize(); ++col) {
    const int j2 = col / T, t2 = col % T;
    for (SpMat::InnerIterator it(eta0_prec_, col); it; ++it) {
      const int row = static_cast<int>(it.row());
      const int j1 = row / T, t1 = row % T;
      double sval;
      if (j1 == j2)
        sval = spatial ? d[j1] : 1.0;
      else
        sval = -rho;
      double aval;
      if (t1 == t2) {
        if (T == 1)
          aval = 1.0;
        else
          aval = (t1 > 0 && t1 < T - 1) ? (1.0 + alpha * alpha) * ss : ss;
      } else {
        aval = -alpha * ss;
      }
      double value = sval * aval / sigma2_eta;
      if (row == col) value += cell_prec;
      it.valueRef() = value;
    }
  }
}

void Sampler::update_eta0(ParameterState& s, Rng& rng) {
  const int N = data_->idx.N();
  Eigen::VectorXd resid = s.mu - design_ * s.beta;
  if (spec_->q() > 0) resid -= svc_contribution(s, -1);
  Eigen::VectorXd v = resid / s.sigma2_eps;

  refresh_eta0_precision(s.sigma2_eta0, s.rho_eta0, s.alpha_eta0, s.sigma2_eps);
  if (!eta0_analyzed_) {
    eta0_llt_.analyzePattern(eta0_prec_);
    eta0_analyzed_ = true;
  }
  eta0_llt_.factorize(eta0_prec_);
  if (eta0_llt_.info() != Eigen::Success)
    fail("CholeskyFailure", "eta0 conditional precision is not positive definite");

  Eigen::VectorXd noise(N);
  for (int i = 0; i < N; ++i) noise[i] = rng.normal();
  s.eta0 = sample_mvn_canonical(eta0_llt_, v, noise);
}

void Sampler::update_eta_s(ParameterState& s, Rng& rng, int k) {
  const int J = data_->idx.J;
  const int T = data_->idx.T;
  Eigen::VectorXd resid = s.mu - s.eta0 - design_ * s.beta - svc_contribution(s, k);

  Eigen::VectorXd v(J);
  for (int j = 0; j < J; ++j)
    v[j] = xtil_.col(k).segment(j * T, T).dot(resid.segment(j * T, T)) / s.sigma2_eps;

  // sigma^-2_k (D - rho_k W) + sigma^-2_eps diag(sum_t xtil^2)
  SpMat& Q = eta_s_prec_[k];
  const Eigen::VectorXd& d = graph_->degrees();
  const double rho = s.rho_eta_s[k];
  for (int col = 0; col < Q.outerSize(); ++col)
    for (SpMat::InnerIterator it(Q, col); it; ++it) {
      const int row = static_cast<int>(it.row());
      double value = (row == col ? d[row] : -rho) / s.sigma2_eta_s[k];
      if (row == col) value += xtil_sumsq_(row, k) / s.sigma2_eps;
      it.valueRef() = value;
    }
  if (!eta_s_analyzed_[k]) {
    eta_s_llt_[k]->analyzePattern(Q);
    eta_s_analyzed_[k] = true;
  }
  eta_s_llt_[k]->factorize(Q);
  if (eta_s_llt_[k]->info() != Eigen::Success)
    fail("CholeskyFailure", "eta_s conditional precision is not positive definite");

  Eigen::VectorXd noise(J);
  for (int j = 0; j < J; ++j) noise[j] = rng.normal();
  s.eta_s[k] = sample_mvn_canonical(*eta_s_llt_[k], v, noise);
}

void Sampler::update_sigma2_cells(ParameterState& s, Rng& rng) const {
  for (size_t c = 0; c < observed_.size(); ++c) {
    const double n = n_obs_[c];
    const double a = n / 2.0 + 0.5;
    const double b = (n - 1.0) * sigma2hat_obs_[c] / 2.0 +
                     0.5 * std::pow(muhat_obs_[c] - s.mu[observed_[c]], 2);
    s.sigma2_cell[c] = rng.inverse_gamma(a, b);
  }
}

double Sampler::eta0_prior_quadform_unit(const Eigen::VectorXd& eta0, double rho,
                                         double alpha) const {
  const int J = data_->idx.J;
  const int T = data_->idx.T;
  if (spec_->variant == Variant::Sub2) {
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMat> H(eta0.data(), J, T);
    Eigen::MatrixXd G = ar_.apply_precision_rows(H, alpha);
    return (H.array() * G.array()).sum();
  }
  return kron_.quadform(eta0, 1.0, rho, alpha);
}

void Sampler::update_sigma2_eta0(ParameterState& s, Rng& rng) const {
  const auto& prior = spec_->prior;
  const double a = prior.a_eta0 + data_->idx.N() / 2.0;
  const double b =
      prior.b_eta0 + 0.5 * eta0_prior_quadform_unit(s.eta0, s.rho_eta0, s.alpha_eta0);
  s.sigma2_eta0 = rng.inverse_gamma(a, b);
}

void Sampler::update_sigma2_eta_s(ParameterState& s, Rng& rng, int k) const {
  const auto& prior = spec_->prior;
  const double a = prior.a_eta_s + data_->idx.J / 2.0;
  const double b = prior.b_eta_s + 0.5 * car_.quadform(s.eta_s[k], s.rho_eta_s[k]);
  s.sigma2_eta_s[k] = rng.inverse_gamma(a, b);
}

void Sampler::update_sigma2_eps(ParameterState& s, Rng& rng) const {
  const auto& prior = spec_->prior;
  const double a = prior.a_eps + data_->idx.N() / 2.0;
  const double b = prior.b_eps + 0.5 * (s.mu - mean_vector(s)).squaredNorm();
  s.sigma2_eps = rng.inverse_gamma(a, b);
}

double Sampler::log_target_eta0(const ParameterState& s, double rho, double alpha) const {
  const auto& prior = spec_->prior;
  double logdet, qf;
  if (spec_->variant == Variant::Sub2) {
    const int N = data_->idx.N();
    const int J = data_->idx.J;
    logdet = N * std::log(s.sigma2_eta0) + J * ar_.logdet(alpha);
    qf = eta0_prior_quadform_unit(s.eta0, kNaN, alpha) / s.sigma2_eta0;
    return -0.5 * logdet - 0.5 * qf + log_jacobian(alpha, prior.alpha_lo, prior.alpha_hi);
  }
  logdet = kron_.logdet_cov(s.sigma2_eta0, rho, alpha);
  qf = kron_.quadform(s.eta0, s.sigma2_eta0, rho, alpha);
  return -0.5 * logdet - 0.5 * qf + log_jacobian(rho, prior.rho_lo, prior.rho_hi) +
         log_jacobian(alpha, prior.alpha_lo, prior.alpha_hi);
}

double Sampler::log_target_eta_s(const ParameterState& s, int k, double rho) const {
  const auto& prior = spec_->prior;
  const int J = data_->idx.J;
  // log|sigma2 R(rho)| = J log sigma2 - log|D - rho W|
  const double logdet = J * std::log(s.sigma2_eta_s[k]) - car_.logdet_precision(rho);
  const double qf = car_.quadform(s.eta_s[k], rho) / s.sigma2_eta_s[k];
  return -0.5 * logdet - 0.5 * qf + log_jacobian(rho, prior.rho_lo, prior.rho_hi);
}

bool Sampler::update_corr_eta0(ParameterState& s, Rng& rng, double step) {
  const auto& prior = spec_->prior;
  const bool sub2 = spec_->variant == Variant::Sub2;

  const double alpha_new = from_unconstrained(
      to_unconstrained(s.alpha_eta0, prior.alpha_lo, prior.alpha_hi) + step * rng.normal(),
      prior.alpha_lo, prior.alpha_hi);
  const double rho_new =
      sub2 ? kNaN
           : from_unconstrained(
                 to_unconstrained(s.rho_eta0, prior.rho_lo, prior.rho_hi) + step * rng.normal(),
                 prior.rho_lo, prior.rho_hi);

  const double log_ratio =
      log_target_eta0(s, rho_new, alpha_new) - log_target_eta0(s, s.rho_eta0, s.alpha_eta0);
  if (std::log(rng.uniform()) < log_ratio) {
    s.alpha_eta0 = alpha_new;
    if (!sub2) s.rho_eta0 = rho_new;
    return true;
  }
  return false;
}

bool Sampler::update_rho_eta_s(ParameterState& s, Rng& rng, int k, double step) {
  const auto& prior = spec_->prior;
  const double rho_new = from_unconstrained(
      to_unconstrained(s.rho_eta_s[k], prior.rho_lo, prior.rho_hi) + step * rng.normal(),
      prior.rho_lo, prior.rho_hi);
  const double log_ratio =
      log_target_eta_s(s, k, rho_new) - log_target_eta_s(s, k, s.rho_eta_s[k]);
  if (std::log(rng.uniform()) < log_ratio) {
    s.rho_eta_s[k] = rho_new;
    return true;
  }
  return false;
}

namespace {

struct MetroAdapter {
  double step;
  long proposals = 0, accepts = 0;
  long window_proposals = 0, window_accepts = 0;

  void record(bool accepted) {
    ++proposals;
    ++window_proposals;
    if (accepted) {
      ++accepts;
      ++window_accepts;
    }
  }
  void adapt(double target) {
    if (window_proposals == 0) return;
    const double rate = double(window_accepts) / double(window_proposals);
    step *= std::clamp(std::exp(rate - target), 0.5, 2.0);
    window_proposals = window_accepts = 0;
  }
};

struct ChainResult {
  PosteriorDraws draws;  // single-chain slice
  std::vector<AcceptanceStat> acceptance;
};

ChainResult run_single_chain(const PanelData& data, const ModelSpec& spec,
                             const AreaGraph& graph, const SamplerConfig& cfg, int chain_id) {
  Sampler sampler(data, spec, graph);
  Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(chain_id)));
  ParameterState state = sampler.initial_state();

  const int q = spec.q();
  const int N = data.idx.N();
  const int n_obs = static_cast<int>(sampler.observed().size());
  const int M = cfg.draws_per_chain();

  ChainResult out;
  auto& d = out.draws;
  d.J = data.idx.J;
  d.T = data.idx.T;
  d.p = spec.p;
  d.q = q;
  d.variant = spec.variant;
  d.seed = cfg.seed;
  d.n_chains = 1;
  d.mu.resize(M, N);
  d.beta.resize(M, spec.p + 1);
  d.sigma2_cell.resize(M, n_obs);
  d.sigma2_eps.resize(M);
  d.sigma2_eta0.resize(M);
  d.rho_eta0.resize(M);
  d.alpha_eta0.resize(M);
  d.sigma2_eta_s.resize(M, q);
  d.rho_eta_s.resize(M, q);
  if (cfg.store_eta) d.eta0.resize(M, N);
  d.chain.assign(M, chain_id);
  d.observed = sampler.observed();

  MetroAdapter corr0{cfg.initial_step};
  std::vector<MetroAdapter> corr_s(q, MetroAdapter{cfg.initial_step});

  int stored = 0;
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    try {
      sampler.update_mu_observed(state, rng);
      sampler.update_mu_missing(state, rng);
      sampler.update_beta(state, rng);
      sampler.update_eta0(state, rng);
      for (int k = 0; k < q; ++k) sampler.update_eta_s(state, rng, k);
      sampler.update_sigma2_cells(state, rng);
      sampler.update_sigma2_eta0(state, rng);
      for (int k = 0; k < q; ++k) sampler.update_sigma2_eta_s(state, rng, k);
      sampler.update_sigma2_eps(state, rng);
      corr0.record(sampler.update_corr_eta0(state, rng, corr0.step));
      for (int k = 0; k < q; ++k)
        corr_s[k].record(sampler.update_rho_eta_s(state, rng, k, corr_s[k].step));
    } catch (const Error& e) {
      throw Error(e.code(), "chain " + std::to_string(chain_id) + " iteration " +
                                std::to_string(iter) + ": " + e.what());
    }

    const bool warming = iter < cfg.burn_in;
    if (warming && (iter + 1) % cfg.adapt_window == 0) {
      corr0.adapt(cfg.target_accept);
      for (auto& a : corr_s) a.adapt(cfg.target_accept);
    }

    if (!warming && (iter - cfg.burn_in + 1) % cfg.thin == 0) {
      auto violations = validate_state(state, spec, data.idx, n_obs);
      if (!violations.empty())
        fail("InvalidState", "chain " + std::to_string(chain_id) + " iteration " +
                                 std::to_string(iter) + ": " + violations.front().code);
      d.mu.row(stored) = state.mu;
      d.beta.row(stored) = state.beta;
      d.sigma2_cell.row(stored) = state.sigma2_cell;
      d.sigma2_eps[stored] = state.sigma2_eps;
      d.sigma2_eta0[stored] = state.sigma2_eta0;
      d.rho_eta0[stored] = state.rho_eta0;
      d.alpha_eta0[stored] = state.alpha_eta0;
      for (int k = 0; k < q; ++k) {
        d.sigma2_eta_s(stored, k) = state.sigma2_eta_s[k];
        d.rho_eta_s(stored, k) = state.rho_eta_s[k];
      }
      if (cfg.store_eta) d.eta0.row(stored) = state.eta0;
      ++stored;
    }
  }

  const std::string prefix = "chain" + std::to_string(chain_id) + ".";
  out.acceptance.push_back(
      {prefix + "eta0_corr", corr0.proposals, corr0.accepts, corr0.step});
  for (int k = 0; k < q; ++k)
    out.acceptance.push_back({prefix + "eta_s" + std::to_string(k) + "_rho",
                              corr_s[k].proposals, corr_s[k].accepts, corr_s[k].step});
  return out;
}

}  // namespace

PosteriorDraws run_chains(const PanelData& data, const ModelSpec& spec, const AreaGraph& graph,
                          const SamplerConfig& cfg) {
  cfg.validate();
  data.validate();
  spec.validate();

  std::vector<std::future<ChainResult>> futures;
  futures.reserve(cfg.n_chains);
  for (int c = 0; c < cfg.n_chains; ++c)
    futures.push_back(std::async(std::launch::async, run_single_chain, std::cref(data),
                                 std::cref(spec), std::cref(graph), std::cref(cfg), c));

  std::vector<ChainResult> results;
  results.reserve(cfg.n_chains);
  for (auto& f : futures) results.push_back(f.get());

  const int per = cfg.draws_per_chain();
  const int M = per * cfg.n_chains;
  PosteriorDraws all = results[0].draws;
  all.n_chains = cfg.n_chains;
  all.mu.conservativeResize(M, Eigen::NoChange);
  all.beta.conservativeResize(M, Eigen::NoChange);
  all.sigma2_cell.conservativeResize(M, Eigen::NoChange);
  all.sigma2_eps.conservativeResize(M);
  all.sigma2_eta0.conservativeResize(M);
  all.rho_eta0.conservativeResize(M);
  all.alpha_eta0.conservativeResize(M);
  all.sigma2_eta_s.conservativeResize(M, Eigen::NoChange);
  all.rho_eta_s.conservativeResize(M, Eigen::NoChange);
  if (cfg.store_eta) all.eta0.conservativeResize(M, Eigen::NoChange);
  all.chain.resize(M);

  for (int c = 1; c < cfg.n_chains; ++c) {
    const auto& d = results[c].draws;
    const int at = c * per;
    all.mu.middleRows(at, per) = d.mu;
    all.beta.middleRows(at, per) = d.beta;
    all.sigma2_cell.middleRows(at, per) = d.sigma2_cell;
    all.sigma2_eps.segment(at, per) = d.sigma2_eps;
    all.sigma2_eta0.segment(at, per) = d.sigma2_eta0;
    all.rho_eta0.segment(at, per) = d.rho_eta0;
    all.alpha_eta0.segment(at, per) = d.alpha_eta0;
    all.sigma2_eta_s.middleRows(at, per) = d.sigma2_eta_s;
    all.rho_eta_s.middleRows(at, per) = d.rho_eta_s;
    if (cfg.store_eta) all.eta0.middleRows(at, per) = d.eta0;
    for (int i = 0; i < per; ++i) all.chain[at + i] = c;
  }
  for (const auto& r : results)
    all.acceptance.insert(all.acceptance.end(), r.acceptance.begin(), r.acceptance.end());
  return all;
}

}  // namespace stfh
