#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace stfh {

/// Error with a stable machine-readable code alongside the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& msg) {
  throw Error(code, msg);
}

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Panel layout: J areas, T time steps, stacked area-major so the first T
/// entries belong to area 0 at times 0..T-1. All indices are 0-based.
struct PanelIndex {
  int J = 0;
  int T = 0;

  int N() const { return J * T; }
  int flat(int j, int t) const { return j * T + t; }
  std::pair<int, int> unflat(int i) const { return {i / T, i % T}; }

  bool contains(int j, int t) const { return j >= 0 && j < J && t >= 0 && t < T; }

  void validate() const {
    if (J < 1 || T < 1) fail("BadPanel", "J and T must be positive");
  }
};

enum class MissClass { Observed, NoPlots, SinglePlot, ZeroVariance };

inline const char* to_string(MissClass c) {
  switch (c) {
    case MissClass::Observed: return "observed";
    case MissClass::NoPlots: return "no_plots";
    case MissClass::SinglePlot: return "single_plot";
    case MissClass::ZeroVariance: return "zero_variance";
  }
  return "?";
}

/// Missingness taxonomy for a cell. Cells with n >= 2 but no usable variance
/// (absent mean or variance in an input file) are coerced to SinglePlot:
/// they carry no likelihood contribution either way.
inline MissClass classify_cell(int n, bool has_mu, bool has_sigma2, double sigma2) {
  if (n <= 0) return MissClass::NoPlots;
  if (n == 1) return MissClass::SinglePlot;
  if (!has_mu || !has_sigma2) return MissClass::SinglePlot;
  if (sigma2 == 0.0) return MissClass::ZeroVariance;
  return MissClass::Observed;
}

/// One (area, time) cell of direct estimates. mu_hat / sigma2_hat are NaN
/// when absent.
struct DirectCell {
  int n = 0;
  double mu_hat = kNaN;
  double sigma2_hat = kNaN;
  MissClass cls = MissClass::NoPlots;
};

struct DirectTable {
  PanelIndex idx;
  std::vector<DirectCell> cells;  // size N, flat order

  const DirectCell& cell(int j, int t) const { return cells[idx.flat(j, t)]; }
  DirectCell& cell(int j, int t) { return cells[idx.flat(j, t)]; }

  bool observed(int i) const { return cells[i].cls == MissClass::Observed; }

  /// Flat indices of cells the likelihood sees, in increasing order.
  std::vector<int> observed_indices() const {
    std::vector<int> out;
    for (int i = 0; i < idx.N(); ++i)
      if (observed(i)) out.push_back(i);
    return out;
  }
};

enum class Variant { Full, Sub1, Sub2 };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::Sub1: return "sub1";
    case Variant::Sub2: return "sub2";
  }
  return "?";
}

inline Variant variant_from_string(const std::string& s) {
  if (s == "full") return Variant::Full;
  if (s == "sub1") return Variant::Sub1;
  if (s == "sub2") return Variant::Sub2;
  fail("BadVariant", "unknown model variant '" + s + "'");
}

struct PriorConfig {
  double mu_beta = 0.0;
  double sigma2_beta = 1e5;
  // Inverse-gamma shape/scale per variance family. Shape 2 centers the prior
  // mean on the scale with infinite variance.
  double a_eps = 2.0, b_eps = 1.0;
  double a_eta0 = 2.0, b_eta0 = 1.0;    // space-time (or time-only) intercept process
  double a_eta_s = 2.0, b_eta_s = 1.0;  // spatially varying coefficient processes
  double rho_lo = 0.0, rho_hi = 1.0;
  double alpha_lo = 0.0, alpha_hi = 1.0;

  void validate() const {
    auto pos = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!pos(sigma2_beta)) fail("BadPrior", "sigma2_beta must be positive");
    if (!pos(a_eps) || !pos(b_eps) || !pos(a_eta0) || !pos(b_eta0) || !pos(a_eta_s) ||
        !pos(b_eta_s))
      fail("BadPrior", "inverse-gamma shapes and scales must be positive");
    if (!(0.0 <= rho_lo && rho_lo < rho_hi && rho_hi <= 1.0))
      fail("BadPrior", "rho bounds must satisfy 0 <= lo < hi <= 1");
    if (!(0.0 <= alpha_lo && alpha_lo < alpha_hi && alpha_hi <= 1.0))
      fail("BadPrior", "alpha bounds must satisfy 0 <= lo < hi <= 1");
  }
};

/// Which candidate model to fit and which covariates get a spatially varying
/// coefficient. svc holds indices into the covariate matrix columns; each SVC
/// covariate is the same column used in the fixed-effects part.
struct ModelSpec {
  Variant variant = Variant::Sub1;
  int p = 0;              // covariate count, excluding the intercept
  std::vector<int> svc;   // q indices into 0..p-1
  PriorConfig prior;

  int q() const { return static_cast<int>(svc.size()); }

  void validate() const {
    prior.validate();
    if (p < 0) fail("BadModelSpec", "negative covariate count");
    if (q() > p) fail("BadModelSpec", "q must not exceed p");
    if (variant == Variant::Full && q() < 1)
      fail("BadModelSpec", "full model requires at least one SVC covariate");
    if (variant != Variant::Full && q() != 0)
      fail("BadModelSpec", "sub1/sub2 do not take SVC covariates");
    std::vector<bool> seen(static_cast<size_t>(p), false);
    for (int k : svc) {
      if (k < 0 || k >= p) fail("BadModelSpec", "SVC index out of range");
      if (seen[static_cast<size_t>(k)]) fail("BadModelSpec", "duplicate SVC index");
      seen[static_cast<size_t>(k)] = true;
    }
  }
};

/// One MCMC state. eta0 is the space-time intercept process (time-only for
/// Sub2, in which case rho_eta0 is unused and NaN).
struct ParameterState {
  Eigen::VectorXd mu;           // N
  Eigen::VectorXd beta;         // p + 1, intercept first
  Eigen::VectorXd eta0;         // N
  std::vector<Eigen::VectorXd> eta_s;  // q vectors, each length J
  Eigen::VectorXd sigma2_cell;  // one per observed cell, observed-index order
  double sigma2_eps = 1.0;
  double sigma2_eta0 = 1.0;
  double rho_eta0 = kNaN;
  double alpha_eta0 = 0.5;
  Eigen::VectorXd sigma2_eta_s;  // q
  Eigen::VectorXd rho_eta_s;     // q
};

struct Violation {
  std::string code;
  std::string detail;
};

/// Total function: returns every invariant violation found, empty when the
/// state is consistent with the model and panel dimensions.
std::vector<Violation> validate_state(const ParameterState& s, const ModelSpec& spec,
                                      const PanelIndex& idx, int n_observed);

/// Direct table plus covariates: everything a model fit consumes.
struct PanelData {
  PanelIndex idx;
  DirectTable table;
  Eigen::MatrixXd X;  // N x p covariates in flat order (no intercept column)
  std::vector<std::string> covariate_names;

  void validate() const {
    idx.validate();
    if (static_cast<int>(table.cells.size()) != idx.N())
      fail("BadPanel", "direct table size does not match panel index");
    if (X.rows() != idx.N() && X.cols() > 0)
      fail("BadPanel", "covariate rows do not match panel size");
    if (!X.allFinite()) fail("MissingCovariate", "covariates must be complete and finite");
  }
};

}  // namespace stfh
