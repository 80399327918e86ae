#include "stfh/graph.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace stfh {

AreaGraph build_area_graph(int J, const std::vector<std::pair<int, int>>& pairs) {
  if (J < 1) fail("BadGraph", "graph needs at least one node");

  std::set<std::pair<int, int>> edges;  // canonical (i < j), 1-based
  for (auto [a, b] : pairs) {
    if (a < 1 || a > J || b < 1 || b > J)
      fail("BadGraph", "edge (" + std::to_string(a) + "," + std::to_string(b) +
                           ") references a node outside 1.." + std::to_string(J));
    if (a == b) fail("BadGraph", "self loop on node " + std::to_string(a));
    edges.insert({std::min(a, b), std::max(a, b)});
  }

  AreaGraph g;
  g.edges_.assign(edges.begin(), edges.end());
  g.degree_ = Eigen::VectorXd::Zero(J);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(2 * edges.size());
  for (auto [a, b] : edges) {
    trips.emplace_back(a - 1, b - 1, 1.0);
    trips.emplace_back(b - 1, a - 1, 1.0);
    g.degree_[a - 1] += 1.0;
    g.degree_[b - 1] += 1.0;
  }
  g.W_.resize(J, J);
  g.W_.setFromTriplets(trips.begin(), trips.end());

  for (int i = 0; i < J; ++i)
    if (g.degree_[i] < 1.0)
      fail("IsolatedNode", "node " + std::to_string(i + 1) + " has no neighbors");

  // Spectral cache of D^{-1/2} W D^{-1/2}.
  Eigen::VectorXd dinv_sqrt = g.degree_.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd B = dinv_sqrt.asDiagonal() * Eigen::MatrixXd(g.W_) * dinv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  if (es.info() != Eigen::Success) fail("EigenFailure", "eigendecomposition failed");
  g.lambda_ = es.eigenvalues();
  g.P_ = es.eigenvectors();
  g.V_ = g.degree_.cwiseSqrt().asDiagonal() * g.P_;
  return g;
}

std::vector<Violation> validate_state(const ParameterState& s, const ModelSpec& spec,
                                      const PanelIndex& idx, int n_observed) {
  std::vector<Violation> out;
  auto add = [&](const std::string& code, const std::string& detail) {
    out.push_back({code, detail});
  };
  const int N = idx.N();
  const int q = spec.q();

  if (s.mu.size() != N) add("LENGTH_MISMATCH", "mu");
  if (s.beta.size() != spec.p + 1) add("LENGTH_MISMATCH", "beta");
  if (s.eta0.size() != N) add("LENGTH_MISMATCH", "eta0");
  if (static_cast<int>(s.eta_s.size()) != q) add("LENGTH_MISMATCH", "eta_s count");
  for (const auto& e : s.eta_s)
    if (e.size() != idx.J) add("LENGTH_MISMATCH", "eta_s vector");
  if (s.sigma2_cell.size() != n_observed) add("LENGTH_MISMATCH", "sigma2_cell");
  if (s.sigma2_eta_s.size() != q) add("LENGTH_MISMATCH", "sigma2_eta_s");
  if (s.rho_eta_s.size() != q) add("LENGTH_MISMATCH", "rho_eta_s");

  auto check_var = [&](double v, const std::string& name) {
    if (!std::isfinite(v) || v <= 0.0) add("NEGATIVE_VARIANCE", name);
  };
  check_var(s.sigma2_eps, "sigma2_eps");
  check_var(s.sigma2_eta0, "sigma2_eta0");
  for (int i = 0; i < s.sigma2_cell.size(); ++i)
    if (!std::isfinite(s.sigma2_cell[i]) || s.sigma2_cell[i] <= 0.0)
      add("NEGATIVE_VARIANCE", "sigma2_cell[" + std::to_string(i) + "]");
  for (int k = 0; k < s.sigma2_eta_s.size(); ++k)
    check_var(s.sigma2_eta_s[k], "sigma2_eta_s[" + std::to_string(k) + "]");

  const auto& pr = spec.prior;
  auto check_corr = [&](double v, double lo, double hi, const std::string& name) {
    if (!std::isfinite(v))
      add("CORRELATION_ON_BOUNDARY", name + " non-finite");
    else if (v <= lo || v >= hi)
      add("CORRELATION_ON_BOUNDARY", name);
  };
  if (spec.variant != Variant::Sub2) check_corr(s.rho_eta0, pr.rho_lo, pr.rho_hi, "rho_eta0");
  check_corr(s.alpha_eta0, pr.alpha_lo, pr.alpha_hi, "alpha_eta0");
  for (int k = 0; k < s.rho_eta_s.size(); ++k)
    check_corr(s.rho_eta_s[k], pr.rho_lo, pr.rho_hi, "rho_eta_s[" + std::to_string(k) + "]");

  for (const auto* v : {&s.mu, &s.beta, &s.eta0})
    if (v->size() > 0 && !v->allFinite()) add("NON_FINITE", "state vector");
  return out;
}

}  // namespace stfh
