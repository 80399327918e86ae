#pragma once

// Dense reference implementations used only by tests. These deliberately take
// the slow textbook route (full matrices, generic factorizations) so kernel
// results can be checked against an independent path.

#include <random>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stfh/graph.hpp"

namespace oracle {

inline Eigen::MatrixXd car_precision_dense(const stfh::AreaGraph& g, double rho) {
  Eigen::MatrixXd Q = -rho * Eigen::MatrixXd(g.adjacency());
  Q += Eigen::MatrixXd(g.degrees().asDiagonal());
  return Q;
}

inline Eigen::MatrixXd ar1_corr_dense(int T, double alpha) {
  Eigen::MatrixXd A(T, T);
  for (int i = 0; i < T; ++i)
    for (int j = 0; j < T; ++j) A(i, j) = std::pow(alpha, std::abs(i - j));
  return A;
}

inline double logdet_dense(const Eigen::MatrixXd& M) {
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  return 2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
}

/// Dense sigma2 * R(rho) (x) A(alpha) with R = (D - rho W)^{-1}, area-major.
inline Eigen::MatrixXd kron_cov_dense(const stfh::AreaGraph& g, int T, double sigma2,
                                      double rho, double alpha) {
  Eigen::MatrixXd R = car_precision_dense(g, rho).inverse();
  Eigen::MatrixXd A = ar1_corr_dense(T, alpha);
  const int J = g.J();
  Eigen::MatrixXd K(J * T, J * T);
  for (int j1 = 0; j1 < J; ++j1)
    for (int j2 = 0; j2 < J; ++j2) K.block(j1 * T, j2 * T, T, T) = sigma2 * R(j1, j2) * A;
  return K;
}

inline Eigen::MatrixXd kron_dense(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd out(A.rows() * B.rows(), A.cols() * B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

/// Connected random graph: a random spanning tree plus extra random edges.
/// Returned pairs are 1-based, as build_area_graph expects.
inline std::vector<std::pair<int, int>> random_connected_edges(int J, std::mt19937_64& rng,
                                                               double extra_edge_prob = 0.15) {
  std::vector<std::pair<int, int>> edges;
  std::vector<int> order(J);
  for (int i = 0; i < J; ++i) order[i] = i + 1;
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 1; i < J; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    edges.emplace_back(order[pick(rng)], order[i]);
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int a = 1; a <= J; ++a)
    for (int b = a + 1; b <= J; ++b)
      if (u(rng) < extra_edge_prob) edges.emplace_back(a, b);
  return edges;
}

}  // namespace oracle
