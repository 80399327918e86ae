#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "stfh/types.hpp"

namespace stfh {

/// Areal adjacency with its spectral cache: degrees d, eigenpairs (lambda, P)
/// of D^{-1/2} W D^{-1/2}, and the columns of D^{1/2} P. The cache is computed
/// once at construction and shared read-only afterwards.
class AreaGraph {
 public:
  int J() const { return static_cast<int>(degree_.size()); }
  const Eigen::VectorXd& degrees() const { return degree_; }
  const Eigen::SparseMatrix<double>& adjacency() const { return W_; }
  const Eigen::VectorXd& eigenvalues() const { return lambda_; }
  const Eigen::MatrixXd& eigenvectors() const { return P_; }
  /// Columns v_i of D^{1/2} P; W = sum_i lambda_i v_i v_i^T.
  const Eigen::MatrixXd& scaled_eigenvectors() const { return V_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  friend AreaGraph build_area_graph(int J, const std::vector<std::pair<int, int>>& pairs);

 private:
  Eigen::SparseMatrix<double> W_;
  Eigen::VectorXd degree_;
  Eigen::VectorXd lambda_;
  Eigen::MatrixXd P_;
  Eigen::MatrixXd V_;
  std::vector<std::pair<int, int>> edges_;  // deduplicated, i < j, 1-based
};

/// Builds the graph from 1-based node pairs. Pairs are symmetrized and
/// deduplicated; self loops are rejected. Every node must end up with degree
/// at least one, otherwise IsolatedNode is raised.
AreaGraph build_area_graph(int J, const std::vector<std::pair<int, int>>& pairs);

}  // namespace stfh
