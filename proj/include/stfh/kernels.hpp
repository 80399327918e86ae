#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "stfh/graph.hpp"
#include "stfh/types.hpp"

namespace stfh {

using SpMat = Eigen::SparseMatrix<double>;

/// Proper-CAR precision D - rho W evaluated through the cached spectral
/// decomposition: no matrix is formed for log-determinants, and actions use
/// the sparse adjacency directly.
class CarKernel {
 public:
  explicit CarKernel(const AreaGraph& g) : g_(&g) {}

  const AreaGraph& graph() const { return *g_; }

  /// log |D - rho W| = sum_i log(d_i (1 - rho lambda_i)).
  double logdet_precision(double rho) const;

  /// (D - rho W) u.
  Eigen::VectorXd precision_action(const Eigen::VectorXd& u, double rho) const;

  /// u' (D - rho W) u.
  double quadform(const Eigen::VectorXd& u, double rho) const;

  /// Sparse D - rho W, for factorization-based draws.
  SpMat precision_matrix(double rho) const;

 private:
  const AreaGraph* g_;
};

/// AR(1) correlation A(alpha) with entries alpha^|i-j|: closed-form Cholesky
/// diagonal, tridiagonal precision, and log-determinant.
class Ar1Kernel {
 public:
  explicit Ar1Kernel(int T);

  int T() const { return T_; }

  /// log |A(alpha)| = (T-1) log(1 - alpha^2).
  double logdet(double alpha) const;

  /// Diagonal of the lower Cholesky factor of A: b_1 = 1, b_t = sqrt(1-alpha^2).
  Eigen::VectorXd chol_diag(double alpha) const;

  /// Dense A(alpha); intended for small T and test oracles.
  Eigen::MatrixXd corr(double alpha) const;

  /// Sparse tridiagonal A(alpha)^{-1}.
  SpMat precision(double alpha) const;

  /// H * A(alpha)^{-1} for row-blocked H (one row per area), O(rows * T).
  Eigen::MatrixXd apply_precision_rows(const Eigen::MatrixXd& H, double alpha) const;

 private:
  int T_;
};

/// Kronecker product covariance sigma2 * R(rho) (x) A(alpha) under area-major
/// stacking. Everything is evaluated against the precision side
/// (D - rho W) (x) A^{-1} / sigma2 without forming an N x N matrix.
class KroneckerKernel {
 public:
  KroneckerKernel(const AreaGraph& g, int T) : car_(g), ar_(T) {}

  const CarKernel& car() const { return car_; }
  const Ar1Kernel& ar1() const { return ar_; }
  int N() const { return car_.graph().J() * ar_.T(); }

  double logdet_cov(double sigma2, double rho, double alpha) const;
  double quadform(const Eigen::VectorXd& eta, double sigma2, double rho, double alpha) const;
  Eigen::VectorXd precision_action(const Eigen::VectorXd& eta, double sigma2, double rho,
                                   double alpha) const;

 private:
  CarKernel car_;
  Ar1Kernel ar_;
};

double car_logdet_precision(const AreaGraph& g, double rho);
double ar1_logdet(int T, double alpha);
double kron_logdet(const CarKernel& ck, const Ar1Kernel& ak, double sigma2, double rho,
                   double alpha);
double kron_precision_quadform(const Eigen::VectorXd& eta, const CarKernel& ck,
                               const Ar1Kernel& ak, double sigma2, double rho, double alpha);

/// Draw from MVN(V v, V) given the upper-triangular Cholesky factor U of the
/// precision V^{-1}: returns U^{-1}(U^{-T} v + noise). With zero noise this is
/// the conditional mean.
Eigen::VectorXd sample_mvn_canonical(const Eigen::MatrixXd& U, const Eigen::VectorXd& v,
                                     const Eigen::VectorXd& noise);

/// Dense-precision convenience: factorizes and draws. CholeskyFailure when the
/// precision is not positive definite.
Eigen::VectorXd sample_mvn_from_precision(const Eigen::MatrixXd& precision,
                                          const Eigen::VectorXd& v,
                                          const Eigen::VectorXd& noise);

/// Sparse analogue using an already-factorized permuted Cholesky.
Eigen::VectorXd sample_mvn_canonical(const Eigen::SimplicialLLT<SpMat>& llt,
                                     const Eigen::VectorXd& v, const Eigen::VectorXd& noise);

}  // namespace stfh
