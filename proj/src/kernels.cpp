#include "stfh/kernels.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace stfh {

double CarKernel::logdet_precision(double rho) const {
  const Eigen::VectorXd& d = g_->degrees();
  const Eigen::VectorXd& lam = g_->eigenvalues();
  double out = 0.0;
  for (int i = 0; i < d.size(); ++i) {
    const double factor = 1.0 - rho * lam[i];
    if (factor <= 0.0)
      fail("NonPositiveDefinite",
           "1 - rho*lambda is not positive at eigenvalue " + std::to_string(lam[i]));
    out += std::log(d[i] * factor);
  }
  return out;
}

Eigen::VectorXd CarKernel::precision_action(const Eigen::VectorXd& u, double rho) const {
  return g_->degrees().cwiseProduct(u) - rho * (g_->adjacency() * u);
}

double CarKernel::quadform(const Eigen::VectorXd& u, double rho) const {
  return u.dot(precision_action(u, rho));
}

SpMat CarKernel::precision_matrix(double rho) const {
  SpMat Q = -rho * g_->adjacency();
  const Eigen::VectorXd& d = g_->degrees();
  for (int i = 0; i < d.size(); ++i) Q.coeffRef(i, i) += d[i];
  Q.makeCompressed();
  return Q;
}

Ar1Kernel::Ar1Kernel(int T) : T_(T) {
  if (T < 1) fail("BadPanel", "AR(1) kernel needs T >= 1");
}

double Ar1Kernel::logdet(double alpha) const {
  if (std::abs(alpha) >= 1.0) fail("NonPositiveDefinite", "|alpha| must be below 1");
  return (T_ - 1) * std::log1p(-alpha * alpha);
}

Eigen::VectorXd Ar1Kernel::chol_diag(double alpha) const {
  Eigen::VectorXd b = Eigen::VectorXd::Constant(T_, std::sqrt(1.0 - alpha * alpha));
  b[0] = 1.0;
  return b;
}

Eigen::MatrixXd Ar1Kernel::corr(double alpha) const {
  Eigen::MatrixXd A(T_, T_);
  for (int i = 0; i < T_; ++i)
    for (int j = 0; j < T_; ++j) A(i, j) = std::pow(alpha, std::abs(i - j));
  return A;
}

SpMat Ar1Kernel::precision(double alpha) const {
  const double s = 1.0 / (1.0 - alpha * alpha);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(3 * T_));
  for (int t = 0; t < T_; ++t) {
    const bool interior = t > 0 && t < T_ - 1;
    const double diag = (T_ == 1) ? 1.0 : (interior ? (1.0 + alpha * alpha) * s : s);
    trips.emplace_back(t, t, diag);
    if (t + 1 < T_) {
      trips.emplace_back(t, t + 1, -alpha * s);
      trips.emplace_back(t + 1, t, -alpha * s);
    }
  }
  SpMat Q(T_, T_);
  Q.setFromTriplets(trips.begin(), trips.end());
  return Q;
}

Eigen::MatrixXd Ar1Kernel::apply_precision_rows(const Eigen::MatrixXd& H, double alpha) const {
  if (H.cols() != T_) fail("BadPanel", "row-block width must equal T");
  if (T_ == 1) return H;
  const double s = 1.0 / (1.0 - alpha * alpha);
  Eigen::MatrixXd out(H.rows(), T_);
  for (int t = 0; t < T_; ++t) {
    const bool interior = t > 0 && t < T_ - 1;
    out.col(t) = (interior ? (1.0 + alpha * alpha) * s : s) * H.col(t);
    if (t > 0) out.col(t) -= alpha * s * H.col(t - 1);
    if (t + 1 < T_) out.col(t) -= alpha * s * H.col(t + 1);
  }
  return out;
}

double KroneckerKernel::logdet_cov(double sigma2, double rho, double alpha) const {
  const int J = car_.graph().J();
  const int T = ar_.T();
  // |sigma2 R (x) A| = |A|^J |sigma2 R|^T via the Cholesky diagonal of A and
  // the spectral form of the CAR precision determinant.
  const double sum_log_b = ar_.chol_diag(alpha).array().log().sum();
  return 2.0 * J * sum_log_b - (J * T) * std::log(1.0 / sigma2) - T * car_.logdet_precision(rho);
}

double KroneckerKernel::quadform(const Eigen::VectorXd& eta, double sigma2, double rho,
                                 double alpha) const {
  const int J = car_.graph().J();
  const int T = ar_.T();
  if (eta.size() != J * T) fail("BadPanel", "eta length must equal J*T");
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> H(eta.data(), J, T);
  Eigen::MatrixXd G = ar_.apply_precision_rows(H, alpha);  // H A^{-1}
  Eigen::MatrixXd M =
      car_.graph().degrees().asDiagonal() * G - rho * (car_.graph().adjacency() * G);
  return (H.array() * M.array()).sum() / sigma2;
}

Eigen::VectorXd KroneckerKernel::precision_action(const Eigen::VectorXd& eta, double sigma2,
                                                  double rho, double alpha) const {
  const int J = car_.graph().J();
  const int T = ar_.T();
  if (eta.size() != J * T) fail("BadPanel", "eta length must equal J*T");
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> H(eta.data(), J, T);
  Eigen::MatrixXd G = ar_.apply_precision_rows(H, alpha);
  RowMat M = car_.graph().degrees().asDiagonal() * G - rho * (car_.graph().adjacency() * G);
  M /= sigma2;
  return Eigen::Map<const Eigen::VectorXd>(M.data(), J * T);
}

double car_logdet_precision(const AreaGraph& g, double rho) {
  return CarKernel(g).logdet_precision(rho);
}

double ar1_logdet(int T, double alpha) { return Ar1Kernel(T).logdet(alpha); }

double kron_logdet(const CarKernel& ck, const Ar1Kernel& ak, double sigma2, double rho,
                   double alpha) {
  const int J = ck.graph().J();
  const int T = ak.T();
  const double sum_log_b = ak.chol_diag(alpha).array().log().sum();
  return 2.0 * J * sum_log_b - (J * T) * std::log(1.0 / sigma2) - T * ck.logdet_precision(rho);
}

double kron_precision_quadform(const Eigen::VectorXd& eta, const CarKernel& ck,
                               const Ar1Kernel& ak, double sigma2, double rho, double alpha) {
  KroneckerKernel kk(ck.graph(), ak.T());
  return kk.quadform(eta, sigma2, rho, alpha);
}

Eigen::VectorXd sample_mvn_canonical(const Eigen::MatrixXd& U, const Eigen::VectorXd& v,
                                     const Eigen::VectorXd& noise) {
  Eigen::VectorXd b = U.transpose().triangularView<Eigen::Lower>().solve(v);
  return U.triangularView<Eigen::Upper>().solve(b + noise);
}

Eigen::VectorXd sample_mvn_from_precision(const Eigen::MatrixXd& precision,
                                          const Eigen::VectorXd& v,
                                          const Eigen::VectorXd& noise) {
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success)
    fail("CholeskyFailure", "dense precision is not positive definite");
  Eigen::MatrixXd U = llt.matrixU();
  return sample_mvn_canonical(U, v, noise);
}

Eigen::VectorXd sample_mvn_canonical(const Eigen::SimplicialLLT<SpMat>& llt,
                                     const Eigen::VectorXd& v, const Eigen::VectorXd& noise) {
  if (llt.info() != Eigen::Success)
    fail("CholeskyFailure", "sparse precision is not positive definite");
  // Factorization is P Q P^T = L L^T; draw in permuted coordinates, then undo.
  Eigen::VectorXd w = llt.permutationP() * v;
  Eigen::VectorXd b = llt.matrixL().solve(w);
  Eigen::VectorXd z = llt.matrixU().solve(b + noise);
  return llt.permutationPinv() * z;
}

}  // namespace stfh
