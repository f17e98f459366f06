#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

// Zero-mean multivariate Gaussian distribution functions Phi_K(x), including
// rank-deficient covariance matrices, plus the shared symmetric-eigensolver
// and scalar normal utilities used across the library.

namespace mlm {

double norm_pdf(double x);
double norm_cdf(double x);

// Inverse of norm_cdf (Wichura's PPND16). Returns +/-inf at p = 1/0.
double norm_ppf(double p);

// P(X <= h, Y <= k) for standard bivariate normal with correlation rho,
// |rho| <= 1. Fixed Gauss-Legendre rule, absolute error below 1e-13.
double bvn_cdf(double h, double k, double rho);

struct SymEig {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns match values; orthonormal
};

// Eigendecomposition of a symmetric matrix. Rejects matrices that are not
// symmetric within 1e-10 relative; throws on solver non-convergence.
SymEig sym_eig(const Eigen::MatrixXd& m);

struct GaussianCdfProblem {
  Eigen::MatrixXd k;   // n x n symmetric PSD, possibly rank deficient
  Eigen::VectorXd x;   // evaluation point; +inf entries drop coordinates
  double tol = 1e-4;   // requested absolute accuracy
};

struct MvnResult {
  double p = 0.0;              // in [0, 1]
  double error_estimate = 0.0; // absolute
};

// Evaluates many points against one covariance matrix. The factorization and
// the rank analysis happen once in the constructor.
class CdfEvaluator {
 public:
  CdfEvaluator() = default;
  explicit CdfEvaluator(const Eigen::MatrixXd& k, double tol = 1e-4);

  MvnResult evaluate(const Eigen::VectorXd& x) const;
  int rank() const { return rank_; }

 private:
  enum class Path { empty, deterministic, diagonal, rank_one, bivariate, qmc_full, qmc_degenerate };
  MvnResult evaluate_reduced(const Eigen::VectorXd& x) const;

  Path path_ = Path::empty;
  int n_ = 0;
  int rank_ = 0;
  double tol_ = 1e-4;
  Eigen::MatrixXd k_;            // retained for +inf coordinate reduction
  Eigen::VectorXd diag_sd_;      // diagonal path: per-coordinate std dev
  Eigen::MatrixXd l_;            // n x rank factor, K = L L^T
  Eigen::MatrixXd chol_;         // qmc_full path: reordered Cholesky factor
  std::vector<int> order_;       // qmc_full path: coordinate reordering
  double rho_ = 0.0;             // bivariate path
  double sd0_ = 0.0, sd1_ = 0.0; // bivariate path
};

MvnResult mvn_cdf(const GaussianCdfProblem& problem);
MvnResult mvn_cdf(const Eigen::MatrixXd& k, const Eigen::VectorXd& x, double tol = 1e-4);

}  // namespace mlm
