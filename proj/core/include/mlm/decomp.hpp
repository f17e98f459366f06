#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mlm/channel.hpp"
#include "mlm/dp.hpp"
#include "mlm/selectors.hpp"

// Per-realization linear algebra of the closed form: the (Q, Lambda) pair
// that simultaneously whitens I_n (x) SS^T and diagonalizes the projected
// noise covariance, and the derived F, theta, K_V quantities.

namespace mlm {

struct QLambda {
  Eigen::MatrixXd q;            // 2mn x 2mn
  Eigen::VectorXd lambda;       // diagonal, descending, clamped at 0
  Eigen::VectorXd lambda_pinv;  // reciprocals of the entries above threshold
  int rank = 0;                 // numerical rank of G^T K_W G
};

QLambda compute_q_lambda(const std::vector<Eigen::MatrixXd>& g_blocks, const Eigen::MatrixXd& k_w,
                         const SelectorMatrices& selectors);
QLambda compute_q_lambda(const SymbolWindows& windows, const Eigen::MatrixXd& k_w,
                         const SelectorMatrices& selectors, const WindowMatrices& matrices);

// Everything that depends on the sampled symbols but not on the Gaussian draw
// U. One instance is shared across many U draws of the same realization.
struct RealizationTerms {
  int n = 0;
  int m = 0;
  QLambda ql;
  Eigen::MatrixXd f;                      // n x 2mn
  Eigen::VectorXd theta;                  // n
  Eigen::MatrixXd k_v;                    // n x n symmetric
  std::vector<Eigen::MatrixXd> q_lambda;  // per instant: Q_i * diag(lambda), 2m x 2mn
  std::vector<Eigen::VectorXd> mu_lin;    // per instant, length 2m
  std::vector<Eigen::VectorXd> nu_lin;
  std::vector<DpInstance> dp;             // per instant, C left zero
  Constraint constraint;

  // Brute-force tables for constraints the DP cannot express (custom):
  // full mu/nu vectors and admissible selector indices per instant.
  bool brute_force = false;
  Eigen::MatrixXd s_dense;                         // 2m x 2^{2m}
  std::vector<Eigen::VectorXd> mu_full;            // per instant, length 2^{2m}
  std::vector<Eigen::VectorXd> nu_full;
  std::vector<std::vector<std::uint32_t>> adm_y;   // candidate admissible, center kept
  std::vector<std::vector<std::uint32_t>> adm_x;   // candidate admissible, center flipped
};

// When `precomputed` is given it is used as the (Q, Lambda) pair (Remark-5
// reuse across draws); otherwise the pair is computed here.
RealizationTerms compute_realization_terms(const SymbolWindows& windows, const Eigen::MatrixXd& k_w,
                                           const SelectorMatrices& selectors,
                                           const WindowMatrices& matrices,
                                           const Constraint& constraint,
                                           const QLambda* precomputed = nullptr);

struct TrialTerms {
  Eigen::VectorXd delta;  // n
  Eigen::VectorXd eta;    // n
  Eigen::MatrixXd k_v;    // n x n
};

// Per-draw scratch so the hot loop does not allocate.
struct TrialWorkspace {
  std::vector<DpInstance> dp;
  Eigen::VectorXd delta;
  Eigen::VectorXd eta;
  Eigen::VectorXd base;  // Q_i Lambda u (2m)
  Eigen::VectorXd st_c;  // brute-force path scratch (2^{2m})

  void prepare(const RealizationTerms& rt);
};

// delta_i = max(S^T Q_i Lambda u + mu) - max(S^T Q_i Lambda u + nu), solved by
// the dp module (or the constrained variant / brute force); eta = theta + F u.
void compute_trial_terms(const RealizationTerms& rt, const Eigen::VectorXd& u, TrialWorkspace& ws);

// One-shot variant matching the per-operation contract.
TrialTerms compute_trial_terms(const QLambda& ql, const SymbolWindows& windows,
                               const Eigen::MatrixXd& k_w, const SelectorMatrices& selectors,
                               const WindowMatrices& matrices, const Eigen::VectorXd& u,
                               const Constraint& constraint);

}  // namespace mlm
