#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "mlm/channel.hpp"

// Static combinatorial objects behind the closed-form reliability analysis:
// the offset selector matrix E, the binary enumeration S with its analytic
// Gram matrix SS^T, the per-window matrix G(a) = H diag(a) E, and the
// selector <-> candidate correspondence.

namespace mlm {

// Selector coordinates are ordered [-m..-1, 1..m]; entry p corresponds to
// symbol offset (p < m ? p - m : p - m + 1). Column s_k of S is the 2m-bit
// binary expansion of k with offset -m as the least significant bit.
struct SelectorMatrices {
  int m = 0;
  int ell = 0;
  Eigen::MatrixXd e;       // (2(m+ell)+1) x 2m
  Eigen::MatrixXd sst;     // 2m x 2m, equals 2^{2(m-1)} (I + 11^T)
  Eigen::MatrixXd alpha0;  // 2m x 2m whitener: alpha0^T SST alpha0 = I

  int offset_of(int p) const { return p < m ? p - m : p - m + 1; }
  int coord_of(int offset) const { return offset < 0 ? offset + m : offset + m - 1; }

  // Dense S (2m x 2^{2m}); materialized only for m <= 8.
  Eigen::MatrixXd dense_s() const;
  // Column s_k without materializing S.
  void selector_column(std::uint32_t k, Eigen::VectorXd& out) const;
};

SelectorMatrices build_selectors(int m, int ell);

// G(a) = H diag(a) E; (ell+1)-banded.
Eigen::MatrixXd build_g(const Eigen::VectorXd& a_window, const WindowMatrices& matrices,
                        const SelectorMatrices& selectors);

struct MuNu {
  Eigen::VectorXd mu;  // length 2^{2m}
  Eigen::VectorXd nu;
};

// mu_k = (G s_k)^T T(1-a) - |G s_k|^2,  nu_k = mu_k - 2 a_0 h_0^T G s_k.
// Materializes all 2^{2m} entries; guarded to m <= 8 (enumeration oracle).
MuNu compute_mu_nu(const Eigen::VectorXd& a_window, const WindowMatrices& matrices,
                   const SelectorMatrices& selectors);

// Linear parts of mu/nu as functions of the selector: mu_k = s_k . mu_lin - |G s_k|^2.
Eigen::VectorXd mu_linear(const Eigen::VectorXd& a_window, const Eigen::MatrixXd& g,
                          const WindowMatrices& matrices);
Eigen::VectorXd nu_linear(const Eigen::VectorXd& a_window, const Eigen::MatrixXd& g,
                          const WindowMatrices& matrices);

// The window with signs flipped at every position selected by E s, and at the
// center iff flip_center. For a in M (all-ones boundary) this ranges over M.
Eigen::VectorXd selector_to_candidate(const Eigen::VectorXd& a_window, const Eigen::VectorXd& s,
                                      bool flip_center, const SelectorMatrices& selectors);

}  // namespace mlm
