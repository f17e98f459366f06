#include "mlm/selectors.hpp"

#include <cmath>
#include <stdexcept>

namespace mlm {

SelectorMatrices build_selectors(int m, int ell) {
  if (m < 1) throw std::invalid_argument("build_selectors: m must be >= 1");
  if (ell < 0) throw std::invalid_argument("build_selectors: negative memory");
  SelectorMatrices sel;
  sel.m = m;
  sel.ell = ell;

  const int win = 2 * (m + ell) + 1;
  const int d = 2 * m;
  sel.e = Eigen::MatrixXd::Zero(win, d);
  for (int p = 0; p < d; ++p) sel.e(sel.offset_of(p) + m + ell, p) = 1.0;

  sel.sst = std::pow(2.0, 2 * (m - 1)) *
            (Eigen::MatrixXd::Identity(d, d) + Eigen::MatrixXd::Ones(d, d));

  // Closed-form eigenpairs of SS^T: 2m-1 eigenvectors orthogonal to 1 with
  // eigenvalue 2^{2(m-1)}, and 1/sqrt(2m) with eigenvalue 2^{2(m-1)}(2m+1).
  // alpha0 = V D^{-1/2} whitens SS^T.
  const double base = std::pow(2.0, 2 * (m - 1));
  sel.alpha0 = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) {
    const double norm = std::sqrt(static_cast<double>(i) + static_cast<double>(i) * i);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < i; ++j) v[j] = 1.0 / norm;
    v[i] = -static_cast<double>(i) / norm;
    sel.alpha0.col(i - 1) = v / std::sqrt(base);
  }
  sel.alpha0.col(d - 1) =
      Eigen::VectorXd::Constant(d, 1.0 / std::sqrt(static_cast<double>(d))) /
      std::sqrt(base * (2 * m + 1));
  return sel;
}

Eigen::MatrixXd SelectorMatrices::dense_s() const {
  if (m > 8) throw std::invalid_argument("dense_s: refusing to materialize S for m > 8");
  const int d = 2 * m;
  const std::uint64_t count = 1ULL << d;
  Eigen::MatrixXd s(d, static_cast<long>(count));
  for (std::uint64_t k = 0; k < count; ++k)
    for (int p = 0; p < d; ++p) s(p, static_cast<long>(k)) = static_cast<double>((k >> p) & 1u);
  return s;
}

void SelectorMatrices::selector_column(std::uint32_t k, Eigen::VectorXd& out) const {
  const int d = 2 * m;
  out.resize(d);
  for (int p = 0; p < d; ++p) out[p] = static_cast<double>((k >> p) & 1u);
}

Eigen::MatrixXd build_g(const Eigen::VectorXd& a_window, const WindowMatrices& matrices,
                        const SelectorMatrices& selectors) {
  if (a_window.size() != matrices.win_len())
    throw std::invalid_argument("build_g: window dimension mismatch");
  return matrices.h * a_window.asDiagonal() * selectors.e;
}

Eigen::VectorXd mu_linear(const Eigen::VectorXd& a_window, const Eigen::MatrixXd& g,
                          const WindowMatrices& matrices) {
  const Eigen::VectorXd t_gap = matrices.t_ones - matrices.t * a_window;  // T(1 - a)
  return g.transpose() * t_gap;
}

Eigen::VectorXd nu_linear(const Eigen::VectorXd& a_window, const Eigen::MatrixXd& g,
                          const WindowMatrices& matrices) {
  const double a0 = a_window[matrices.center()];
  const Eigen::VectorXd h0 = matrices.tap_column(0);
  return mu_linear(a_window, g, matrices) - 2.0 * a0 * (g.transpose() * h0);
}

MuNu compute_mu_nu(const Eigen::VectorXd& a_window, const WindowMatrices& matrices,
                   const SelectorMatrices& selectors) {
  if (selectors.m > 8) throw std::invalid_argument("compute_mu_nu: m > 8 enumeration refused");
  const Eigen::MatrixXd g = build_g(a_window, matrices, selectors);
  const Eigen::MatrixXd s = selectors.dense_s();
  const Eigen::MatrixXd gs = g * s;  // (2m+ell+1) x 2^{2m}
  const Eigen::VectorXd lin_mu = mu_linear(a_window, g, matrices);
  const Eigen::VectorXd lin_nu = nu_linear(a_window, g, matrices);

  MuNu out;
  out.mu = s.transpose() * lin_mu - gs.colwise().squaredNorm().transpose();
  out.nu = s.transpose() * lin_nu - gs.colwise().squaredNorm().transpose();
  return out;
}

Eigen::VectorXd selector_to_candidate(const Eigen::VectorXd& a_window, const Eigen::VectorXd& s,
                                      bool flip_center, const SelectorMatrices& selectors) {
  if (s.size() != 2 * selectors.m) throw std::invalid_argument("selector_to_candidate: bad selector size");
  Eigen::VectorXd out = a_window;
  for (int p = 0; p < 2 * selectors.m; ++p)
    if (s[p] != 0.0) out[selectors.offset_of(p) + selectors.m + selectors.ell] *= -1.0;
  if (flip_center) out[selectors.m + selectors.ell] *= -1.0;
  return out;
}

}  // namespace mlm
