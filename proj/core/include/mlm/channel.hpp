#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "mlm/constraint.hpp"
#include "mlm/rng.hpp"

// Binary-input ISI channel: Z_t = sum_{i=0..ell} h_i A_{t-i} - W_t with
// zero-mean jointly Gaussian noise W.
//
// Window convention used everywhere in this library: symbol-window positions
// -(m+ell)..(m+ell) map to array indices 0..2(m+ell) (center at m+ell);
// output-window rows tau = -m..m+ell map to row indices 0..2m+ell.

namespace mlm {

struct ChannelModel {
  Eigen::VectorXd taps;  // h_0..h_ell

  explicit ChannelModel(std::vector<double> coeffs);
  int memory() const { return static_cast<int>(taps.size()) - 1; }
  double energy() const { return taps.squaredNorm(); }
};

struct WindowMatrices {
  int m = 0;
  int ell = 0;
  Eigen::MatrixXd h;       // (2m+ell+1) x (2(m+ell)+1); zero boundary columns
  Eigen::MatrixXd t;       // same size; only the T1/T2 corner blocks nonzero
  Eigen::VectorXd t_ones;  // T * 1, cached

  int out_len() const { return 2 * m + ell + 1; }
  int win_len() const { return 2 * (m + ell) + 1; }
  int center() const { return m + ell; }

  // Column of H at symbol offset i, |i| <= m (the h_i vector).
  Eigen::VectorXd tap_column(int i) const;
};

WindowMatrices build_window_matrices(const ChannelModel& channel, int m);

class NoiseModel {
 public:
  enum class Kind { iid, lag1, custom };

  static NoiseModel iid(double sigma2);
  static NoiseModel lag1(double sigma2, double rho);
  static NoiseModel custom(std::vector<double> autocov);

  Kind kind() const { return kind_; }
  double sigma2() const { return autocov_[0]; }
  double autocov(std::int64_t lag) const;

  // Covariance of (W_{i})_{i in indices} for arbitrary absolute time indices.
  Eigen::MatrixXd covariance(const std::vector<std::int64_t>& indices) const;

 private:
  NoiseModel(Kind kind, std::vector<double> autocov);
  Kind kind_;
  std::vector<double> autocov_;
};

// Block covariance K_W of the stacked noise windows at the given instants.
// Rejects matrices with an eigenvalue below -1e-10 * trace.
Eigen::MatrixXd window_covariance(const NoiseModel& noise, const std::vector<std::int64_t>& instants,
                                  int m, int ell);

// One +/-1 segment covering the union of the symbol windows; the per-instant
// windows are slices of it, so overlapping windows agree by construction.
struct SymbolWindows {
  std::int64_t lo = 0;
  std::vector<std::int8_t> segment;
  std::vector<std::int64_t> instants;
  int m = 0;
  int ell = 0;

  std::int8_t at(std::int64_t t) const { return segment[static_cast<size_t>(t - lo)]; }
  int n() const { return static_cast<int>(instants.size()); }
  std::span<const std::int8_t> window_span(int i) const;
  Eigen::VectorXd window(int i) const;
};

SymbolWindows sample_symbol_windows(RngStream& rng, const std::vector<std::int64_t>& instants,
                                    int m, int ell, const Constraint& constraint);

// Z = (H+T) a - w  (noise subtracted).
Eigen::VectorXd transmit(const Eigen::VectorXd& a_window, const Eigen::VectorXd& noise_window,
                         const WindowMatrices& matrices);

}  // namespace mlm
