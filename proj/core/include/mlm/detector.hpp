#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mlm/cdf_estimate.hpp"
#include "mlm/channel.hpp"

// Direct implementation of the m-truncated max-log-map detector by candidate
// enumeration: hard decisions, reliabilities, and the X/Y decomposition. This
// is the brute-force oracle the closed-form estimator is checked against.

namespace mlm {

struct CandidateSet {
  int m = 0;
  int ell = 0;
  Constraint constraint;
  // Boundary word pinned on both sides of every candidate (length ell).
  std::vector<std::int8_t> boundary;

  CandidateSet(int m, int ell, Constraint c = Constraint::none());

  std::uint64_t unconstrained_size() const { return 1ULL << (2 * m + 1); }

  // All candidate windows (admissible inner words only); refuses m > 8.
  std::vector<Eigen::VectorXd> enumerate() const;
};

struct DetectionResult {
  Eigen::VectorXd window;   // argmin candidate
  double decision = 1.0;    // center entry of window
  double reliability = 0.0; // >= 0
};

// Difference of squared distances: |Z - T1 - Ha|^2 - |Z - T1 - H abar|^2.
double delta(const Eigen::VectorXd& z, const Eigen::VectorXd& a, const Eigen::VectorXd& abar,
             const WindowMatrices& matrices);

DetectionResult detect(const Eigen::VectorXd& z, const CandidateSet& candidates,
                       const WindowMatrices& matrices, double sigma2);

struct XY {
  double x = 0.0;
  double y = 0.0;
};

// X = max over candidates disagreeing at the center of Delta(A,a)/4,
// Y = the agreeing-center analogue (>= 0 when the transmitted word is
// admissible).
XY compute_xy(const Eigen::VectorXd& a_window, const Eigen::VectorXd& w_window,
              const CandidateSet& candidates, const WindowMatrices& matrices);

struct SimulationOptions {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  int workers = 1;
  double confidence_delta = 0.05;
};

struct SimulationResult {
  CdfEstimate f_xmy;        // joint CDF of (X_{t_i} - Y_{t_i})
  CdfEstimate f_r;          // joint CDF of the reliabilities R_{t_i}
  double joint_error_rate = 0.0;  // all instants in error
  std::uint64_t error_count = 0;
};

// Monte-Carlo estimate of the joint CDFs by running the detector directly.
// Enumeration oracle: rejects m > 8.
SimulationResult simulate_empirical_cdf(const DetectorConfig& config, const ChannelModel& channel,
                                        const NoiseModel& noise,
                                        const std::vector<Eigen::VectorXd>& xmy_grid,
                                        const std::vector<Eigen::VectorXd>& r_grid,
                                        const SimulationOptions& options);

}  // namespace mlm
