#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mlm/cdf_estimate.hpp"
#include "mlm/channel.hpp"

// Monte-Carlo engines evaluating the closed-form joint distribution of
// X - Y, plus the inclusion-exclusion layers on top of it: the joint
// reliability CDF, the joint symbol-error probability, and the
// neighbor-conditional distributions.

namespace mlm {

struct EstimatorOptions {
  // Total U draws. Rounded up to a whole number of realizations (groups).
  std::uint64_t trials = 100000;
  // U draws per sampled symbol realization; the Q/Lambda pair is reused
  // within a group. The Hoeffding half-width counts groups, which are the
  // independent units.
  int reuse = 64;
  double confidence_delta = 0.05;
  int workers = 1;
  std::uint64_t seed = 1;
};

// Joint CDF of (X_{t_i} - Y_{t_i}) on the given grid; grid points may contain
// +inf coordinates (subset marginals), all evaluated on one trial stream.
CdfEstimate estimate_f_xmy(const DetectorConfig& config, const ChannelModel& channel,
                           const NoiseModel& noise, const std::vector<Eigen::VectorXd>& grid,
                           const EstimatorOptions& options);

// Same, with an explicitly supplied window covariance K_W (size n(2m+ell+1));
// covers non-stationary noise.
CdfEstimate estimate_f_xmy(const DetectorConfig& config, const ChannelModel& channel,
                           const Eigen::MatrixXd& k_w, const std::vector<Eigen::VectorXd>& grid,
                           const EstimatorOptions& options);

struct ProbEstimate {
  double p = 0.0;
  double ci = 0.0;  // conservative: sum of the component half-widths
};

// Grid points required by joint_error_prob: 0 on each nonempty instant
// subset, +inf elsewhere.
std::vector<Eigen::VectorXd> error_pattern_points(int n);

// P(all decisions in error) = 1 + sum_j sum_subsets (-1)^j F_subset(0),
// clipped to [0,1]. Throws if a required subset evaluation is missing.
ProbEstimate joint_error_prob(const CdfEstimate& f_xmy_at_zero);

// Grid points required by reliability_cdf: all 2^n sign patterns of
// sigma^2/2 * r for each requested r.
std::vector<Eigen::VectorXd> reliability_pattern_points(const std::vector<Eigen::VectorXd>& r_grid,
                                                        double sigma2);

// F_R(r) by inclusion-exclusion over sign patterns, clipped to [0,1].
CdfEstimate reliability_cdf(const CdfEstimate& f_xmy, double sigma2,
                            const std::vector<Eigen::VectorXd>& r_grid);

enum class ConditionalKind { neighbors_correct, neighbors_wrong };

// Points over the instant triple (t-1, t, t+1) required by conditional_cdf.
std::vector<Eigen::VectorXd> conditional_pattern_points(const std::vector<double>& r_grid);

struct ConditionalCdf {
  CdfEstimate cdf;                 // grid: the scalar r values
  double conditioning_prob = 0.0;  // estimated probability of the condition
  double conditioning_ci = 0.0;
  bool usable = false;  // false when conditioning_prob < 10 * ci
};

// Distribution of X_t - Y_t conditioned on both neighboring decisions being
// correct (neighbors_correct) or wrong (neighbors_wrong), from a shared
// estimate over the triple (t-1, t, t+1).
ConditionalCdf conditional_cdf(ConditionalKind kind, const CdfEstimate& est3,
                               const std::vector<double>& r_grid);

}  // namespace mlm
