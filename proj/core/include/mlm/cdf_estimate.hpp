#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mlm/constraint.hpp"

namespace mlm {

struct DetectorConfig {
  int m = 2;
  std::vector<std::int64_t> instants{0};
  Constraint constraint;

  int n() const { return static_cast<int>(instants.size()); }
  void validate() const;
};

double hoeffding_halfwidth(std::uint64_t units, double delta);

// A CDF estimate on a grid of r-vectors. Grid entries may contain +inf
// coordinates (subset marginals). `units` is the number of independent
// Monte-Carlo units backing the Hoeffding half-width; it equals `trials`
// unless trials share symbol realizations.
struct CdfEstimate {
  std::vector<Eigen::VectorXd> grid;
  std::vector<double> mean;
  std::vector<double> std_error;
  std::uint64_t trials = 0;
  std::uint64_t units = 0;
  double confidence_delta = 0.05;
  double ci_halfwidth = 0.0;

  int find(const Eigen::VectorXd& point) const;
  double at(const Eigen::VectorXd& point) const;  // throws if the point is absent
};

}  // namespace mlm
