#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "mlm/channel.hpp"
#include "mlm/constraint.hpp"

// Dynamic program for max over binary selectors s of s^T C - |G(a) s|^2,
// exploiting the (ell+1)-banded structure of G(a). Conventions: C_0 = -inf
// (the center is never a free selector bit) and C_j = 0 for |j| > m.

namespace mlm {

// Dedicated minus-infinity sentinel with absorbing addition; never a
// floating-point infinity, so no NaN can arise from inf - inf.
inline constexpr double kDpNegInf = std::numeric_limits<double>::lowest();

struct DpInstance {
  int m = 0;
  int ell = 0;
  // c in selector coordinate order [-m..-1, 1..m].
  Eigen::VectorXd c;
  // coef(r, j) = h_j * a_{tau - j} with tau = r - m; rows tau = -m..m+ell.
  Eigen::MatrixXd coef;
  // The +/-1 symbol window (size 2(m+ell)+1); used by the constrained variant.
  std::vector<std::int8_t> window;
};

DpInstance make_dp_instance(const Eigen::VectorXd& a_window, const Eigen::VectorXd& taps, int m);

double dp_max(const DpInstance& instance);

struct DpArgResult {
  double value = 0.0;
  // Selector bits at offsets -m..m (index kappa + m); center always 0.
  std::vector<std::uint8_t> arg;
};
DpArgResult dp_max_arg(const DpInstance& instance);

// Local admissibility over flipped-candidate symbols, two symbols of
// look-back: called as ok(c_{pos-2}, c_{pos-1}, c_pos, pos) for pos = -m..m.
// Symbols at positions outside the window are passed as 0.
using LocalPredicate = std::function<bool(std::int8_t, std::int8_t, std::int8_t, int)>;

// Max restricted to selectors whose mapped candidate (selector_to_candidate
// with the given center flip) is admissible. Returns kDpNegInf if no selector
// is admissible.
double dp_max_constrained(const DpInstance& instance, const LocalPredicate& admissible,
                          bool flip_center);

// Constraint-driven variant; throws for custom constraints, which are not
// locally decomposable here and require the brute-force path.
double dp_max_constrained(const DpInstance& instance, const Constraint& constraint,
                          bool flip_center);

}  // namespace mlm
