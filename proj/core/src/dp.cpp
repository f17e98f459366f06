#include "mlm/dp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace mlm {

namespace {

inline double sent_add(double v, double x) { return v == kDpNegInf ? kDpNegInf : v + x; }

constexpr int kMaxStackStates = 256;

}  // namespace

DpInstance make_dp_instance(const Eigen::VectorXd& a_window, const Eigen::VectorXd& taps, int m) {
  const int ell = static_cast<int>(taps.size()) - 1;
  if (m < 1) throw std::invalid_argument("dp: m must be >= 1");
  if (a_window.size() != 2 * (m + ell) + 1) throw std::invalid_argument("dp: window size mismatch");

  DpInstance inst;
  inst.m = m;
  inst.ell = ell;
  inst.c = Eigen::VectorXd::Zero(2 * m);
  inst.coef.resize(2 * m + ell + 1, ell + 1);
  inst.window.resize(static_cast<size_t>(a_window.size()));
  for (long i = 0; i < a_window.size(); ++i)
    inst.window[static_cast<size_t>(i)] = static_cast<std::int8_t>(a_window[i] >= 0 ? 1 : -1);
  for (int r = 0; r <= 2 * m + ell; ++r) {
    const int tau = r - m;
    for (int j = 0; j <= ell; ++j) inst.coef(r, j) = taps[j] * a_window[tau - j + m + ell];
  }
  return inst;
}

namespace {

// C with the Procedure-2 conventions folded in.
inline double c_at(const DpInstance& inst, int kappa) {
  if (kappa == 0) return kDpNegInf;
  if (kappa < -inst.m || kappa > inst.m) return 0.0;
  return inst.c[kappa < 0 ? kappa + inst.m : kappa + inst.m - 1];
}

template <bool kTrackArg>
DpArgResult dp_run(const DpInstance& inst) {
  const int m = inst.m, ell = inst.ell;
  const int nstates = 1 << ell;
  if (!inst.c.allFinite()) throw std::invalid_argument("dp_max: non-finite C entries");

  std::array<double, kMaxStackStates> buf_a{}, buf_b{};
  std::vector<double> heap_a, heap_b;
  double *prev = buf_a.data(), *next = buf_b.data();
  if (nstates > kMaxStackStates) {
    heap_a.resize(static_cast<size_t>(nstates));
    heap_b.resize(static_cast<size_t>(nstates));
    prev = heap_a.data();
    next = heap_b.data();
  }
  std::fill(prev, prev + nstates, kDpNegInf);
  prev[0] = 0.0;

  // choice(step, state): branch bit b = s_{tau-ell} taken into (tau, state).
  std::vector<std::uint8_t> choices;
  if constexpr (kTrackArg) choices.assign(static_cast<size_t>((2 * m + ell + 1)) * nstates, 0);

  for (int tau = -m; tau <= m + ell; ++tau) {
    const int r = tau + m;
    const double c_leave = c_at(inst, tau - ell);
    const double h_leave = inst.coef(r, ell);
    for (int sbar = 0; sbar < nstates; ++sbar) {
      double alpha = 0.0;
      for (int j = 0; j < ell; ++j)
        if ((sbar >> j) & 1) alpha += inst.coef(r, j);
      int pred0 = sbar, pred1 = sbar;
      if (ell > 0) {
        pred0 = sbar >> 1;
        pred1 = (sbar >> 1) | (1 << (ell - 1));
      }
      const double v0 = sent_add(prev[pred0], -alpha * alpha);
      const double gain1 = h_leave + alpha;
      double v1 = c_leave == kDpNegInf ? kDpNegInf
                                       : sent_add(prev[pred1], c_leave - gain1 * gain1);
      // Ties break toward the b = 0 branch.
      if (v1 > v0) {
        next[sbar] = v1;
        if constexpr (kTrackArg) choices[static_cast<size_t>(r) * nstates + sbar] = 1;
      } else {
        next[sbar] = v0;
        if constexpr (kTrackArg) choices[static_cast<size_t>(r) * nstates + sbar] = 0;
      }
    }
    std::swap(prev, next);
  }

  DpArgResult out;
  out.value = prev[0];
  if constexpr (kTrackArg) {
    out.arg.assign(static_cast<size_t>(2 * m + 1), 0);
    int state = 0;
    for (int tau = m + ell; tau >= -m; --tau) {
      const int r = tau + m;
      const std::uint8_t b = choices[static_cast<size_t>(r) * nstates + state];
      const int kappa = tau - ell;
      if (kappa >= -m && kappa <= m) out.arg[static_cast<size_t>(kappa + m)] = b;
      if (ell > 0) state = (state >> 1) | (static_cast<int>(b) << (ell - 1));
    }
  }
  return out;
}

}  // namespace

double dp_max(const DpInstance& inst) { return dp_run<false>(inst).value; }

DpArgResult dp_max_arg(const DpInstance& inst) { return dp_run<true>(inst); }

double dp_max_constrained(const DpInstance& inst, const LocalPredicate& admissible,
                          bool flip_center) {
  const int m = inst.m, ell = inst.ell;
  if (!inst.c.allFinite()) throw std::invalid_argument("dp_max_constrained: non-finite C entries");
  // State: last q decided flip bits; q covers the band and the 2-symbol
  // look-back of the predicate.
  const int q = std::max(ell, 2);
  const int nstates = 1 << q;

  auto window_at = [&](std::int64_t pos) -> std::int8_t {
    const std::int64_t idx = pos + m + ell;
    if (idx < 0 || idx >= static_cast<std::int64_t>(inst.window.size())) return 0;
    return inst.window[static_cast<size_t>(idx)];
  };
  // Selector value of flip bit f at position pos (center is never a selector).
  auto sel_bit = [&](int f, int pos) -> int {
    if (pos == 0 || pos < -m || pos > m) return 0;
    return f;
  };
  auto flip_at = [&](int f, int pos) -> std::int8_t {
    std::int8_t a = window_at(pos);
    return f ? static_cast<std::int8_t>(-a) : a;
  };

  std::array<double, kMaxStackStates> buf_a{}, buf_b{};
  std::vector<double> heap_a, heap_b;
  double *prev = buf_a.data(), *next = buf_b.data();
  if (nstates > kMaxStackStates) {
    heap_a.resize(static_cast<size_t>(nstates));
    heap_b.resize(static_cast<size_t>(nstates));
    prev = heap_a.data();
    next = heap_b.data();
  }
  std::fill(prev, prev + nstates, kDpNegInf);
  prev[0] = 0.0;  // flips before -m are all 0

  for (int kappa = -m; kappa <= m + ell; ++kappa) {
    const int r = kappa + m;
    std::fill(next, next + nstates, kDpNegInf);
    const bool f_free = (kappa != 0) && (kappa <= m);
    const int f_lo = f_free ? 0 : (kappa == 0 && flip_center ? 1 : 0);
    const int f_hi = f_free ? 1 : f_lo;
    for (int state = 0; state < nstates; ++state) {
      const double base = prev[state];
      if (base == kDpNegInf) continue;
      for (int f = f_lo; f <= f_hi; ++f) {
        // Admissibility of the candidate word, checked over the inner window.
        if (kappa <= m) {
          const int fm1 = (state >> 0) & 1;
          const int fm2 = (state >> 1) & 1;
          const std::int8_t c2 = flip_at((kappa - 2 >= -m && kappa - 2 != 0) ? fm2
                                         : (kappa - 2 == 0 && flip_center ? 1 : 0),
                                         kappa - 2);
          const std::int8_t c1 = flip_at((kappa - 1 >= -m && kappa - 1 != 0) ? fm1
                                         : (kappa - 1 == 0 && flip_center ? 1 : 0),
                                         kappa - 1);
          const std::int8_t c0 = flip_at(f, kappa);
          if (!admissible(c2, c1, c0, kappa)) continue;
        }
        // Row tau = kappa of the quadratic plus the linear C term.
        double row = inst.coef(r, 0) * sel_bit(f, kappa);
        for (int j = 1; j <= ell; ++j) {
          const int pos = kappa - j;
          const int fj = (pos >= -m) ? ((state >> (j - 1)) & 1) : 0;
          row += inst.coef(r, j) * sel_bit(fj, pos);
        }
        double value = base - row * row;
        if (f_free && f) value += c_at(inst, kappa);
        const int nstate = ((state << 1) | f) & (nstates - 1);
        if (value > next[nstate]) next[nstate] = value;
      }
    }
    std::swap(prev, next);
  }
  return *std::max_element(prev, prev + nstates);
}

double dp_max_constrained(const DpInstance& inst, const Constraint& constraint, bool flip_center) {
  switch (constraint.kind) {
    case Constraint::Kind::none:
      return dp_max_constrained(
          inst, [](std::int8_t, std::int8_t, std::int8_t, int) { return true; }, flip_center);
    case Constraint::Kind::rll_d1: {
      const int m = inst.m;
      return dp_max_constrained(
          inst,
          [m](std::int8_t c2, std::int8_t c1, std::int8_t c0, int pos) {
            if (pos < -m + 2) return true;  // interior of the inner word only
            return !(c2 != c1 && c1 != c0);
          },
          flip_center);
    }
    case Constraint::Kind::custom:
      throw std::invalid_argument(
          "dp_max_constrained: custom constraint is not locally decomposable; use the "
          "brute-force candidate enumeration");
  }
  throw std::logic_error("dp_max_constrained: unreachable");
}

}  // namespace mlm
