#include "mlm/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mlm/mvncdf.hpp"
#include "mlm/rng.hpp"
#include "parallel.hpp"

namespace mlm {

void DetectorConfig::validate() const {
  if (m < 1) throw std::invalid_argument("config: m must be >= 1");
  if (instants.empty()) throw std::invalid_argument("config: no instants");
  for (size_t i = 1; i < instants.size(); ++i)
    if (instants[i] <= instants[i - 1])
      throw std::invalid_argument("config: instants must be strictly increasing");
}

double hoeffding_halfwidth(std::uint64_t units, double delta) {
  if (units == 0) return 1.0;
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(units)));
}

int CdfEstimate::find(const Eigen::VectorXd& point) const {
  for (size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].size() != point.size()) continue;
    bool same = true;
    for (long j = 0; j < point.size() && same; ++j) same = (grid[i][j] == point[j]);
    if (same) return static_cast<int>(i);
  }
  return -1;
}

double CdfEstimate::at(const Eigen::VectorXd& point) const {
  int idx = find(point);
  if (idx < 0) throw std::invalid_argument("CdfEstimate: grid point not evaluated");
  return mean[static_cast<size_t>(idx)];
}

CandidateSet::CandidateSet(int m_in, int ell_in, Constraint c)
    : m(m_in), ell(ell_in), constraint(std::move(c)), boundary(static_cast<size_t>(ell_in), 1) {
  if (m < 1) throw std::invalid_argument("candidates: m must be >= 1");
  if (ell < 0) throw std::invalid_argument("candidates: negative memory");
}

std::vector<Eigen::VectorXd> CandidateSet::enumerate() const {
  if (m > 8) throw std::invalid_argument("candidates: enumeration refused for m > 8");
  const int inner = 2 * m + 1;
  const int win = 2 * (m + ell) + 1;
  std::vector<Eigen::VectorXd> out;
  out.reserve(1ULL << inner);
  std::vector<std::int8_t> word(static_cast<size_t>(inner));
  for (std::uint64_t k = 0; k < (1ULL << inner); ++k) {
    for (int p = 0; p < inner; ++p)
      word[static_cast<size_t>(p)] = static_cast<std::int8_t>(((k >> p) & 1u) ? 1 : -1);
    if (!constraint.word_admissible(word)) continue;
    Eigen::VectorXd cand(win);
    for (int j = 0; j < ell; ++j) {
      cand[j] = boundary[static_cast<size_t>(j)];
      cand[win - ell + j] = boundary[static_cast<size_t>(j)];
    }
    for (int p = 0; p < inner; ++p) cand[ell + p] = word[static_cast<size_t>(p)];
    out.push_back(std::move(cand));
  }
  return out;
}

double delta(const Eigen::VectorXd& z, const Eigen::VectorXd& a, const Eigen::VectorXd& abar,
             const WindowMatrices& matrices) {
  if (z.size() != matrices.out_len() || a.size() != matrices.win_len() ||
      abar.size() != matrices.win_len())
    throw std::invalid_argument("delta: dimension mismatch");
  const Eigen::VectorXd v = z - matrices.t_ones;
  return (v - matrices.h * a).squaredNorm() - (v - matrices.h * abar).squaredNorm();
}

namespace {

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

// Candidate list with the per-candidate quantities the sweeps need.
struct Prepared {
  std::vector<Eigen::VectorXd> windows;
  Eigen::MatrixXd ha;        // H * a per column
  Eigen::VectorXd ha_norm2;  // |H a|^2
  Eigen::VectorXd t_bound;   // T applied to the boundary-extended window
  std::vector<char> center_pos;
};

Prepared prepare(const CandidateSet& set, const WindowMatrices& matrices) {
  Prepared p;
  p.windows = set.enumerate();
  if (p.windows.empty()) throw std::runtime_error("candidates: constraint admits no candidate");
  const long count = static_cast<long>(p.windows.size());
  p.ha.resize(matrices.out_len(), count);
  p.ha_norm2.resize(count);
  p.center_pos.resize(static_cast<size_t>(count));
  for (long k = 0; k < count; ++k) {
    p.ha.col(k) = matrices.h * p.windows[static_cast<size_t>(k)];
    p.ha_norm2[k] = p.ha.col(k).squaredNorm();
    p.center_pos[static_cast<size_t>(k)] = p.windows[static_cast<size_t>(k)][matrices.center()] > 0;
  }
  p.t_bound = matrices.t * p.windows[0];  // boundary part is common to all candidates
  return p;
}

}  // namespace

DetectionResult detect(const Eigen::VectorXd& z, const CandidateSet& candidates,
                       const WindowMatrices& matrices, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("detect: sigma2 must be positive");
  if (z.size() != matrices.out_len()) throw std::invalid_argument("detect: dimension mismatch");
  Prepared p = prepare(candidates, matrices);
  const Eigen::VectorXd v = z - p.t_bound;
  const double v2 = v.squaredNorm();
  const long count = static_cast<long>(p.windows.size());

  long best = -1;
  double best_dist = 0.0;
  for (long k = 0; k < count; ++k) {
    const double dist = v2 - 2.0 * v.dot(p.ha.col(k)) + p.ha_norm2[k];
    if (best < 0 || dist < best_dist ||
        (dist == best_dist && lex_less(p.windows[static_cast<size_t>(k)],
                                       p.windows[static_cast<size_t>(best)]))) {
      best = k;
      best_dist = dist;
    }
  }
  const bool best_center = p.center_pos[static_cast<size_t>(best)];
  double rival = std::numeric_limits<double>::infinity();
  for (long k = 0; k < count; ++k) {
    if (p.center_pos[static_cast<size_t>(k)] == best_center) continue;
    rival = std::min(rival, v2 - 2.0 * v.dot(p.ha.col(k)) + p.ha_norm2[k]);
  }
  if (!std::isfinite(rival))
    throw std::runtime_error("detect: no candidate disagrees at the center");

  DetectionResult out;
  out.window = p.windows[static_cast<size_t>(best)];
  out.decision = out.window[matrices.center()];
  out.reliability = std::max(0.0, (rival - best_dist) / (2.0 * sigma2));
  return out;
}

XY compute_xy(const Eigen::VectorXd& a_window, const Eigen::VectorXd& w_window,
              const CandidateSet& candidates, const WindowMatrices& matrices) {
  Prepared p = prepare(candidates, matrices);
  const Eigen::VectorXd z = transmit(a_window, w_window, matrices);
  const Eigen::VectorXd v = z - matrices.t_ones;
  const double dist_a = (v - matrices.h * a_window).squaredNorm();
  const double v2 = v.squaredNorm();
  const bool a_center = a_window[matrices.center()] > 0;

  double x = -std::numeric_limits<double>::infinity();
  double y = -std::numeric_limits<double>::infinity();
  for (long k = 0; k < static_cast<long>(p.windows.size()); ++k) {
    const double dist = v2 - 2.0 * v.dot(p.ha.col(k)) + p.ha_norm2[k];
    const double quarter = (dist_a - dist) / 4.0;
    if (p.center_pos[static_cast<size_t>(k)] == a_center)
      y = std::max(y, quarter);
    else
      x = std::max(x, quarter);
  }
  if (!std::isfinite(x) || !std::isfinite(y))
    throw std::runtime_error("compute_xy: candidate set admits no candidate on one side");
  return {x, y};
}

SimulationResult simulate_empirical_cdf(const DetectorConfig& config, const ChannelModel& channel,
                                        const NoiseModel& noise,
                                        const std::vector<Eigen::VectorXd>& xmy_grid,
                                        const std::vector<Eigen::VectorXd>& r_grid,
                                        const SimulationOptions& options) {
  config.validate();
  if (config.m > 8) throw std::invalid_argument("simulate: enumeration oracle limited to m <= 8");
  if (options.trials < 1) throw std::invalid_argument("simulate: trials must be >= 1");
  const int n = config.n();
  for (const auto& r : xmy_grid)
    if (r.size() != n) throw std::invalid_argument("simulate: grid point dimension mismatch");
  for (const auto& r : r_grid)
    if (r.size() != n) throw std::invalid_argument("simulate: grid point dimension mismatch");

  const WindowMatrices matrices = build_window_matrices(channel, config.m);
  const int ell = matrices.ell;
  const CandidateSet candidates(config.m, ell, config.constraint);
  const Prepared p = prepare(candidates, matrices);
  const long count = static_cast<long>(p.windows.size());
  const double sigma2 = noise.sigma2();

  // One contiguous noise segment covering every output window; per-instant
  // windows are slices, so overlaps are consistent across instants.
  const std::int64_t nlo = config.instants.front() - config.m;
  const std::int64_t nhi = config.instants.back() + config.m + ell;
  const long nlen = static_cast<long>(nhi - nlo + 1);
  std::vector<std::int64_t> nidx(static_cast<size_t>(nlen));
  for (long i = 0; i < nlen; ++i) nidx[static_cast<size_t>(i)] = nlo + i;
  const Eigen::MatrixXd ncov = noise.covariance(nidx);
  SymEig neig = sym_eig(ncov);
  if (neig.values.minCoeff() < -1e-10 * std::max(ncov.trace(), 1e-300))
    throw std::invalid_argument("simulate: noise covariance indefinite");
  Eigen::MatrixXd nfac = neig.vectors;
  for (long j = 0; j < nfac.cols(); ++j) nfac.col(j) *= std::sqrt(std::max(neig.values[j], 0.0));

  const std::uint64_t trials = options.trials;
  constexpr std::uint64_t kBlock = 1024;
  const std::uint64_t n_blocks = (trials + kBlock - 1) / kBlock;
  const size_t nx = xmy_grid.size(), nr = r_grid.size();
  std::vector<double> xmy_part(n_blocks * nx, 0.0);
  std::vector<double> r_part(n_blocks * nr, 0.0);
  std::vector<double> err_part(n_blocks, 0.0);

  internal::run_blocks(n_blocks, options.workers, [&](std::uint64_t block) {
    const std::uint64_t lo = block * kBlock;
    const std::uint64_t hi = std::min(trials, lo + kBlock);
    Eigen::VectorXd zvec(nlen), wglob(nlen);
    Eigen::VectorXd d(n), r(n);
    Eigen::VectorXd v(matrices.out_len());
    for (std::uint64_t trial = lo; trial < hi; ++trial) {
      RngStream rng(options.seed, trial);
      SymbolWindows sw =
          sample_symbol_windows(rng, config.instants, config.m, ell, config.constraint);
      for (long i = 0; i < nlen; ++i) zvec[i] = rng.normal();
      wglob.noalias() = nfac * zvec;

      bool all_err = true;
      for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd a_win = sw.window(i);
        const long off = static_cast<long>(config.instants[static_cast<size_t>(i)] - config.m - nlo);
        const Eigen::VectorXd w_win = wglob.segment(off, matrices.out_len());
        const Eigen::VectorXd z = (matrices.h + matrices.t) * a_win - w_win;
        v = z - matrices.t_ones;
        const double v2 = v.squaredNorm();
        const double dist_a = (v - matrices.h * a_win).squaredNorm();
        const bool a_center = a_win[matrices.center()] > 0;

        double x_val = -std::numeric_limits<double>::infinity();
        double y_val = x_val;
        double best = std::numeric_limits<double>::infinity();
        double best_same = best, best_diff = best;
        bool best_center = true;
        const Eigen::VectorXd hv = p.ha.transpose() * v;
        for (long k = 0; k < count; ++k) {
          const double dist = v2 - 2.0 * hv[k] + p.ha_norm2[k];
          const double quarter = (dist_a - dist) / 4.0;
          const bool cp = p.center_pos[static_cast<size_t>(k)];
          if (cp == a_center)
            y_val = std::max(y_val, quarter);
          else
            x_val = std::max(x_val, quarter);
          if (cp)
            best_same = std::min(best_same, dist);  // center +1 pool
          else
            best_diff = std::min(best_diff, dist);
          if (dist < best) {
            best = dist;
            best_center = cp;
          }
        }
        d[i] = x_val - y_val;
        const double rival = best_center ? best_diff : best_same;
        r[i] = std::max(0.0, (rival - best) / (2.0 * sigma2));
        all_err = all_err && (x_val >= y_val);
      }

      for (size_t g = 0; g < nx; ++g) {
        bool inside = true;
        for (int i = 0; i < n && inside; ++i) inside = (d[i] <= xmy_grid[g][i]);
        if (inside) xmy_part[block * nx + g] += 1.0;
      }
      for (size_t g = 0; g < nr; ++g) {
        bool inside = true;
        for (int i = 0; i < n && inside; ++i) inside = (r[i] <= r_grid[g][i]);
        if (inside) r_part[block * nr + g] += 1.0;
      }
      if (all_err) err_part[block] += 1.0;
    }
  });

  auto reduce = [&](const std::vector<double>& part, size_t width,
                    const std::vector<Eigen::VectorXd>& grid) {
    CdfEstimate est;
    est.grid = grid;
    est.mean.assign(width, 0.0);
    est.std_error.assign(width, 0.0);
    est.trials = trials;
    est.units = trials;
    est.confidence_delta = options.confidence_delta;
    est.ci_halfwidth = hoeffding_halfwidth(trials, options.confidence_delta);
    for (std::uint64_t b = 0; b < n_blocks; ++b)
      for (size_t g = 0; g < width; ++g) est.mean[g] += part[b * width + g];
    for (size_t g = 0; g < width; ++g) {
      const double m = est.mean[g] / static_cast<double>(trials);
      est.mean[g] = m;
      est.std_error[g] = std::sqrt(std::max(m * (1.0 - m), 0.0) / static_cast<double>(trials));
    }
    return est;
  };

  SimulationResult out;
  out.f_xmy = reduce(xmy_part, nx, xmy_grid);
  out.f_r = reduce(r_part, nr, r_grid);
  double errs = 0.0;
  for (std::uint64_t b = 0; b < n_blocks; ++b) errs += err_part[b];
  out.error_count = static_cast<std::uint64_t>(errs);
  out.joint_error_rate = errs / static_cast<double>(trials);
  return out;
}

}  // namespace mlm
