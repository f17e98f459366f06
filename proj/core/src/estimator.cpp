#include "mlm/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mlm/decomp.hpp"
#include "mlm/detector.hpp"
#include "mlm/mvncdf.hpp"
#include "mlm/rng.hpp"
#include "mlm/selectors.hpp"
#include "parallel.hpp"

namespace mlm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PatternInfo {
  std::vector<int> kept;          // finite coordinates
  std::vector<size_t> points;     // grid indices sharing this pattern
};

std::vector<PatternInfo> group_patterns(const std::vector<Eigen::VectorXd>& grid, int n) {
  std::vector<std::uint32_t> masks(grid.size());
  for (size_t g = 0; g < grid.size(); ++g) {
    if (grid[g].size() != n) throw std::invalid_argument("estimator: grid point dimension mismatch");
    std::uint32_t mask = 0;
    for (int i = 0; i < n; ++i) {
      if (std::isnan(grid[g][i])) throw std::invalid_argument("estimator: NaN grid coordinate");
      if (grid[g][i] != kInf) mask |= (1u << i);
    }
    masks[g] = mask;
  }
  std::vector<PatternInfo> out;
  std::vector<std::uint32_t> seen;
  for (size_t g = 0; g < grid.size(); ++g) {
    size_t idx = 0;
    for (; idx < seen.size(); ++idx)
      if (seen[idx] == masks[g]) break;
    if (idx == seen.size()) {
      seen.push_back(masks[g]);
      PatternInfo info;
      for (int i = 0; i < n; ++i)
        if (masks[g] & (1u << i)) info.kept.push_back(i);
      out.push_back(std::move(info));
    }
    out[idx].points.push_back(g);
  }
  return out;
}

}  // namespace

CdfEstimate estimate_f_xmy(const DetectorConfig& config, const ChannelModel& channel,
                           const Eigen::MatrixXd& k_w, const std::vector<Eigen::VectorXd>& grid,
                           const EstimatorOptions& options) {
  config.validate();
  if (options.trials < 1) throw std::invalid_argument("estimator: trials must be >= 1");
  if (options.reuse < 1) throw std::invalid_argument("estimator: reuse must be >= 1");
  const int n = config.n();
  const int reuse = options.reuse;
  const std::uint64_t groups = (options.trials + reuse - 1) / reuse;
  const std::uint64_t trials = groups * reuse;

  const WindowMatrices matrices = build_window_matrices(channel, config.m);
  const int ell = matrices.ell;
  const SelectorMatrices selectors = build_selectors(config.m, ell);
  const int dim = 2 * config.m * n;
  if (k_w.rows() != n * matrices.out_len() || k_w.cols() != n * matrices.out_len())
    throw std::invalid_argument("estimator: K_W dimension mismatch");

  const std::vector<PatternInfo> patterns = group_patterns(grid, n);
  const size_t npts = grid.size();

  constexpr std::uint64_t kGroupsPerBlock = 32;
  const std::uint64_t n_blocks = (groups + kGroupsPerBlock - 1) / kGroupsPerBlock;
  std::vector<double> sum_part(n_blocks * npts, 0.0);
  std::vector<double> sq_part(n_blocks * npts, 0.0);

  internal::run_blocks(n_blocks, options.workers, [&](std::uint64_t block) {
    const std::uint64_t glo = block * kGroupsPerBlock;
    const std::uint64_t ghi = std::min(groups, glo + kGroupsPerBlock);
    Eigen::VectorXd u(dim);
    std::vector<Eigen::VectorXd> argbuf;
    argbuf.reserve(patterns.size());
    for (const auto& pat : patterns) argbuf.emplace_back(static_cast<long>(pat.kept.size()));
    std::vector<double> acc(npts);
    TrialWorkspace ws;

    for (std::uint64_t g = glo; g < ghi; ++g) {
      RngStream rng(options.seed, g);
      SymbolWindows sw = sample_symbol_windows(rng, config.instants, config.m, ell, config.constraint);
      RealizationTerms rt =
          compute_realization_terms(sw, k_w, selectors, matrices, config.constraint);
      ws.prepare(rt);

      std::vector<CdfEvaluator> evals;
      evals.reserve(patterns.size());
      for (const auto& pat : patterns) {
        const int kn = static_cast<int>(pat.kept.size());
        Eigen::MatrixXd sub(kn, kn);
        for (int a = 0; a < kn; ++a)
          for (int b = 0; b < kn; ++b) sub(a, b) = rt.k_v(pat.kept[a], pat.kept[b]);
        evals.emplace_back(sub);
      }

      std::fill(acc.begin(), acc.end(), 0.0);
      for (int draw = 0; draw < reuse; ++draw) {
        for (int i = 0; i < dim; ++i) u[i] = rng.normal();
        compute_trial_terms(rt, u, ws);
        for (size_t pi = 0; pi < patterns.size(); ++pi) {
          const PatternInfo& pat = patterns[pi];
          for (size_t point : pat.points) {
            double contribution;
            if (pat.kept.empty()) {
              contribution = 1.0;
            } else {
              bool minus_inf = false;
              for (size_t j = 0; j < pat.kept.size(); ++j) {
                const int c = pat.kept[j];
                const double v = grid[point][c] + ws.delta[c] - ws.eta[c];
                argbuf[pi][static_cast<long>(j)] = v;
                minus_inf |= (v == -kInf);
              }
              contribution = minus_inf ? 0.0 : evals[pi].evaluate(argbuf[pi]).p;
            }
            if (contribution < -1e-9 || contribution > 1.0 + 1e-9)
              throw std::logic_error("estimator: per-trial contribution left [0,1]");
            acc[point] += std::clamp(contribution, 0.0, 1.0);
          }
        }
      }
      for (size_t point = 0; point < npts; ++point) {
        const double gm = acc[point] / reuse;  // group mean
        sum_part[block * npts + point] += gm;
        sq_part[block * npts + point] += gm * gm;
      }
    }
  });

  CdfEstimate est;
  est.grid = grid;
  est.mean.assign(npts, 0.0);
  est.std_error.assign(npts, 0.0);
  est.trials = trials;
  est.units = groups;
  est.confidence_delta = options.confidence_delta;
  est.ci_halfwidth = hoeffding_halfwidth(groups, options.confidence_delta);
  for (std::uint64_t b = 0; b < n_blocks; ++b)
    for (size_t point = 0; point < npts; ++point) est.mean[point] += sum_part[b * npts + point];
  std::vector<double> sq(npts, 0.0);
  for (std::uint64_t b = 0; b < n_blocks; ++b)
    for (size_t point = 0; point < npts; ++point) sq[point] += sq_part[b * npts + point];
  for (size_t point = 0; point < npts; ++point) {
    const double mean = est.mean[point] / static_cast<double>(groups);
    est.mean[point] = mean;
    if (groups > 1) {
      const double var =
          std::max(0.0, (sq[point] - groups * mean * mean) / static_cast<double>(groups - 1));
      est.std_error[point] = std::sqrt(var / static_cast<double>(groups));
    }
  }
  return est;
}

CdfEstimate estimate_f_xmy(const DetectorConfig& config, const ChannelModel& channel,
                           const NoiseModel& noise, const std::vector<Eigen::VectorXd>& grid,
                           const EstimatorOptions& options) {
  const Eigen::MatrixXd k_w =
      window_covariance(noise, config.instants, config.m, channel.memory());
  return estimate_f_xmy(config, channel, k_w, grid, options);
}

std::vector<Eigen::VectorXd> error_pattern_points(int n) {
  std::vector<Eigen::VectorXd> out;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    Eigen::VectorXd p = Eigen::VectorXd::Constant(n, kInf);
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) p[i] = 0.0;
    out.push_back(std::move(p));
  }
  return out;
}

ProbEstimate joint_error_prob(const CdfEstimate& f_xmy_at_zero) {
  if (f_xmy_at_zero.grid.empty()) throw std::invalid_argument("joint_error_prob: empty estimate");
  const int n = static_cast<int>(f_xmy_at_zero.grid[0].size());
  double p = 1.0;
  double ci = 0.0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    Eigen::VectorXd point = Eigen::VectorXd::Constant(n, kInf);
    int j = 0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        point[i] = 0.0;
        ++j;
      }
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    p += sign * f_xmy_at_zero.at(point);
    ci += f_xmy_at_zero.ci_halfwidth;
  }
  return {std::clamp(p, 0.0, 1.0), ci};
}

std::vector<Eigen::VectorXd> reliability_pattern_points(const std::vector<Eigen::VectorXd>& r_grid,
                                                        double sigma2) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& r : r_grid) {
    const int n = static_cast<int>(r.size());
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      Eigen::VectorXd p(n);
      for (int i = 0; i < n; ++i) {
        const double sign = (mask & (1u << i)) ? -1.0 : 1.0;
        p[i] = 0.5 * sigma2 * sign * r[i];
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

CdfEstimate reliability_cdf(const CdfEstimate& f_xmy, double sigma2,
                            const std::vector<Eigen::VectorXd>& r_grid) {
  if (r_grid.empty()) throw std::invalid_argument("reliability_cdf: empty grid");
  const int n = static_cast<int>(r_grid[0].size());
  CdfEstimate out;
  out.grid = r_grid;
  out.trials = f_xmy.trials;
  out.units = f_xmy.units;
  out.confidence_delta = f_xmy.confidence_delta;
  out.ci_halfwidth = f_xmy.ci_halfwidth * std::pow(2.0, n);
  out.mean.reserve(r_grid.size());
  out.std_error.reserve(r_grid.size());
  for (const auto& r : r_grid) {
    double v = 0.0;
    double se = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      Eigen::VectorXd point(n);
      int flips = 0;
      for (int i = 0; i < n; ++i) {
        const bool flip = mask & (1u << i);
        point[i] = 0.5 * sigma2 * (flip ? -r[i] : r[i]);
        flips += flip ? 1 : 0;
      }
      const int idx = f_xmy.find(point);
      if (idx < 0) throw std::invalid_argument("reliability_cdf: missing sign-pattern evaluation");
      v += ((flips % 2 == 0) ? 1.0 : -1.0) * f_xmy.mean[static_cast<size_t>(idx)];
      se += f_xmy.std_error[static_cast<size_t>(idx)];
    }
    out.mean.push_back(std::clamp(v, 0.0, 1.0));
    out.std_error.push_back(se);
  }
  return out;
}

std::vector<Eigen::VectorXd> conditional_pattern_points(const std::vector<double>& r_grid) {
  std::vector<Eigen::VectorXd> out;
  auto add = [&out](double a, double b, double c) {
    Eigen::VectorXd p(3);
    p << a, b, c;
    out.push_back(std::move(p));
  };
  for (double r : r_grid) {
    add(0.0, r, 0.0);
    add(kInf, r, kInf);
    add(kInf, r, 0.0);
    add(0.0, r, kInf);
  }
  add(0.0, kInf, 0.0);
  add(0.0, kInf, kInf);
  add(kInf, kInf, 0.0);
  return out;
}

ConditionalCdf conditional_cdf(ConditionalKind kind, const CdfEstimate& est3,
                               const std::vector<double>& r_grid) {
  auto value_at = [&est3](double a, double b, double c) {
    Eigen::VectorXd p(3);
    p << a, b, c;
    return est3.at(p);
  };

  ConditionalCdf out;
  const double h = est3.ci_halfwidth;
  if (kind == ConditionalKind::neighbors_correct) {
    out.conditioning_prob = value_at(0.0, kInf, 0.0);
    out.conditioning_ci = h;
  } else {
    out.conditioning_prob =
        1.0 - value_at(0.0, kInf, kInf) - value_at(kInf, kInf, 0.0) + value_at(0.0, kInf, 0.0);
    out.conditioning_ci = 3.0 * h;
  }
  out.usable = out.conditioning_prob >= 10.0 * out.conditioning_ci;

  out.cdf.trials = est3.trials;
  out.cdf.units = est3.units;
  out.cdf.confidence_delta = est3.confidence_delta;
  out.cdf.ci_halfwidth =
      out.usable ? (4.0 * h + h) / out.conditioning_prob : 1.0;
  for (double r : r_grid) {
    Eigen::VectorXd point(1);
    point << r;
    out.cdf.grid.push_back(point);
    double numerator;
    if (kind == ConditionalKind::neighbors_correct) {
      numerator = value_at(0.0, r, 0.0);
    } else {
      numerator = value_at(kInf, r, kInf) - value_at(kInf, r, 0.0) - value_at(0.0, r, kInf) +
                  value_at(0.0, r, 0.0);
    }
    const double v = out.usable ? numerator / out.conditioning_prob : 0.0;
    out.cdf.mean.push_back(std::clamp(v, 0.0, 1.0));
    out.cdf.std_error.push_back(out.usable ? est3.std_error[0] / out.conditioning_prob : 1.0);
  }
  return out;
}

}  // namespace mlm
