#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "mlm/detector.hpp"
#include "mlm/estimator.hpp"
#include "mlm/experiment.hpp"

using namespace mlm;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Eigen::VectorXd> scalar_grid(std::initializer_list<double> values) {
  std::vector<Eigen::VectorXd> out;
  for (double v : values) {
    Eigen::VectorXd p(1);
    p << v;
    out.push_back(p);
  }
  return out;
}

Eigen::VectorXd point1(double v) {
  Eigen::VectorXd p(1);
  p << v;
  return p;
}

}  // namespace

TEST_CASE("estimate_f_xmy: limits, monotonicity, CI accounting") {
  ChannelModel dicode = preset_channel("dicode");
  NoiseModel noise = NoiseModel::iid(1.0);
  DetectorConfig cfg;
  cfg.m = 1;
  cfg.instants = {0};

  EstimatorOptions opts;
  opts.trials = 20000;
  opts.reuse = 4;
  opts.seed = 5;
  auto grid = scalar_grid({-4.0, -1.0, 0.0, 1.0, 4.0, kInf});
  CdfEstimate est = estimate_f_xmy(cfg, dicode, noise, grid, opts);

  CHECK(est.mean.back() == 1.0);
  for (size_t i = 1; i < est.mean.size(); ++i) CHECK(est.mean[i] >= est.mean[i - 1] - 1e-12);
  for (double v : est.mean) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(est.trials == 20000);
  CHECK(est.units == 5000);
  CHECK(est.ci_halfwidth == doctest::Approx(std::sqrt(std::log(2.0 / 0.05) / (2.0 * 5000))));

  EstimatorOptions bad = opts;
  bad.trials = 0;
  CHECK_THROWS(estimate_f_xmy(cfg, dicode, noise, grid, bad));
}

TEST_CASE("closed form matches the direct-detector oracle (dicode, m=2)") {
  ChannelModel dicode = preset_channel("dicode");
  const double sigma2 = sigma2_from_snr(dicode, 5.0);
  NoiseModel noise = NoiseModel::iid(sigma2);
  DetectorConfig cfg;
  cfg.m = 2;
  cfg.instants = {0};

  std::vector<Eigen::VectorXd> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(point1(-2.5 + 0.5 * i));

  EstimatorOptions eopts;
  eopts.trials = 30000;
  eopts.reuse = 1;
  eopts.seed = 21;
  eopts.confidence_delta = 0.01;
  CdfEstimate closed = estimate_f_xmy(cfg, dicode, noise, grid, eopts);

  SimulationOptions sopts;
  sopts.trials = 30000;
  sopts.seed = 1021;
  sopts.confidence_delta = 0.01;
  SimulationResult sim = simulate_empirical_cdf(cfg, dicode, noise, grid, {}, sopts);

  const double band = closed.ci_halfwidth + sim.f_xmy.ci_halfwidth;
  for (size_t g = 0; g < grid.size(); ++g) {
    CAPTURE(grid[g][0]);
    CHECK(std::abs(closed.mean[g] - sim.f_xmy.mean[g]) <= band);
  }
}

TEST_CASE("PR1 at 3 dB, m=2: symbol error probability near 0.14") {
  ChannelModel pr1 = preset_channel("pr1");
  const double sigma2 = sigma2_from_snr(pr1, 3.0);
  DetectorConfig cfg;
  cfg.m = 2;
  cfg.instants = {0};
  EstimatorOptions opts;
  opts.trials = 100000;
  opts.reuse = 16;
  opts.seed = 33;
  CdfEstimate est =
      estimate_f_xmy(cfg, pr1, NoiseModel::iid(sigma2), {point1(0.0)}, opts);
  const double p_err = 1.0 - est.mean[0];
  CHECK(std::abs(p_err - 0.14) < 0.015);
}

TEST_CASE("reliability CDF: inclusion-exclusion consistency with the oracle") {
  ChannelModel pr1 = preset_channel("pr1");
  const double sigma2 = sigma2_from_snr(pr1, 5.0);
  NoiseModel noise = NoiseModel::iid(sigma2);
  DetectorConfig cfg;
  cfg.m = 1;
  cfg.instants = {0};

  std::vector<Eigen::VectorXd> r_grid;
  for (double r : {0.0, 0.5, 1.5, 3.0, 6.0, 12.0}) r_grid.push_back(point1(r));

  EstimatorOptions opts;
  opts.trials = 40000;
  opts.reuse = 1;
  opts.seed = 9;
  opts.confidence_delta = 0.01;
  auto points = reliability_pattern_points(r_grid, sigma2);
  CdfEstimate est = estimate_f_xmy(cfg, pr1, noise, points, opts);
  CdfEstimate rel = reliability_cdf(est, sigma2, r_grid);

  // n = 1 closed form: F(s r/2) - F(-s r/2); F_R(0) ~ 0.
  CHECK(rel.mean[0] <= 2.0 * est.ci_halfwidth);
  for (size_t i = 1; i < rel.mean.size(); ++i) CHECK(rel.mean[i] >= rel.mean[i - 1] - 1e-12);

  SimulationOptions sopts;
  sopts.trials = 40000;
  sopts.seed = 1009;
  sopts.confidence_delta = 0.01;
  SimulationResult sim = simulate_empirical_cdf(cfg, pr1, noise, {}, r_grid, sopts);
  const double band = rel.ci_halfwidth + sim.f_r.ci_halfwidth;
  for (size_t g = 0; g < r_grid.size(); ++g) {
    CAPTURE(r_grid[g][0]);
    CHECK(std::abs(rel.mean[g] - sim.f_r.mean[g]) <= band);
  }

  CHECK_THROWS(reliability_cdf(est, sigma2, {point1(123.0)}));
}

TEST_CASE("joint error probability: subset inclusion-exclusion vs oracle") {
  ChannelModel pr1 = preset_channel("pr1");
  const double sigma2 = sigma2_from_snr(pr1, 5.0);
  NoiseModel noise = NoiseModel::iid(sigma2);
  DetectorConfig cfg;
  cfg.m = 1;
  cfg.instants = {0, 1};

  EstimatorOptions opts;
  opts.trials = 60000;
  opts.reuse = 4;
  opts.seed = 77;
  CdfEstimate est = estimate_f_xmy(cfg, pr1, noise, error_pattern_points(2), opts);
  ProbEstimate joint = joint_error_prob(est);

  SimulationOptions sopts;
  sopts.trials = 60000;
  sopts.seed = 1077;
  SimulationResult sim = simulate_empirical_cdf(cfg, pr1, noise, {}, {}, sopts);
  CHECK(std::abs(joint.p - sim.joint_error_rate) <= joint.ci + sim.f_xmy.ci_halfwidth);

  // n=1 special case: joint error prob equals 1 - F(0).
  DetectorConfig c1;
  c1.m = 1;
  c1.instants = {0};
  CdfEstimate e1 = estimate_f_xmy(c1, pr1, noise, error_pattern_points(1), opts);
  ProbEstimate p1 = joint_error_prob(e1);
  CHECK(p1.p == doctest::Approx(1.0 - e1.mean[0]).epsilon(1e-12));

  CdfEstimate incomplete = est;
  incomplete.grid.pop_back();
  incomplete.mean.pop_back();
  incomplete.std_error.pop_back();
  CHECK_THROWS(joint_error_prob(incomplete));
}

TEST_CASE("Q/Lambda reuse leaves the estimate statistically unchanged") {
  ChannelModel pr2 = preset_channel("pr2");
  const double sigma2 = sigma2_from_snr(pr2, 5.0);
  NoiseModel noise = NoiseModel::iid(sigma2);
  DetectorConfig cfg;
  cfg.m = 2;
  cfg.instants = {0};
  auto grid = scalar_grid({-2.0, 0.0, 2.0});

  EstimatorOptions fresh;
  fresh.trials = 40000;
  fresh.reuse = 1;
  fresh.seed = 1;
  EstimatorOptions reused;
  reused.trials = 40000;
  reused.reuse = 64;
  reused.seed = 2;
  CdfEstimate a = estimate_f_xmy(cfg, pr2, noise, grid, fresh);
  CdfEstimate b = estimate_f_xmy(cfg, pr2, noise, grid, reused);
  for (size_t g = 0; g < grid.size(); ++g)
    CHECK(std::abs(a.mean[g] - b.mean[g]) <= a.ci_halfwidth + b.ci_halfwidth);
}

TEST_CASE("sign-convention invariance: negating the taps is exact") {
  ChannelModel pr2 = preset_channel("pr2");
  ChannelModel neg({-1.0, -2.0, -1.0});
  NoiseModel noise = NoiseModel::iid(0.9);
  DetectorConfig cfg;
  cfg.m = 2;
  cfg.instants = {0, 2};
  std::vector<Eigen::VectorXd> grid;
  Eigen::VectorXd p(2);
  p << 0.3, -0.4;
  grid.push_back(p);
  p << 0.0, 0.0;
  grid.push_back(p);

  EstimatorOptions opts;
  opts.trials = 4000;
  opts.reuse = 8;
  opts.seed = 123;
  CdfEstimate a = estimate_f_xmy(cfg, pr2, noise, grid, opts);
  CdfEstimate b = estimate_f_xmy(cfg, neg, noise, grid, opts);
  for (size_t g = 0; g < grid.size(); ++g) CHECK(a.mean[g] == b.mean[g]);
}

TEST_CASE("explicit K_W path matches the NoiseModel path exactly") {
  ChannelModel pr1 = preset_channel("pr1");
  NoiseModel noise = NoiseModel::lag1(0.8, 0.4);
  DetectorConfig cfg;
  cfg.m = 2;
  cfg.instants = {0, 3};
  const Eigen::MatrixXd k_w = window_covariance(noise, cfg.instants, cfg.m, pr1.memory());

  EstimatorOptions opts;
  opts.trials = 2000;
  opts.reuse = 4;
  opts.seed = 8;
  auto grid = error_pattern_points(2);
  CdfEstimate via_model = estimate_f_xmy(cfg, pr1, noise, grid, opts);
  CdfEstimate via_matrix = estimate_f_xmy(cfg, pr1, k_w, grid, opts);
  for (size_t g = 0; g < grid.size(); ++g) CHECK(via_model.mean[g] == via_matrix.mean[g]);
}

TEST_CASE("independence factorization at lag beyond the window span") {
  ChannelModel pr1 = preset_channel("pr1");
  const double sigma2 = sigma2_from_snr(pr1, 5.0);
  NoiseModel noise = NoiseModel::iid(sigma2);
  DetectorConfig cfg;
  cfg.m = 2;
  cfg.instants = {0, 7};  // 7 > 2(m+ell) = 6

  std::vector<Eigen::VectorXd> pts;
  const std::vector<double> axis = {-1.0, 0.0, 1.0};
  for (double r1 : axis)
    for (double r2 : axis) {
      Eigen::VectorXd q(2);
      q << r1, r2;
      pts.push_back(q);
    }
  for (double r : axis) {
    Eigen::VectorXd q(2);
    q << r, kInf;
    pts.push_back(q);
    q << kInf, r;
    pts.push_back(q);
  }

  EstimatorOptions opts;
  opts.trials = 60000;
  opts.reuse = 8;
  opts.seed = 15;
  CdfEstimate est = estimate_f_xmy(cfg, pr1, noise, pts, opts);
  for (double r1 : axis) {
    for (double r2 : axis) {
      Eigen::VectorXd joint(2), m1(2), m2(2);
      joint << r1, r2;
      m1 << r1, kInf;
      m2 << kInf, r2;
      const double f12 = est.at(joint);
      const double prod = est.at(m1) * est.at(m2);
      CHECK(std::abs(f12 - prod) <= 3.0 * est.ci_halfwidth);
    }
  }
}

TEST_CASE("conditional distributions: formula consistency on the shared stream") {
  ChannelModel pr1 = preset_channel("pr1");
  const double sigma2 = sigma2_from_snr(pr1, 3.0);
  NoiseModel noise = NoiseModel::iid(sigma2);
  DetectorConfig cfg;
  cfg.m = 1;
  cfg.instants = {-1, 0, 1};

  const std::vector<double> r_axis = {-2.0, -0.5, 0.0, 0.5, 2.0};
  std::vector<Eigen::VectorXd> pts = conditional_pattern_points(r_axis);
  EstimatorOptions opts;
  opts.trials = 50000;
  opts.reuse = 2;
  opts.seed = 4;
  CdfEstimate est = estimate_f_xmy(cfg, pr1, noise, pts, opts);

  ConditionalCdf a = conditional_cdf(ConditionalKind::neighbors_correct, est, r_axis);
  ConditionalCdf b = conditional_cdf(ConditionalKind::neighbors_wrong, est, r_axis);
  CHECK(a.usable);
  // C1 equals the (t-1,t+1) marginal at (0,0) by definition.
  Eigen::VectorXd c1pt(3);
  c1pt << 0.0, kInf, 0.0;
  CHECK(a.conditioning_prob == doctest::Approx(est.at(c1pt)).epsilon(1e-12));
  for (size_t i = 0; i < r_axis.size(); ++i) {
    Eigen::VectorXd num(3);
    num << 0.0, r_axis[i], 0.0;
    CHECK(a.cdf.mean[i] ==
          doctest::Approx(est.at(num) / a.conditioning_prob).epsilon(1e-12));
    CHECK(a.cdf.mean[i] >= 0.0);
    CHECK(a.cdf.mean[i] <= 1.0);
  }
  if (b.usable) {
    for (size_t i = 1; i < r_axis.size(); ++i)
      CHECK(b.cdf.mean[i] >= b.cdf.mean[i - 1] - 1e-9);
  }
}
