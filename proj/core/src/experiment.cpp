#include "mlm/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mlm/mvncdf.hpp"
#include "mlm/rng.hpp"

namespace mlm {

namespace fs = std::filesystem;

ChannelModel preset_channel(const std::string& name) {
  if (name == "pr1") return ChannelModel({1.0, 1.0});
  if (name == "dicode") return ChannelModel({1.0, -1.0});
  if (name == "pr2") return ChannelModel({1.0, 2.0, 1.0});
  if (name == "pr4") return ChannelModel({1.0, 0.0, -1.0});
  throw std::invalid_argument("unknown channel preset: " + name);
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"pr1", "dicode", "pr2", "pr4"};
  return names;
}

double sigma2_from_snr(const ChannelModel& channel, double snr_db) {
  return channel.energy() / std::pow(10.0, snr_db / 10.0);
}

ChannelModel ExperimentConfig::resolve_channel() const {
  if (!taps.empty()) return ChannelModel(taps);
  return preset_channel(channel);
}

double ExperimentConfig::resolve_sigma2() const {
  if (sigma2 && snr_db) throw std::invalid_argument("config: give either snr_db or sigma2, not both");
  if (sigma2) {
    if (!(*sigma2 > 0.0)) throw std::invalid_argument("config: sigma2 must be positive");
    return *sigma2;
  }
  if (!snr_db) throw std::invalid_argument("config: snr_db (or sigma2) is required");
  return sigma2_from_snr(resolve_channel(), *snr_db);
}

NoiseModel ExperimentConfig::resolve_noise() const {
  const double s2 = resolve_sigma2();
  if (noise == "iid") return NoiseModel::iid(s2);
  if (noise == "lag1") return NoiseModel::lag1(s2, rho);
  if (noise == "custom") {
    if (autocov.empty() || autocov[0] <= 0.0)
      throw std::invalid_argument("config: custom noise needs an autocov list with c_0 > 0");
    std::vector<double> scaled(autocov.size());
    for (size_t i = 0; i < autocov.size(); ++i) scaled[i] = s2 * autocov[i] / autocov[0];
    return NoiseModel::custom(scaled);
  }
  throw std::invalid_argument("config: unknown noise kind: " + noise);
}

Constraint ExperimentConfig::resolve_constraint() const {
  if (constraint == "none") return Constraint::none();
  if (constraint == "rll-d1" || constraint == "rll_d1") return Constraint::rll_d1();
  throw std::invalid_argument("config: unknown constraint: " + constraint);
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (...) {
    throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (...) {
    throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": '" + v + "'");
}

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_cdf_csv(const std::string& path, const CdfEstimate& est,
                   std::vector<std::string>& written) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const int n = est.grid.empty() ? 1 : static_cast<int>(est.grid[0].size());
  for (int i = 1; i <= n; ++i) out << "r_" << i << ",";
  out << "F_hat,ci_halfwidth\n";
  for (size_t g = 0; g < est.grid.size(); ++g) {
    bool finite = true;
    for (long j = 0; j < est.grid[g].size(); ++j) finite &= std::isfinite(est.grid[g][j]);
    if (!finite) continue;  // auxiliary pattern points stay internal
    for (long j = 0; j < est.grid[g].size(); ++j) out << fmt9(est.grid[g][j]) << ",";
    out << fmt9(est.mean[g]) << "," << fmt9(est.ci_halfwidth) << "\n";
  }
  written.push_back(path);
}

void write_summary_csv(const std::string& path,
                       const std::vector<std::array<std::string, 3>>& rows,
                       std::vector<std::string>& written) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "metric,value,ci_halfwidth\n";
  for (const auto& r : rows) out << r[0] << "," << r[1] << "," << r[2] << "\n";
  written.push_back(path);
}

// 1000-trial direct-detector pilot estimating the spread of X - Y per
// instant; sets the auto grid range.
std::vector<double> pilot_spread(const DetectorConfig& config, const ChannelModel& channel,
                                 const NoiseModel& noise, std::uint64_t seed) {
  if (config.m > 8)
    throw std::invalid_argument("auto grid needs the enumeration pilot (m <= 8); give an explicit grid");
  const WindowMatrices matrices = build_window_matrices(channel, config.m);
  const int ell = matrices.ell;
  const CandidateSet cand(config.m, ell, config.constraint);
  const int n = config.n();

  const std::int64_t nlo = config.instants.front() - config.m;
  const std::int64_t nhi = config.instants.back() + config.m + ell;
  const long nlen = static_cast<long>(nhi - nlo + 1);
  std::vector<std::int64_t> nidx(static_cast<size_t>(nlen));
  for (long i = 0; i < nlen; ++i) nidx[static_cast<size_t>(i)] = nlo + i;
  SymEig neig = sym_eig(noise.covariance(nidx));
  Eigen::MatrixXd nfac = neig.vectors;
  for (long j = 0; j < nfac.cols(); ++j) nfac.col(j) *= std::sqrt(std::max(neig.values[j], 0.0));

  constexpr int kPilotTrials = 1000;
  Eigen::MatrixXd d(n, kPilotTrials);
  Eigen::VectorXd z(nlen);
  for (int trial = 0; trial < kPilotTrials; ++trial) {
    RngStream rng(seed ^ 0x70696c6f74ULL, static_cast<std::uint64_t>(trial));
    SymbolWindows sw =
        sample_symbol_windows(rng, config.instants, config.m, ell, config.constraint);
    for (long i = 0; i < nlen; ++i) z[i] = rng.normal();
    const Eigen::VectorXd wglob = nfac * z;
    for (int i = 0; i < n; ++i) {
      const long off = static_cast<long>(config.instants[static_cast<size_t>(i)] - config.m - nlo);
      XY xy = compute_xy(sw.window(i), wglob.segment(off, matrices.out_len()), cand, matrices);
      d(i, trial) = xy.x - xy.y;
    }
  }
  std::vector<double> spreads(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double mean = d.row(i).mean();
    const double var = (d.row(i).array() - mean).square().sum() / (kPilotTrials - 1);
    spreads[static_cast<size_t>(i)] = std::sqrt(std::max(var, 1e-12));
  }
  return spreads;
}

std::vector<Eigen::VectorXd> product_grid(const std::vector<std::vector<double>>& axes) {
  const int n = static_cast<int>(axes.size());
  std::vector<Eigen::VectorXd> out;
  std::vector<size_t> idx(static_cast<size_t>(n), 0);
  for (;;) {
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) p[i] = axes[static_cast<size_t>(i)][idx[static_cast<size_t>(i)]];
    out.push_back(std::move(p));
    int i = n - 1;
    for (; i >= 0; --i) {
      if (++idx[static_cast<size_t>(i)] < axes[static_cast<size_t>(i)].size()) break;
      idx[static_cast<size_t>(i)] = 0;
    }
    if (i < 0) break;
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i)
    out[static_cast<size_t>(i)] = lo + (hi - lo) * i / std::max(count - 1, 1);
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty())
      throw std::invalid_argument("config: empty value for " + key);

    if (key == "channel") {
      cfg.channel = value;
    } else if (key == "taps") {
      cfg.taps.clear();
      for (const auto& v : split(value, ',')) cfg.taps.push_back(parse_double(key, v));
    } else if (key == "snr_db") {
      cfg.snr_db = parse_double(key, value);
    } else if (key == "sigma2") {
      cfg.sigma2 = parse_double(key, value);
    } else if (key == "noise") {
      cfg.noise = value;
    } else if (key == "rho") {
      cfg.rho = parse_double(key, value);
    } else if (key == "autocov") {
      cfg.autocov.clear();
      for (const auto& v : split(value, ',')) cfg.autocov.push_back(parse_double(key, v));
    } else if (key == "m") {
      cfg.m = static_cast<int>(parse_int(key, value));
    } else if (key == "instants") {
      cfg.instants.clear();
      for (const auto& v : split(value, ',')) cfg.instants.push_back(parse_int(key, v));
    } else if (key == "constraint") {
      cfg.constraint = value;
    } else if (key == "grid") {
      cfg.grid = value;
    } else if (key == "grid_points") {
      cfg.grid_points = static_cast<int>(parse_int(key, value));
    } else if (key == "trials") {
      cfg.trials = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "reuse") {
      cfg.reuse = static_cast<int>(parse_int(key, value));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(parse_int(key, value));
    } else if (key == "oracle") {
      cfg.oracle = parse_bool(key, value);
    } else if (key == "oracle_trials") {
      cfg.oracle_trials = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "out") {
      cfg.out = value;
    } else {
      throw std::invalid_argument("config: unknown key: " + key);
    }
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const ChannelModel channel = config.resolve_channel();
  const NoiseModel noise = config.resolve_noise();
  const double s2 = noise.sigma2();
  DetectorConfig det;
  det.m = config.m;
  det.instants = config.instants;
  det.constraint = config.resolve_constraint();
  det.validate();
  const int n = det.n();

  // Per-axis r ranges: +/- 4 sigma_est of the X - Y spread (pilot), or the
  // explicit min:max:count spec.
  int points = config.grid_points > 0 ? config.grid_points : (n == 1 ? 41 : 9);
  std::vector<std::vector<double>> axes;
  double rmax_scale = 0.0;
  if (config.grid == "auto") {
    const std::vector<double> spread = pilot_spread(det, channel, noise, config.seed);
    for (int i = 0; i < n; ++i) {
      axes.push_back(linspace(-4.0 * spread[static_cast<size_t>(i)],
                              4.0 * spread[static_cast<size_t>(i)], points));
      rmax_scale = std::max(rmax_scale, 4.0 * spread[static_cast<size_t>(i)]);
    }
  } else {
    const auto parts = split(config.grid, ':');
    if (parts.size() != 3) throw std::invalid_argument("config: grid must be auto or min:max:count");
    const double lo = parse_double("grid", parts[0]);
    const double hi = parse_double("grid", parts[1]);
    points = static_cast<int>(parse_int("grid", parts[2]));
    if (points < 2 || hi <= lo) throw std::invalid_argument("config: bad grid spec");
    for (int i = 0; i < n; ++i) axes.push_back(linspace(lo, hi, points));
    rmax_scale = std::max(std::abs(lo), hi);
  }
  const std::vector<Eigen::VectorXd> main_grid = product_grid(axes);

  // Joint reliability grid: diagonal r-vectors covering [0, 2 rmax / s2].
  std::vector<Eigen::VectorXd> r_grid;
  for (double r : linspace(0.0, 2.0 * rmax_scale / s2, points))
    r_grid.push_back(Eigen::VectorXd::Constant(n, r));

  std::vector<Eigen::VectorXd> all_points = main_grid;
  for (auto& p : error_pattern_points(n)) all_points.push_back(std::move(p));
  for (auto& p : reliability_pattern_points(r_grid, s2)) all_points.push_back(std::move(p));

  EstimatorOptions opts;
  opts.trials = config.trials;
  opts.reuse = config.reuse;
  opts.workers = config.workers;
  opts.seed = config.seed;

  ExperimentResult result;
  const CdfEstimate est = estimate_f_xmy(det, channel, noise, all_points, opts);

  result.closed_form = est;
  result.closed_form.grid = main_grid;
  result.closed_form.mean.assign(est.mean.begin(), est.mean.begin() + static_cast<long>(main_grid.size()));
  result.closed_form.std_error.assign(est.std_error.begin(),
                                      est.std_error.begin() + static_cast<long>(main_grid.size()));
  result.reliability = reliability_cdf(est, s2, r_grid);
  const ProbEstimate err = joint_error_prob(est);
  result.error_prob = err.p;
  result.error_ci = err.ci;

  fs::create_directories(config.out);
  const std::string base = config.out + "/";
  write_cdf_csv(base + "closed_form.csv", result.closed_form, result.files_written);
  write_cdf_csv(base + "reliability.csv", result.reliability, result.files_written);

  std::vector<std::array<std::string, 3>> summary;
  summary.push_back({"error_prob", fmt9(result.error_prob), fmt9(result.error_ci)});

  if (config.oracle) {
    SimulationOptions sim_opts;
    sim_opts.trials = config.oracle_trials;
    sim_opts.seed = config.seed + 0x6f7261636cULL;
    sim_opts.workers = config.workers;
    SimulationResult sim = simulate_empirical_cdf(det, channel, noise, main_grid, r_grid, sim_opts);
    write_cdf_csv(base + "oracle.csv", sim.f_xmy, result.files_written);
    write_cdf_csv(base + "oracle_reliability.csv", sim.f_r, result.files_written);
    summary.push_back({"oracle_error_prob", fmt9(sim.joint_error_rate),
                       fmt9(hoeffding_halfwidth(sim.f_xmy.trials, sim.f_xmy.confidence_delta))});
    result.oracle = std::move(sim);
  }
  write_summary_csv(base + "summary.csv", summary, result.files_written);
  return result;
}

const std::vector<std::string>& reproduce_names() {
  static const std::vector<std::string> names = {"marg-trunc", "marg-snr", "joint",
                                                 "corr-noise", "rll", "conditional"};
  return names;
}

namespace {

ExperimentConfig scenario_base(const ReproduceOverrides& ov) {
  ExperimentConfig cfg;
  cfg.trials = ov.trials.value_or(200000);
  cfg.seed = ov.seed.value_or(1);
  cfg.workers = ov.workers.value_or(1);
  return cfg;
}

void reproduce_marg_trunc(const std::string& out, const ReproduceOverrides& ov) {
  std::vector<std::array<std::string, 3>> summary;
  std::vector<std::string> files;
  for (double snr : {3.0, 10.0}) {
    for (int m = 1; m <= 5; ++m) {
      ExperimentConfig cfg = scenario_base(ov);
      cfg.channel = "pr1";
      cfg.snr_db = snr;
      cfg.m = m;
      cfg.oracle = (m == 2);
      cfg.oracle_trials = cfg.trials;
      cfg.out = out + "/pr1_snr" + fmt9(snr) + "_m" + std::to_string(m);
      ExperimentResult r = run_experiment(cfg);
      summary.push_back({"pr1_snr" + fmt9(snr) + "_m" + std::to_string(m) + "_error_prob",
                         fmt9(r.error_prob), fmt9(r.error_ci)});
    }
  }
  write_summary_csv(out + "/summary.csv", summary, files);
}

void reproduce_marg_snr(const std::string& out, const ReproduceOverrides& ov) {
  std::vector<std::array<std::string, 3>> summary;
  std::vector<std::string> files;
  for (double snr : {3.0, 5.0, 8.0, 10.0}) {
    ExperimentConfig cfg = scenario_base(ov);
    cfg.channel = "pr1";
    cfg.snr_db = snr;
    cfg.m = 5;
    cfg.out = out + "/pr1_snr" + fmt9(snr) + "_m5";
    ExperimentResult r = run_experiment(cfg);
    summary.push_back(
        {"pr1_snr" + fmt9(snr) + "_m5_error_prob", fmt9(r.error_prob), fmt9(r.error_ci)});
  }
  write_summary_csv(out + "/summary.csv", summary, files);
}

void reproduce_joint(const std::string& out, const ReproduceOverrides& ov) {
  std::vector<std::array<std::string, 3>> summary;
  std::vector<std::string> files;
  struct Case {
    const char* channel;
    int m;
  };
  for (const Case& c : {Case{"pr1", 2}, Case{"pr2", 5}}) {
    for (std::int64_t lag : {1, 7}) {
      ExperimentConfig cfg = scenario_base(ov);
      cfg.trials = ov.trials.value_or(400000);
      cfg.channel = c.channel;
      cfg.snr_db = 5.0;
      cfg.m = c.m;
      cfg.instants = {0, lag};
      cfg.grid_points = 5;
      cfg.out = out + "/" + c.channel + "_lag" + std::to_string(lag);
      ExperimentResult r = run_experiment(cfg);
      summary.push_back({std::string(c.channel) + "_lag" + std::to_string(lag) + "_joint_error_prob",
                         fmt9(r.error_prob), fmt9(r.error_ci)});
    }
  }
  write_summary_csv(out + "/summary.csv", summary, files);
}

void reproduce_corr_noise(const std::string& out, const ReproduceOverrides& ov) {
  std::vector<std::array<std::string, 3>> summary;
  std::vector<std::string> files;
  for (double rho : {-0.5, 0.0, 0.5}) {
    ExperimentConfig cfg = scenario_base(ov);
    cfg.trials = ov.trials.value_or(400000);
    cfg.channel = "pr2";
    cfg.snr_db = 5.0;
    cfg.m = 5;
    cfg.noise = (rho == 0.0) ? "iid" : "lag1";
    cfg.rho = rho;
    cfg.out = out + "/pr2_rho" + fmt9(rho);
    ExperimentResult r = run_experiment(cfg);
    summary.push_back({"pr2_rho" + fmt9(rho) + "_error_prob", fmt9(r.error_prob), fmt9(r.error_ci)});
  }
  write_summary_csv(out + "/summary.csv", summary, files);
}

void reproduce_rll(const std::string& out, const ReproduceOverrides& ov) {
  std::vector<std::array<std::string, 3>> summary;
  std::vector<std::string> files;
  for (const std::string ch : {"pr4", "dicode"}) {
    for (const std::string cons : {"none", "rll-d1"}) {
      ExperimentConfig cfg = scenario_base(ov);
      cfg.trials = ov.trials.value_or(400000);
      cfg.channel = ch;
      cfg.snr_db = 5.0;
      cfg.m = 5;
      cfg.constraint = cons;
      cfg.out = out + "/" + ch + "_" + (cons == "none" ? "uncoded" : "rll");
      ExperimentResult r = run_experiment(cfg);
      summary.push_back({ch + "_" + (cons == "none" ? "uncoded" : "rll") + "_error_prob",
                         fmt9(r.error_prob), fmt9(r.error_ci)});
    }
  }
  write_summary_csv(out + "/summary.csv", summary, files);
}

void reproduce_conditional(const std::string& out, const ReproduceOverrides& ov) {
  std::vector<std::array<std::string, 3>> summary;
  std::vector<std::string> files;
  struct Case {
    const char* channel;
    int m;
  };
  for (const Case& c : {Case{"pr1", 2}, Case{"pr2", 3}, Case{"pr4", 4}}) {
    for (double snr : {3.0, 10.0}) {
      const ChannelModel channel = preset_channel(c.channel);
      const double s2 = sigma2_from_snr(channel, snr);
      const NoiseModel noise = NoiseModel::iid(s2);
      DetectorConfig det;
      det.m = c.m;
      det.instants = {-1, 0, 1};

      const std::vector<double> spread = pilot_spread(det, channel, noise, ov.seed.value_or(1));
      std::vector<double> r_axis = linspace(-4.0 * spread[1], 4.0 * spread[1], 41);

      std::vector<Eigen::VectorXd> pts = conditional_pattern_points(r_axis);
      for (auto& p : error_pattern_points(3)) pts.push_back(std::move(p));

      EstimatorOptions opts;
      opts.trials = ov.trials.value_or(2000000);
      opts.reuse = 1;
      opts.seed = ov.seed.value_or(1);
      opts.workers = ov.workers.value_or(1);
      const CdfEstimate est = estimate_f_xmy(det, channel, noise, pts, opts);

      const std::string tag = std::string(c.channel) + "_snr" + fmt9(snr);
      const std::string dir = out + "/" + tag;
      fs::create_directories(dir);

      // Unconditioned marginal at the center instant.
      CdfEstimate uncond;
      uncond.trials = est.trials;
      uncond.units = est.units;
      uncond.confidence_delta = est.confidence_delta;
      uncond.ci_halfwidth = est.ci_halfwidth;
      for (double r : r_axis) {
        Eigen::VectorXd p(3);
        p << std::numeric_limits<double>::infinity(), r, std::numeric_limits<double>::infinity();
        Eigen::VectorXd g(1);
        g << r;
        uncond.grid.push_back(g);
        uncond.mean.push_back(est.at(p));
        uncond.std_error.push_back(0.0);
      }
      write_cdf_csv(dir + "/unconditional.csv", uncond, files);

      const ConditionalCdf a = conditional_cdf(ConditionalKind::neighbors_correct, est, r_axis);
      const ConditionalCdf b = conditional_cdf(ConditionalKind::neighbors_wrong, est, r_axis);
      write_cdf_csv(dir + "/cond_neighbors_correct.csv", a.cdf, files);
      write_cdf_csv(dir + "/cond_neighbors_wrong.csv", b.cdf, files);

      Eigen::VectorXd zero3(3);
      zero3 << std::numeric_limits<double>::infinity(), 0.0, std::numeric_limits<double>::infinity();
      const double p1 = 1.0 - est.at(zero3);
      summary.push_back({tag + "_error_prob", fmt9(p1), fmt9(est.ci_halfwidth)});
      summary.push_back({tag + "_cond_correct_usable", a.usable ? "1" : "0", "0"});
      summary.push_back({tag + "_cond_wrong_usable", b.usable ? "1" : "0", "0"});
      if (b.usable) {
        const ProbEstimate p3 = joint_error_prob(est);
        summary.push_back({tag + "_cond_wrong_error_prob", fmt9(p3.p / b.conditioning_prob),
                           fmt9(p3.ci / b.conditioning_prob)});
      }
    }
  }
  write_summary_csv(out + "/summary.csv", summary, files);
}

}  // namespace

void reproduce(const std::string& name, const std::string& out_dir,
               const ReproduceOverrides& overrides) {
  fs::create_directories(out_dir);
  if (name == "marg-trunc") return reproduce_marg_trunc(out_dir, overrides);
  if (name == "marg-snr") return reproduce_marg_snr(out_dir, overrides);
  if (name == "joint") return reproduce_joint(out_dir, overrides);
  if (name == "corr-noise") return reproduce_corr_noise(out_dir, overrides);
  if (name == "rll") return reproduce_rll(out_dir, overrides);
  if (name == "conditional") return reproduce_conditional(out_dir, overrides);
  throw std::invalid_argument("unknown reproduce scenario: " + name);
}

}  // namespace mlm
