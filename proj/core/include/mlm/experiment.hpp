#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlm/detector.hpp"
#include "mlm/estimator.hpp"

// Batch experiment front-end: flat key/value configs, channel presets,
// scenario runners, CSV emission.

namespace mlm {

// Magnetic-recording channel presets: pr1 [1,1], dicode [1,-1], pr2 [1,2,1],
// pr4 [1,0,-1]. Throws for unknown names.
ChannelModel preset_channel(const std::string& name);
const std::vector<std::string>& preset_names();

// sigma^2 = sum h_i^2 / 10^(snr_db/10).
double sigma2_from_snr(const ChannelModel& channel, double snr_db);

struct ExperimentConfig {
  std::string channel = "pr1";       // preset name, unless taps given
  std::vector<double> taps;          // explicit taps override the preset
  std::optional<double> snr_db;
  std::optional<double> sigma2;      // direct override; exactly one required
  std::string noise = "iid";         // iid | lag1 | custom
  double rho = 0.0;                  // lag1
  std::vector<double> autocov;       // custom shape; scaled so c_0 = sigma^2
  int m = 2;
  std::vector<std::int64_t> instants{0};
  std::string constraint = "none";   // none | rll-d1
  std::string grid = "auto";         // auto | "min:max:count"
  int grid_points = 0;               // 0 = default (41 for n=1, 9 per axis otherwise)
  std::uint64_t trials = 100000;
  int reuse = 64;
  std::uint64_t seed = 1;
  int workers = 1;
  bool oracle = false;
  std::uint64_t oracle_trials = 100000;
  std::string out = "results";

  ChannelModel resolve_channel() const;
  NoiseModel resolve_noise() const;
  double resolve_sigma2() const;
  Constraint resolve_constraint() const;
};

// Flat key = value text, one pair per line, '#' comments.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

struct ExperimentResult {
  CdfEstimate closed_form;   // finite main grid
  CdfEstimate reliability;
  std::optional<SimulationResult> oracle;
  double error_prob = 0.0;   // all instants in error (n=1: symbol error)
  double error_ci = 0.0;
  std::vector<std::string> files_written;
};

// Runs the configured experiment and writes closed_form.csv,
// reliability.csv, summary.csv (and oracle CSVs when requested) under
// config.out. Deterministic for a fixed seed, any worker count.
ExperimentResult run_experiment(const ExperimentConfig& config);

const std::vector<std::string>& reproduce_names();

struct ReproduceOverrides {
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

// Runs one of the named scenario reproductions (marg-trunc, marg-snr, joint,
// corr-noise, rll, conditional) and writes one CSV per curve plus a summary.
void reproduce(const std::string& name, const std::string& out_dir,
               const ReproduceOverrides& overrides = {});

}  // namespace mlm
