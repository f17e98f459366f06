#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mlm/experiment.hpp"

using namespace mlm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("channel presets match the magnetic-recording table") {
  ChannelModel pr1 = preset_channel("pr1");
  CHECK(pr1.taps.size() == 2);
  CHECK(pr1.taps[0] == 1.0);
  CHECK(pr1.taps[1] == 1.0);
  CHECK(pr1.memory() == 1);

  ChannelModel dicode = preset_channel("dicode");
  CHECK(dicode.taps[0] == 1.0);
  CHECK(dicode.taps[1] == -1.0);
  CHECK(dicode.memory() == 1);

  ChannelModel pr2 = preset_channel("pr2");
  CHECK(pr2.taps[0] == 1.0);
  CHECK(pr2.taps[1] == 2.0);
  CHECK(pr2.taps[2] == 1.0);
  CHECK(pr2.memory() == 2);

  ChannelModel pr4 = preset_channel("pr4");
  CHECK(pr4.taps[0] == 1.0);
  CHECK(pr4.taps[1] == 0.0);
  CHECK(pr4.taps[2] == -1.0);
  CHECK(pr4.memory() == 2);

  CHECK_THROWS(preset_channel("pr9"));
}

TEST_CASE("SNR definition: sigma^2 = sum h^2 / 10^(snr/10)") {
  ChannelModel pr1 = preset_channel("pr1");
  CHECK(sigma2_from_snr(pr1, 3.0) == doctest::Approx(1.00237).epsilon(1e-5));
  CHECK(sigma2_from_snr(pr1, 0.0) == doctest::Approx(2.0));
  ChannelModel pr2 = preset_channel("pr2");
  CHECK(sigma2_from_snr(pr2, 10.0) == doctest::Approx(0.6));
}

TEST_CASE("config parsing: keys, lists, errors") {
  const std::string text = R"(
# comment
channel = pr2
snr_db = 5
noise = lag1
rho = -0.5
m = 3
instants = 0, 4, 9
constraint = rll-d1
grid = -2:2:11
trials = 5000
reuse = 8
seed = 42
workers = 2
oracle = true
oracle_trials = 777
out = somewhere
)";
  ExperimentConfig cfg = parse_config_text(text);
  CHECK(cfg.channel == "pr2");
  CHECK(cfg.snr_db.value() == 5.0);
  CHECK(cfg.noise == "lag1");
  CHECK(cfg.rho == -0.5);
  CHECK(cfg.m == 3);
  CHECK(cfg.instants == std::vector<std::int64_t>{0, 4, 9});
  CHECK(cfg.constraint == "rll-d1");
  CHECK(cfg.grid == "-2:2:11");
  CHECK(cfg.trials == 5000);
  CHECK(cfg.reuse == 8);
  CHECK(cfg.seed == 42);
  CHECK(cfg.workers == 2);
  CHECK(cfg.oracle);
  CHECK(cfg.oracle_trials == 777);
  CHECK(cfg.out == "somewhere");
  CHECK(cfg.resolve_sigma2() == doctest::Approx(sigma2_from_snr(preset_channel("pr2"), 5.0)));

  CHECK_THROWS(parse_config_text("bogus_key = 1"));
  CHECK_THROWS(parse_config_text("m = three"));
  CHECK_THROWS(parse_config_text("just a line"));
  ExperimentConfig both = parse_config_text("snr_db = 3\nsigma2 = 1");
  CHECK_THROWS(both.resolve_sigma2());
  ExperimentConfig neither;
  CHECK_THROWS(neither.resolve_sigma2());
  ExperimentConfig taps = parse_config_text("taps = 1, 0.5\nsigma2 = 0.7");
  CHECK(taps.resolve_channel().taps[1] == 0.5);
  CHECK(taps.resolve_noise().sigma2() == 0.7);
}

TEST_CASE("run_experiment: artifacts, ranges, determinism across workers") {
  const std::string dir = (fs::temp_directory_path() / "mlm_exp_test").string();
  fs::remove_all(dir);

  ExperimentConfig cfg;
  cfg.channel = "dicode";
  cfg.snr_db = 5.0;
  cfg.m = 1;
  cfg.instants = {0};
  cfg.trials = 4000;
  cfg.reuse = 4;
  cfg.grid_points = 9;
  cfg.seed = 3;
  cfg.oracle = true;
  cfg.oracle_trials = 2000;
  cfg.out = dir + "/a";
  ExperimentResult r1 = run_experiment(cfg);

  CHECK(fs::exists(dir + "/a/closed_form.csv"));
  CHECK(fs::exists(dir + "/a/reliability.csv"));
  CHECK(fs::exists(dir + "/a/oracle.csv"));
  CHECK(fs::exists(dir + "/a/summary.csv"));

  const std::string csv = slurp(dir + "/a/closed_form.csv");
  CHECK(csv.rfind("r_1,F_hat,ci_halfwidth\n", 0) == 0);

  // Values in [0,1], monotone along the grid axis up to CI slack.
  const auto& est = r1.closed_form;
  for (size_t i = 0; i < est.mean.size(); ++i) {
    CHECK(est.mean[i] >= 0.0);
    CHECK(est.mean[i] <= 1.0);
    if (i > 0) CHECK(est.mean[i] >= est.mean[i - 1] - 2.0 * est.ci_halfwidth);
  }
  CHECK(r1.error_prob >= 0.0);
  CHECK(r1.error_prob <= 1.0);

  // Same seed, different worker counts: byte-identical artifacts.
  ExperimentConfig cfg8 = cfg;
  cfg8.workers = 8;
  cfg8.out = dir + "/b";
  run_experiment(cfg8);
  CHECK(slurp(dir + "/a/closed_form.csv") == slurp(dir + "/b/closed_form.csv"));
  CHECK(slurp(dir + "/a/reliability.csv") == slurp(dir + "/b/reliability.csv"));
  CHECK(slurp(dir + "/a/summary.csv") == slurp(dir + "/b/summary.csv"));
  CHECK(slurp(dir + "/a/oracle.csv") == slurp(dir + "/b/oracle.csv"));

  // Re-run with the same settings: byte-identical again.
  ExperimentConfig cfg2 = cfg;
  cfg2.out = dir + "/c";
  run_experiment(cfg2);
  CHECK(slurp(dir + "/a/summary.csv") == slurp(dir + "/c/summary.csv"));

  fs::remove_all(dir);
}

TEST_CASE("explicit grid spec and unknown scenario errors") {
  ExperimentConfig cfg;
  cfg.channel = "pr1";
  cfg.snr_db = 5.0;
  cfg.m = 1;
  cfg.trials = 500;
  cfg.reuse = 4;
  cfg.grid = "-1:1:5";
  cfg.out = (fs::temp_directory_path() / "mlm_exp_grid").string();
  fs::remove_all(cfg.out);
  ExperimentResult r = run_experiment(cfg);
  CHECK(r.closed_form.grid.size() == 5);
  CHECK(r.closed_form.grid.front()[0] == -1.0);
  CHECK(r.closed_form.grid.back()[0] == 1.0);
  fs::remove_all(cfg.out);

  CHECK_THROWS(reproduce("nope", "/tmp/mlm_nope"));
  ExperimentConfig bad = cfg;
  bad.grid = "oops";
  CHECK_THROWS(run_experiment(bad));
}
