#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "d2d/config.hpp"
#include "d2d/harness.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  long seed = -1;
  long drops = -1;
  long threads = -1;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOptions* opts) {
  cmd->add_option("--config", opts->config_path, "INI configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts->seed, "Random seed (overrides config)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--drops", opts->drops, "Monte Carlo drops (overrides config)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threads", opts->threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", opts->out_dir, "Output directory")->required();
}

int run(d2d::harness::ExperimentKind kind, const CommonOptions& opts) {
  d2d::harness::Config cfg;
  if (!opts.config_path.empty()) {
    cfg = d2d::harness::Config::load_file(opts.config_path);
  }
  if (opts.seed >= 0) cfg.set("run", "seed", std::to_string(opts.seed));
  if (opts.drops >= 0) cfg.set("run", "drops", std::to_string(opts.drops));
  if (opts.threads >= 0) cfg.set("run", "threads", std::to_string(opts.threads));
  cfg.set("run", "out", opts.out_dir);

  const auto experiment = d2d::harness::ExperimentConfig::from_config(kind, cfg);
  const auto result = d2d::harness::run_experiment(experiment);
  const auto files = d2d::harness::emit_all(result, opts.out_dir);
  for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo simulator for D2D underlay cellular networks"};
  app.require_subcommand(1);

  const char* kinds[] = {"sinr_dist",   "mode_select", "threshold_pc",
                         "beamforming", "auction",     "scheduling",
                         "lifetime"};
  const char* descriptions[] = {
      "Uplink/downlink SINR distributions with and without power control",
      "Mode selection criteria compared by link SINR",
      "Threshold-based D2D power control: power saving and efficiency",
      "SLNR beamforming with sum-rate optimal D2D power",
      "Reverse iterative combinatorial auction for spectrum sharing",
      "Stackelberg pricing game with fairness-aware TTI scheduling",
      "Battery-lifetime resource auction with rate constraints",
  };
  std::vector<CommonOptions> opts(std::size(kinds));
  for (size_t i = 0; i < std::size(kinds); ++i) {
    CLI::App* cmd = app.add_subcommand(kinds[i], descriptions[i]);
    add_common(cmd, &opts[i]);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (size_t i = 0; i < std::size(kinds); ++i) {
      if (app.got_subcommand(kinds[i])) {
        return run(d2d::harness::parse_kind(kinds[i]), opts[i]);
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  std::fprintf(stderr, "error: no subcommand selected\n");
  return 1;
}
