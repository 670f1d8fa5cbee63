#include "dogm/run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char ** argv)
{
  CLI::App app{"Dual-weight dynamic occupancy grid: simulate, filter and evaluate radar scenarios"};

  dogm::RunConfig config;
  std::string mode = "all";
  std::uint64_t seed = 0;
  std::vector<std::string> replay;
  unsigned threads = 0;

  app.add_option("scenario", config.scenario, "Built-in scenario (simple_road, highway) or scenario YAML file");
  app.add_option("--mode", mode, "Weight mode")->check(CLI::IsMember({"position", "velocity", "dual", "all"}));
  app.add_option("--seed", seed, "Seed for the simulator and the filter")->required();
  app.add_option("--config", config.config_path, "Parameter override YAML file");
  app.add_option("--out", config.out_dir, "Output directory")->capture_default_str();
  app.add_option("--snapshot-every", config.snapshot_every, "Write a grid image every N frames (0 = off)");
  app.add_option("--replay", replay, "Replay DET_LOG [TRUTH_LOG] instead of simulating")->expected(1, 2);
  app.add_option("--threads", threads, "Worker threads for the weight update");
  app.add_flag("--trace-particles", config.trace_particles, "Export particle states alongside snapshots");

  CLI11_PARSE(app, argc, argv);

  config.seed = seed;
  if (mode == "all") {
    config.modes = {dogm::WeightMode::position, dogm::WeightMode::velocity, dogm::WeightMode::dual};
  } else {
    config.modes = {dogm::parse_weight_mode(mode)};
  }
  if (!replay.empty()) {
    config.replay_detections = replay[0];
    if (replay.size() > 1) {
      config.replay_truth = replay[1];
    }
  }
  if (threads > 0) {
    config.threads = threads;
  }
  return dogm::run(config, std::cerr);
}
