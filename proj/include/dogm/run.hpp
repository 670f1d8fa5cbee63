#ifndef DOGM_RUN_HPP_
#define DOGM_RUN_HPP_

#include "dogm/dynamic_grid_filter.hpp"
#include "dogm/evaluation.hpp"
#include "dogm/scenario_config.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dogm
{

inline constexpr const char * kVersion = "0.1.0";

/// The detection stream every weight mode of one invocation consumes.
struct RecordedStream
{
  SensorRig rig;
  std::vector<SensorFrame> frames;
  std::vector<GroundTruthFrame> truth;  ///< empty when replaying detections only
};

RecordedStream record_scenario(const ScenarioSpec & scenario);

/// FNV-1a over the bit patterns of every frame and detection.
std::uint64_t stream_hash(const std::vector<SensorFrame> & frames);

struct ModeResult
{
  WeightMode mode{WeightMode::dual};
  std::uint64_t stream_hash{0};
  std::optional<MetricsReport> metrics;
  std::size_t reset_events{0};
};

/// Called after every processed frame.
using FrameObserver = std::function<void(std::size_t frame, const DynamicGridFilter &)>;

/// Runs the filter in one weight mode over a recorded stream and evaluates
/// it against the truth when available.
ModeResult run_mode(
  const RecordedStream & stream, const ParameterOverrides & params, WeightMode mode,
  const FrameObserver & observer = {});

struct RunConfig
{
  std::string scenario;  ///< built-in name or scenario file path
  std::vector<WeightMode> modes;
  std::optional<std::uint64_t> seed;
  std::string config_path;  ///< optional parameter overrides
  std::string out_dir{"out"};
  std::size_t snapshot_every{0};  ///< 0 disables snapshots
  std::string replay_detections;
  std::string replay_truth;
  bool trace_particles{false};
  std::optional<unsigned> threads;
};

void write_metrics_csv(std::ostream & os, const std::vector<ModeResult> & results);
void write_duration_csv(std::ostream & os, const std::vector<ModeResult> & results);

/// Full CLI pipeline. Returns the process exit status; diagnostics go to `err`.
int run(const RunConfig & config, std::ostream & err);

}  // namespace dogm

#endif  // DOGM_RUN_HPP_
