#ifndef DOGM_SIMULATOR_HPP_
#define DOGM_SIMULATOR_HPP_

#include "dogm/dynamic_grid_filter.hpp"
#include "dogm/measurement.hpp"
#include "dogm/types.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dogm
{

/// Constant speed and yaw rate for `duration` seconds.
struct MotionSegment
{
  double duration{0.0};
  double speed{0.0};
  double yaw_rate{0.0};
};

/// Piecewise-constant-speed path. After the last segment the motion continues
/// with that segment's speed and yaw rate.
class Trajectory
{
public:
  struct State
  {
    Pose2 pose;
    Vec2 velocity{Vec2::Zero()};
    double speed{0.0};
    double yaw_rate{0.0};
  };

  Trajectory() = default;
  Trajectory(const Pose2 & start, std::vector<MotionSegment> segments);

  State at(double t) const;
  const Pose2 & start() const { return start_; }
  const std::vector<MotionSegment> & segments() const { return segments_; }

private:
  Pose2 start_;
  std::vector<MotionSegment> segments_;
};

struct TargetObject
{
  int id{0};
  double length{4.5};
  double width{1.8};
  Trajectory trajectory;
};

struct SensorNoise
{
  double sigma_range{0.15};              ///< m
  double sigma_azimuth{0.5 * M_PI / 180.0};  ///< rad
  double sigma_range_rate{0.1};          ///< m/s
};

struct RadarSensorSpec
{
  int id{0};
  Pose2 mount;  ///< vehicle frame
  double fov{150.0 * M_PI / 180.0};
  double max_range{50.0};
  SensorNoise noise;
  int detections_per_target{3};

  SensorMount as_mount() const { return {id, mount, fov, max_range}; }
};

struct ScenarioSpec
{
  std::string name;
  double duration{20.0};
  double dt{0.05};
  Trajectory ego;
  std::vector<TargetObject> targets;
  std::vector<RadarSensorSpec> sensors;
  std::uint64_t seed{0};
  bool noise_enabled{true};
  double clutter_rate{0.0};  ///< expected false alarms per sensor and frame

  /// Number of frames on the dt lattice within [0, duration].
  std::size_t frame_count() const;
  SensorRig rig() const;
  void validate() const;
};

/// Two wheel-mounted short-range radars per side plus a front long-range radar.
std::vector<RadarSensorSpec> default_radar_rig();

/// "simple_road" or "highway"; throws UsageError for anything else.
ScenarioSpec builtin_scenario(std::string_view name);

struct TargetState
{
  int id{0};
  Pose2 pose;
  Vec2 velocity{Vec2::Zero()};
  double length{0.0};
  double width{0.0};
  bool visible{false};
};

struct GroundTruthFrame
{
  double timestamp{0.0};
  EgoState ego;
  std::vector<TargetState> targets;
};

struct SimulationStep
{
  GroundTruthFrame truth;
  std::vector<RadarDetection> detections;
  /// Detections paired with the emitting target id (-1 for clutter).
  std::vector<int> origin;

  SensorFrame sensor_frame() const { return {truth.timestamp, truth.ego, detections}; }
};

/// Deterministic radar scene generator: every step is a pure function of
/// (scenario, seed, step index).
class Simulator
{
public:
  explicit Simulator(ScenarioSpec spec);

  const ScenarioSpec & spec() const { return spec_; }
  std::size_t frame_count() const { return spec_.frame_count(); }

  /// `t` must lie on the dt lattice within [0, duration]; throws UsageError otherwise.
  SimulationStep step(double t) const;
  SimulationStep step_at(std::size_t k) const;

  EgoState ego_state(double t) const;

private:
  ScenarioSpec spec_;
};

/// Raw range rate of a point moving with `point_velocity` as seen by a sensor
/// at `sensor_position` moving with `sensor_velocity`.
double line_of_sight_rate(
  const Vec2 & sensor_position, const Vec2 & sensor_velocity, const Vec2 & point, const Vec2 & point_velocity);

}  // namespace dogm

#endif  // DOGM_SIMULATOR_HPP_
