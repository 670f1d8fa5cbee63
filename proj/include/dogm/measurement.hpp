#ifndef DOGM_MEASUREMENT_HPP_
#define DOGM_MEASUREMENT_HPP_

#include "dogm/gaussian.hpp"
#include "dogm/grid.hpp"
#include "dogm/types.hpp"

#include <map>
#include <span>
#include <vector>

namespace dogm
{

/// One radar return in the polar sensor frame. range_rate > 0 means receding.
struct RadarDetection
{
  double timestamp{0.0};
  int sensor_id{0};
  double range{0.0};
  double azimuth{0.0};
  double range_rate{0.0};

  friend bool operator==(const RadarDetection &, const RadarDetection &) = default;
};

/// Mounting of one radar on the vehicle.
struct SensorMount
{
  int id{0};
  Pose2 mount;  ///< vehicle frame
  double fov{M_PI};
  double max_range{50.0};
};

/// Registry of sensor mounts keyed by id.
class SensorRig
{
public:
  SensorRig() = default;
  explicit SensorRig(std::span<const SensorMount> mounts);

  void add(const SensorMount & mount);
  /// Throws ConfigError for an unregistered id.
  const SensorMount & at(int sensor_id) const;
  bool contains(int sensor_id) const { return mounts_.count(sensor_id) != 0; }
  std::vector<SensorMount> mounts() const;

private:
  std::map<int, SensorMount> mounts_;
};

/// Position in the vehicle frame; velocity is the ego-compensated radial
/// velocity projected onto the global-frame line of sight.
struct CartesianMeasurement
{
  Vec2 position{Vec2::Zero()};
  Vec2 velocity{Vec2::Zero()};
};

/// Measurement with everything expressed in the global frame.
struct GlobalMeasurement
{
  Vec2 position{Vec2::Zero()};
  Vec2 velocity{Vec2::Zero()};
  Vec2 sensor_origin{Vec2::Zero()};
};

/// Global-frame velocity of a point rigidly attached to the ego vehicle.
Vec2 mounted_point_velocity(const EgoState & ego, const Vec2 & vehicle_point);

CartesianMeasurement detection_to_cartesian(
  const RadarDetection & det, const SensorRig & rig, const EgoState & ego);

GlobalMeasurement to_global(
  const CartesianMeasurement & m, const SensorMount & sensor, const EgoState & ego);

struct FreeModelParams
{
  double sigma_f{0.5};
  double mu_f{0.0};
};

struct StaticModelParams
{
  Vec3 mu_s{Vec3::Zero()};
  /// Covariance over (distance, v_x, v_y); default diag(0.5 m, 1 m/s, 1 m/s)^2.
  Mat3 sigma_s{Vec3(0.25, 1.0, 1.0).asDiagonal()};
};

/// Inverse sensor model for free and static evidence. Both densities are
/// peak-normalised so every mass stays in [0, 1].
class MeasurementModel
{
public:
  MeasurementModel() : MeasurementModel(FreeModelParams{}, StaticModelParams{}) {}
  MeasurementModel(const FreeModelParams & free, const StaticModelParams & stat);

  const FreeModelParams & free_params() const { return free_; }
  const StaticModelParams & static_params() const { return static_; }

  /// Free-space density f_d, 1 at d = 0.
  double f_d(double d) const { return peak_gaussian(d - free_.mu_f, free_.sigma_f); }
  /// Static density over [d_c, v_x, v_y], 1 at the origin.
  double f_s(const Vec3 & x_s) const { return static_kernel_(x_s); }
  /// Radius around a hit that receives static mass: 3 distance std-devs.
  double static_radius() const { return 3.0 * std::sqrt(static_.sigma_s(0, 0)); }

private:
  FreeModelParams free_;
  StaticModelParams static_;
  PeakGaussian<double, 3> static_kernel_;
};

/// Per-frame evidence from the current detections only.
struct MeasurementGrid
{
  double timestamp{0.0};
  std::vector<double> p_free;
  std::vector<double> p_static;
  /// Linear indices of cells containing at least one detection, ascending.
  std::vector<std::size_t> occupied_cells;
};

MeasurementGrid build_measurement_grid(
  std::span<const GlobalMeasurement> measurements, const GridMap & map, const MeasurementModel & model,
  double timestamp = 0.0);

}  // namespace dogm

#endif  // DOGM_MEASUREMENT_HPP_
