#ifndef DOGM_PARTICLE_FILTER_HPP_
#define DOGM_PARTICLE_FILTER_HPP_

#include "dogm/counter_rng.hpp"
#include "dogm/gaussian.hpp"
#include "dogm/grid.hpp"
#include "dogm/measurement.hpp"
#include "dogm/spatial_index.hpp"
#include "dogm/types.hpp"

#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dogm
{

/// Which weight drives resampling.
enum class WeightMode { position, velocity, dual };

std::string_view to_string(WeightMode mode);
/// Accepts "position", "velocity" or "dual"; throws UsageError otherwise.
WeightMode parse_weight_mode(std::string_view name);

/// Dynamic-occupancy hypothesis. Position is global; both weights are kept
/// up to date regardless of which one drives resampling.
struct Particle
{
  Vec2 position{Vec2::Zero()};
  Vec2 velocity{Vec2::Zero()};
  double w_position{0.0};
  double w_velocity{0.0};

  friend bool operator==(const Particle &, const Particle &) = default;
};

struct FilterParams
{
  std::size_t particle_count{10000};
  double epsilon{0.1};             ///< per-frame decay of the prior weight
  double process_noise_pos{0.1};   ///< m
  double process_noise_vel{0.4};   ///< m/s
  Mat2 sigma_v{Mat2::Identity()};  ///< (m/s)^2
  double birth_fraction{0.1};
  double v_init_max{40.0};         ///< m/s
  double max_radius{5.0};          ///< nearest-neighbour search radius, m
  WeightMode weight_mode{WeightMode::dual};
  double unobserved_mass{1.0};     ///< free+static evidence of cells no measurement touched

  void validate() const;
};

/// Position law: f_d * (1 - eps) * w_prev.
inline double position_weight_law(double f_d, double epsilon, double w_prev)
{
  return f_d * (1.0 - epsilon) * w_prev;
}

/// Velocity law read as a convex blend of update and prior:
/// f_d * f_v + (1 - f_d) * (1 - eps) * w_prev.
inline double velocity_weight_law(double f_d, double f_v, double epsilon, double w_prev)
{
  return f_d * f_v + (1.0 - f_d) * (1.0 - epsilon) * w_prev;
}

/// Position weight after one frame; an empty `nn_distance` means no
/// measurement within range, leaving pure decay.
double update_weight_position(
  double w_prev, std::optional<double> nn_distance, const MeasurementModel & model, double epsilon);

/// The nearest measurement as seen by one particle.
struct NearestMeasurement
{
  std::size_t index{0};
  double distance{0.0};
  Vec2 velocity{Vec2::Zero()};
};

/// Velocity weight after one frame. `velocity_kernel` is the zero-mean
/// velocity likelihood with covariance sigma_v; it is evaluated at the
/// difference between particle and measured velocity.
double update_weight_velocity(
  double w_prev, const Vec2 & particle_velocity, const std::optional<NearestMeasurement> & nn,
  const PeakGaussian<double, 2> & velocity_kernel, const MeasurementModel & model, double epsilon);

/// Weight used for resampling: the selected law, or the max of both in dual mode.
inline double resample_weight(const Particle & p, WeightMode mode)
{
  switch (mode) {
    case WeightMode::position:
      return p.w_position;
    case WeightMode::velocity:
      return p.w_velocity;
    case WeightMode::dual:
      break;
  }
  return std::max(p.w_position, p.w_velocity);
}

std::optional<NearestMeasurement> nearest_measurement(
  const Particle & p, const SpatialIndex & index, std::span<const GlobalMeasurement> measurements,
  double max_radius);

/// Constant-velocity motion with additive Gaussian noise. Noise for particle i
/// is drawn from `noise` at counter i, so the result does not depend on how
/// the loop is split across threads.
void predict(std::span<Particle> particles, double dt, const FilterParams & params, const CounterStream & noise);

/// Removes particles that left the map; returns how many were retired.
std::size_t retire_outside(std::vector<Particle> & particles, const GridMap & map);

/// Square area where newborn particles may be placed (one grid cell).
struct BirthRegion
{
  Vec2 lower_left{Vec2::Zero()};
  double size{0.0};
};

struct ResampleStats
{
  std::size_t survivors{0};
  std::size_t births{0};
  double reset_weight{0.0};
  bool full_rebirth{false};
};

/// Systematic resampling on the mode's resample weight into
/// (1 - birth_fraction) * particle_count slots, plus births in randomly chosen
/// birth regions. Every resulting particle gets both weights set to
/// total_weight / particle_count, or 1 / particle_count after a full rebirth.
/// Without birth regions all slots are resampled; with neither usable weight
/// nor birth regions the population is emptied.
ResampleStats resample(
  std::vector<Particle> & particles, const FilterParams & params, std::span<const BirthRegion> birth_regions,
  std::mt19937_64 & rng);

}  // namespace dogm

#endif  // DOGM_PARTICLE_FILTER_HPP_
