#ifndef DOGM_DYNAMIC_GRID_FILTER_HPP_
#define DOGM_DYNAMIC_GRID_FILTER_HPP_

#include "dogm/grid.hpp"
#include "dogm/joint_update.hpp"
#include "dogm/measurement.hpp"
#include "dogm/particle_filter.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace dogm
{

/// Everything the filter needs from one sensor cycle.
struct SensorFrame
{
  double timestamp{0.0};
  EgoState ego;
  std::vector<RadarDetection> detections;
};

struct FilterConfig
{
  GridSpec grid;
  FilterParams filter;
  FreeModelParams free_model;
  StaticModelParams static_model;
  std::uint64_t seed{0};
  unsigned threads{1};

  void validate() const;
};

/// Per-frame pipeline of the dual-weight dynamic grid.
///
/// Each call to process() runs, in order: resampling and births from the
/// previous frame's evidence, grid recentring, constant-velocity prediction,
/// measurement grid construction, the weight updates for both laws, and the
/// joint normalisation. Between calls the grid is normalised and the
/// resample weights of each cell's particles sum to its dynamic mass.
class DynamicGridFilter
{
public:
  DynamicGridFilter(const FilterConfig & config, const SensorRig & rig);

  void process(const SensorFrame & frame);

  const FilterConfig & config() const { return config_; }
  const MeasurementModel & model() const { return model_; }
  std::size_t frame_count() const { return frames_; }

  /// Throws UsageError before the first frame.
  const GridMap & map() const;
  std::span<const Particle> particles() const { return particles_; }
  const MeasurementGrid & measurement_grid() const { return measurement_grid_; }
  std::span<const GlobalMeasurement> measurements() const { return measurements_; }
  const ResampleStats & last_resample() const { return last_resample_; }
  /// Frames on which resampling found no usable weight and reseeded everything.
  std::size_t reset_events() const { return reset_events_; }

  /// Indices of particles sitting in cells classified dynamic, ascending.
  std::vector<std::uint32_t> dynamic_particles(double threshold = kDynamicThreshold) const;

private:
  void update_weights();

  FilterConfig config_;
  SensorRig rig_;
  MeasurementModel model_;
  PeakGaussian<double, 2> velocity_kernel_;
  std::mt19937_64 rng_;

  std::optional<GridMap> map_;
  std::vector<Particle> particles_;
  std::vector<GlobalMeasurement> measurements_;
  MeasurementGrid measurement_grid_;
  SpatialIndex index_;
  std::vector<BirthRegion> birth_regions_;
  ResampleStats last_resample_;
  std::size_t frames_{0};
  std::size_t reset_events_{0};
  double last_timestamp_{0.0};
};

}  // namespace dogm

#endif  // DOGM_DYNAMIC_GRID_FILTER_HPP_
