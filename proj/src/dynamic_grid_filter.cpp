#include "dogm/dynamic_grid_filter.hpp"

#include <algorithm>
#include <thread>

namespace dogm
{

namespace
{

constexpr std::uint64_t kNoiseDomain = 0x6e6f697365ULL;     // "noise"
constexpr std::uint64_t kResampleDomain = 0x726573616dULL;  // "resam"

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn && fn)
{
  if (threads <= 1 || n < 2 * threads) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) {
      break;
    }
    workers.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
}

}  // namespace

void FilterConfig::validate() const
{
  grid.validate();
  filter.validate();
  MeasurementModel check(free_model, static_model);
  if (threads == 0) {
    throw ConfigError("threads must be at least 1");
  }
}

DynamicGridFilter::DynamicGridFilter(const FilterConfig & config, const SensorRig & rig)
: config_(config),
  rig_(rig),
  model_(config.free_model, config.static_model),
  velocity_kernel_(config.filter.sigma_v),
  rng_(hash_combine(config.seed, kResampleDomain))
{
  config_.validate();
}

const GridMap & DynamicGridFilter::map() const
{
  if (!map_) {
    throw UsageError("filter has not processed a frame yet");
  }
  return *map_;
}

void DynamicGridFilter::process(const SensorFrame & frame)
{
  if (!map_) {
    map_.emplace(config_.grid, frame.ego.pose);
  } else {
    const double dt = frame.timestamp - last_timestamp_;
    if (!(dt > 0.0)) {
      throw UsageError("frames must have strictly increasing timestamps");
    }
    last_resample_ = resample(particles_, config_.filter, birth_regions_, rng_);
    if (last_resample_.full_rebirth) {
      ++reset_events_;
    }
    map_->shift_to(frame.ego.pose);
    const CounterStream noise(hash_combine(hash_combine(config_.seed, kNoiseDomain), frames_));
    predict(particles_, dt, config_.filter, noise);
    retire_outside(particles_, *map_);
  }
  last_timestamp_ = frame.timestamp;

  measurements_.clear();
  measurements_.reserve(frame.detections.size());
  for (const auto & det : frame.detections) {
    const auto cart = detection_to_cartesian(det, rig_, frame.ego);
    measurements_.push_back(to_global(cart, rig_.at(det.sensor_id), frame.ego));
  }
  measurement_grid_ = build_measurement_grid(measurements_, *map_, model_, frame.timestamp);

  std::vector<Vec2> positions;
  positions.reserve(measurements_.size());
  for (const auto & m : measurements_) {
    positions.push_back(m.position);
  }
  index_ = SpatialIndex(positions, config_.filter.max_radius);
  update_weights();

  map_->assign_particles(particles_, [](const Particle & p) -> const Vec2 & { return p.position; });
  joint_update(
    *map_, measurement_grid_, particles_, config_.filter.weight_mode, config_.filter.unobserved_mass);

  birth_regions_.clear();
  const double res = config_.grid.resolution_m;
  for (auto c : measurement_grid_.occupied_cells) {
    birth_regions_.push_back({map_->cell_center(c) - Vec2::Constant(0.5 * res), res});
  }
  ++frames_;
}

void DynamicGridFilter::update_weights()
{
  const double eps = config_.filter.epsilon;
  const double radius = config_.filter.max_radius;
  parallel_for(particles_.size(), config_.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Particle & p = particles_[i];
      const auto nn = nearest_measurement(p, index_, measurements_, radius);
      const std::optional<double> dist = nn ? std::optional<double>(nn->distance) : std::nullopt;
      const double w_pos = update_weight_position(p.w_position, dist, model_, eps);
      const double w_vel = update_weight_velocity(p.w_velocity, p.velocity, nn, velocity_kernel_, model_, eps);
      p.w_position = w_pos;
      p.w_velocity = w_vel;
    }
  });
}

std::vector<std::uint32_t> DynamicGridFilter::dynamic_particles(double threshold) const
{
  std::vector<std::uint32_t> out;
  if (!map_) {
    return out;
  }
  const auto cells = map_->cells();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (classify_dynamic(cells[c], threshold)) {
      const auto refs = map_->particle_refs(c);
      out.insert(out.end(), refs.begin(), refs.end());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dogm
