#include "dogm/particle_filter.hpp"

#include <algorithm>
#include <cmath>

namespace dogm
{

std::string_view to_string(WeightMode mode)
{
  switch (mode) {
    case WeightMode::position:
      return "position";
    case WeightMode::velocity:
      return "velocity";
    case WeightMode::dual:
      return "dual";
  }
  return "dual";
}

WeightMode parse_weight_mode(std::string_view name)
{
  if (name == "position") {
    return WeightMode::position;
  }
  if (name == "velocity") {
    return WeightMode::velocity;
  }
  if (name == "dual") {
    return WeightMode::dual;
  }
  throw UsageError("unknown weight mode '" + std::string(name) + "'");
}

void FilterParams::validate() const
{
  if (particle_count == 0) {
    throw ConfigError("filter.particle_count must be positive");
  }
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw ConfigError("filter.epsilon must be in [0, 1)");
  }
  if (!(process_noise_pos >= 0.0) || !(process_noise_vel >= 0.0)) {
    throw ConfigError("filter.process_noise_pos/vel must be non-negative");
  }
  if (!(birth_fraction >= 0.0 && birth_fraction <= 1.0)) {
    throw ConfigError("filter.birth_fraction must be in [0, 1]");
  }
  if (!(v_init_max >= 0.0)) {
    throw ConfigError("filter.v_init_max must be non-negative");
  }
  if (!(max_radius > 0.0)) {
    throw ConfigError("filter.max_radius must be positive");
  }
  if (!(unobserved_mass >= 0.0) || !std::isfinite(unobserved_mass)) {
    throw ConfigError("filter.unobserved_mass must be non-negative");
  }
  try {
    PeakGaussian<double, 2> check(sigma_v);
  } catch (const ConfigError & e) {
    throw ConfigError(std::string("filter.sigma_v: ") + e.what());
  }
}

double update_weight_position(
  double w_prev, std::optional<double> nn_distance, const MeasurementModel & model, double epsilon)
{
  if (!nn_distance) {
    return (1.0 - epsilon) * w_prev;
  }
  return position_weight_law(model.f_d(*nn_distance), epsilon, w_prev);
}

double update_weight_velocity(
  double w_prev, const Vec2 & particle_velocity, const std::optional<NearestMeasurement> & nn,
  const PeakGaussian<double, 2> & velocity_kernel, const MeasurementModel & model, double epsilon)
{
  if (!nn) {
    return (1.0 - epsilon) * w_prev;
  }
  const double f_v = velocity_kernel(particle_velocity - nn->velocity);
  return velocity_weight_law(model.f_d(nn->distance), f_v, epsilon, w_prev);
}

std::optional<NearestMeasurement> nearest_measurement(
  const Particle & p, const SpatialIndex & index, std::span<const GlobalMeasurement> measurements,
  double max_radius)
{
  auto nn = index.nearest(p.position, max_radius);
  if (!nn) {
    return std::nullopt;
  }
  return NearestMeasurement{nn->index, nn->distance, measurements[nn->index].velocity};
}

void predict(std::span<Particle> particles, double dt, const FilterParams & params, const CounterStream & noise)
{
  if (!(dt > 0.0)) {
    throw UsageError("predict: dt must be positive");
  }
  for (std::size_t i = 0; i < particles.size(); ++i) {
    Particle & p = particles[i];
    double n0 = 0.0, n1 = 0.0, n2 = 0.0, n3 = 0.0;
    noise.normal_pair(2 * i, n0, n1);
    noise.normal_pair(2 * i + 1, n2, n3);
    p.position += p.velocity * dt + params.process_noise_pos * Vec2(n0, n1);
    p.velocity += params.process_noise_vel * Vec2(n2, n3);
  }
}

std::size_t retire_outside(std::vector<Particle> & particles, const GridMap & map)
{
  const std::size_t before = particles.size();
  std::erase_if(particles, [&](const Particle & p) { return !map.cell_of(p.position).has_value(); });
  return before - particles.size();
}

ResampleStats resample(
  std::vector<Particle> & particles, const FilterParams & params, std::span<const BirthRegion> birth_regions,
  std::mt19937_64 & rng)
{
  const std::size_t n = params.particle_count;
  ResampleStats stats;

  std::vector<double> cumulative(particles.size());
  double total = 0.0;
  for (std::size_t i = 0; i < particles.size(); ++i) {
    total += resample_weight(particles[i], params.weight_mode);
    cumulative[i] = total;
  }
  const bool usable = total > 0.0 && std::isfinite(total);

  std::size_t births = 0;
  if (!birth_regions.empty()) {
    births = usable ? static_cast<std::size_t>(std::llround(params.birth_fraction * static_cast<double>(n))) : n;
    births = std::min(births, n);
  }
  const std::size_t slots = usable ? n - births : 0;
  stats.full_rebirth = !usable;
  stats.reset_weight = usable ? total / static_cast<double>(n) : 1.0 / static_cast<double>(n);

  std::vector<Particle> next;
  next.reserve(slots + births);
  if (slots > 0) {
    std::uniform_real_distribution<double> offset(0.0, 1.0);
    const double start = offset(rng);
    std::size_t i = 0;
    for (std::size_t k = 0; k < slots; ++k) {
      const double u = (static_cast<double>(k) + start) / static_cast<double>(slots) * total;
      while (i + 1 < particles.size() && u >= cumulative[i]) {
        ++i;
      }
      next.push_back(particles[i]);
    }
  }
  if (births > 0) {
    std::uniform_int_distribution<std::size_t> pick(0, birth_regions.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> speed(-params.v_init_max, params.v_init_max);
    for (std::size_t k = 0; k < births; ++k) {
      const BirthRegion & r = birth_regions[pick(rng)];
      Particle p;
      const double ux = unit(rng);
      const double uy = unit(rng);
      p.position = r.lower_left + r.size * Vec2(ux, uy);
      const double vx = speed(rng);
      const double vy = speed(rng);
      p.velocity = Vec2(vx, vy);
      next.push_back(p);
    }
  }
  for (auto & p : next) {
    p.w_position = stats.reset_weight;
    p.w_velocity = stats.reset_weight;
  }
  stats.survivors = slots;
  stats.births = births;
  particles = std::move(next);
  return stats;
}

}  // namespace dogm
