#include "dogm/joint_update.hpp"

namespace dogm
{

Cell normalize_cell(const CellEvidence & e)
{
  const double q = e.p_free_meas + e.p_static_meas + e.particle_weight_sum;
  if (!(q > 0.0)) {
    return Cell::unknown();
  }
  return {e.p_free_meas / q, e.p_static_meas / q, e.particle_weight_sum / q};
}

void scale_particle_weights_to_cell(
  std::span<Particle> particles, std::span<const std::uint32_t> refs, double p_dynamic, WeightMode mode)
{
  double sum = 0.0;
  for (auto i : refs) {
    sum += resample_weight(particles[i], mode);
  }
  if (!(sum > 0.0)) {
    return;
  }
  const double factor = p_dynamic / sum;
  for (auto i : refs) {
    particles[i].w_position *= factor;
    particles[i].w_velocity *= factor;
  }
}

void joint_update(
  GridMap & map, const MeasurementGrid & meas, std::span<Particle> particles, WeightMode mode, double unobserved_mass)
{
  auto cells = map.cells();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto refs = map.particle_refs(c);
    CellEvidence e{meas.p_free[c], meas.p_static[c], 0.0};
    if (e.p_free_meas == 0.0 && e.p_static_meas == 0.0) {
      e.p_free_meas = 0.5 * unobserved_mass;
      e.p_static_meas = 0.5 * unobserved_mass;
    }
    for (auto i : refs) {
      e.particle_weight_sum += resample_weight(particles[i], mode);
    }
    cells[c] = normalize_cell(e);
    scale_particle_weights_to_cell(particles, refs, cells[c].p_dynamic, mode);
  }
}

}  // namespace dogm
