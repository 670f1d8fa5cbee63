#ifndef DOGM_JOINT_UPDATE_HPP_
#define DOGM_JOINT_UPDATE_HPP_

#include "dogm/grid.hpp"
#include "dogm/measurement.hpp"
#include "dogm/particle_filter.hpp"

#include <cstdint>
#include <span>

namespace dogm
{

/// Unnormalised evidence for one cell.
struct CellEvidence
{
  double p_free_meas{0.0};
  double p_static_meas{0.0};
  double particle_weight_sum{0.0};
};

/// Divides every component by q = free + static + sum(w). q = 0 yields the unknown prior.
Cell normalize_cell(const CellEvidence & e);

inline constexpr double kDynamicThreshold = 0.6;

/// Strictly greater than the threshold.
inline bool classify_dynamic(const Cell & cell, double threshold = kDynamicThreshold)
{
  return cell.p_dynamic > threshold;
}

/// Scales both weights of the referenced particles by p_dynamic / sum of
/// their resample weights so that the resample weights sum to p_dynamic.
/// No-op when the sum is zero.
void scale_particle_weights_to_cell(
  std::span<Particle> particles, std::span<const std::uint32_t> refs, double p_dynamic, WeightMode mode);

/// Normalises every cell of `map` from the measurement grid and the particles
/// currently referenced by the map, then rescales the particle weights.
/// Cells no measurement touched this frame take `unobserved_mass` of evidence
/// split evenly between free and static; 0 leaves them without evidence.
/// Requires map.assign_particles() on `particles` beforehand.
void joint_update(
  GridMap & map, const MeasurementGrid & meas, std::span<Particle> particles, WeightMode mode,
  double unobserved_mass = 0.0);

}  // namespace dogm

#endif  // DOGM_JOINT_UPDATE_HPP_
