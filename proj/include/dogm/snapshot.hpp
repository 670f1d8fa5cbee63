#ifndef DOGM_SNAPSHOT_HPP_
#define DOGM_SNAPSHOT_HPP_

#include "dogm/grid.hpp"
#include "dogm/particle_filter.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace dogm
{

using Rgb = std::array<std::uint8_t, 3>;

/// Colour of one cell: white when free dominates, black when static
/// dominates, mid grey for the unknown prior; dynamic cells use the hue of
/// the mean particle heading with value scaled by p_dynamic.
Rgb cell_color(const Cell & cell, const Vec2 & mean_velocity);

/// One RGB pixel per cell, row 0 at the top (largest y).
std::vector<Rgb> render_grid(const GridMap & map, std::span<const Particle> particles, WeightMode mode);

/// Binary PPM (P6).
void write_ppm(std::ostream & os, int width, int height, std::span<const Rgb> pixels);

}  // namespace dogm

#endif  // DOGM_SNAPSHOT_HPP_
