#include "dogm/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace dogm
{

namespace
{

Rgb hsv_to_rgb(double hue, double saturation, double value)
{
  const double h = std::fmod(std::fmod(hue, 360.0) + 360.0, 360.0) / 60.0;
  const double c = value * saturation;
  const double x = c * (1.0 - std::abs(std::fmod(h, 2.0) - 1.0));
  const double m = value - c;
  double r = 0.0, g = 0.0, b = 0.0;
  switch (static_cast<int>(h)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  auto byte = [](double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  return {byte(r + m), byte(g + m), byte(b + m)};
}

}  // namespace

Rgb cell_color(const Cell & cell, const Vec2 & mean_velocity)
{
  if (cell.p_dynamic > cell.p_empty && cell.p_dynamic > cell.p_static) {
    const double hue = std::atan2(mean_velocity.y(), mean_velocity.x()) * 180.0 / M_PI;
    return hsv_to_rgb(hue, 1.0, cell.p_dynamic);
  }
  if (cell.p_empty > cell.p_static) {
    return {255, 255, 255};
  }
  if (cell.p_static > cell.p_empty) {
    return {0, 0, 0};
  }
  return {128, 128, 128};
}

std::vector<Rgb> render_grid(const GridMap & map, std::span<const Particle> particles, WeightMode mode)
{
  const int w = map.cells_x();
  const int h = map.cells_y();
  std::vector<Rgb> pixels(static_cast<std::size_t>(w) * h);
  for (int iy = 0; iy < h; ++iy) {
    for (int ix = 0; ix < w; ++ix) {
      const std::size_t idx = map.linear({ix, iy});
      Vec2 v = Vec2::Zero();
      double total = 0.0;
      for (auto i : map.particle_refs(idx)) {
        const double wgt = resample_weight(particles[i], mode);
        v += wgt * particles[i].velocity;
        total += wgt;
      }
      if (total > 0.0) {
        v /= total;
      }
      pixels[static_cast<std::size_t>(h - 1 - iy) * w + ix] = cell_color(map.cells()[idx], v);
    }
  }
  return pixels;
}

void write_ppm(std::ostream & os, int width, int height, std::span<const Rgb> pixels)
{
  os << "P6\n" << width << ' ' << height << "\n255\n";
  for (const auto & p : pixels) {
    os.write(reinterpret_cast<const char *>(p.data()), 3);
  }
}

}  // namespace dogm
