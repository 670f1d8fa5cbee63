#include "dogm/measurement.hpp"

#include "dogm/ray_trace.hpp"

#include <algorithm>
#include <cmath>

namespace dogm
{

SensorRig::SensorRig(std::span<const SensorMount> mounts)
{
  for (const auto & m : mounts) {
    add(m);
  }
}

void SensorRig::add(const SensorMount & mount)
{
  if (!mount.mount.is_finite()) {
    throw ConfigError("sensor " + std::to_string(mount.id) + ": mount pose must be finite");
  }
  if (!(mount.fov > 0.0 && mount.fov <= 2.0 * M_PI + 1e-12)) {
    throw ConfigError("sensor " + std::to_string(mount.id) + ": fov must be in (0, 2pi]");
  }
  if (!(mount.max_range > 0.0)) {
    throw ConfigError("sensor " + std::to_string(mount.id) + ": max_range must be positive");
  }
  if (!mounts_.emplace(mount.id, mount).second) {
    throw ConfigError("sensor " + std::to_string(mount.id) + " registered twice");
  }
}

const SensorMount & SensorRig::at(int sensor_id) const
{
  auto it = mounts_.find(sensor_id);
  if (it == mounts_.end()) {
    throw ConfigError("unknown sensor_id " + std::to_string(sensor_id));
  }
  return it->second;
}

std::vector<SensorMount> SensorRig::mounts() const
{
  std::vector<SensorMount> out;
  out.reserve(mounts_.size());
  for (const auto & [id, m] : mounts_) {
    out.push_back(m);
  }
  return out;
}

Vec2 mounted_point_velocity(const EgoState & ego, const Vec2 & vehicle_point)
{
  const Vec2 r = ego.pose.rotate(vehicle_point);
  return ego.velocity + ego.yaw_rate * Vec2(-r.y(), r.x());
}

CartesianMeasurement detection_to_cartesian(
  const RadarDetection & det, const SensorRig & rig, const EgoState & ego)
{
  const SensorMount & sensor = rig.at(det.sensor_id);
  const Vec2 beam_sensor(std::cos(det.azimuth), std::sin(det.azimuth));
  const Vec2 beam_vehicle = sensor.mount.rotate(beam_sensor);
  const Vec2 los_global = ego.pose.rotate(beam_vehicle);

  CartesianMeasurement m;
  m.position = sensor.mount.position() + det.range * beam_vehicle;
  // Raw range rate is relative to the moving sensor; adding back the sensor's
  // own line-of-sight speed leaves the target's radial speed over ground.
  const Vec2 sensor_velocity = mounted_point_velocity(ego, sensor.mount.position());
  const double compensated = det.range_rate + sensor_velocity.dot(los_global);
  m.velocity = compensated * los_global;
  return m;
}

GlobalMeasurement to_global(const CartesianMeasurement & m, const SensorMount & sensor, const EgoState & ego)
{
  GlobalMeasurement g;
  g.position = ego.pose.transform(m.position);
  g.velocity = m.velocity;
  g.sensor_origin = ego.pose.transform(sensor.mount.position());
  return g;
}

MeasurementModel::MeasurementModel(const FreeModelParams & free, const StaticModelParams & stat)
: free_(free), static_(stat), static_kernel_(stat.sigma_s, stat.mu_s)
{
  if (!(free.sigma_f > 0.0) || !std::isfinite(free.sigma_f)) {
    throw ConfigError("measurement.sigma_f must be positive");
  }
  if (free.mu_f != 0.0) {
    throw ConfigError("measurement.mu_f must be 0");
  }
  if (!stat.mu_s.isZero()) {
    throw ConfigError("measurement.mu_s must be zero");
  }
}

MeasurementGrid build_measurement_grid(
  std::span<const GlobalMeasurement> measurements, const GridMap & map, const MeasurementModel & model,
  double timestamp)
{
  MeasurementGrid grid;
  grid.timestamp = timestamp;
  grid.p_free.assign(map.size(), 0.0);
  grid.p_static.assign(map.size(), 0.0);

  const int nx = map.cells_x();
  const int ny = map.cells_y();
  const double res = map.spec().resolution_m;
  const Vec2 lower_left = map.lower_left();
  const double radius = model.static_radius();
  const int radius_cells = static_cast<int>(std::ceil(radius / res));
  auto center_of = [&](int ix, int iy) { return Vec2(lower_left.x() + (ix + 0.5) * res, lower_left.y() + (iy + 0.5) * res); };

  for (const auto & m : measurements) {
    bool entered = false;
    traverse_cells(map.to_cell_units(m.sensor_origin), map.to_cell_units(m.position), [&](const CellIndex & c) {
      const bool inside = c.ix >= 0 && c.iy >= 0 && c.ix < nx && c.iy < ny;
      if (!inside) {
        return !entered;
      }
      entered = true;
      const std::size_t idx = map.linear(c);
      const double d_c = (center_of(c.ix, c.iy) - m.position).norm();
      grid.p_free[idx] = std::max(grid.p_free[idx], 1.0 - model.f_d(d_c));
      return true;
    });

    const Vec2 hit = map.to_cell_units(m.position);
    const int hx = static_cast<int>(std::floor(hit.x()));
    const int hy = static_cast<int>(std::floor(hit.y()));
    if (hx >= 0 && hy >= 0 && hx < nx && hy < ny) {
      grid.occupied_cells.push_back(map.linear({hx, hy}));
    }
    for (int iy = std::max(0, hy - radius_cells); iy <= std::min(ny - 1, hy + radius_cells); ++iy) {
      for (int ix = std::max(0, hx - radius_cells); ix <= std::min(nx - 1, hx + radius_cells); ++ix) {
        const double d_c = (center_of(ix, iy) - m.position).norm();
        if (d_c > radius) {
          continue;
        }
        const std::size_t idx = map.linear({ix, iy});
        const double p = model.f_s(Vec3(d_c, m.velocity.x(), m.velocity.y()));
        grid.p_static[idx] = std::max(grid.p_static[idx], p);
      }
    }
  }
  std::sort(grid.occupied_cells.begin(), grid.occupied_cells.end());
  grid.occupied_cells.erase(std::unique(grid.occupied_cells.begin(), grid.occupied_cells.end()), grid.occupied_cells.end());
  return grid;
}

}  // namespace dogm
