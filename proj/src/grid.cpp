#include "dogm/grid.hpp"

#include <algorithm>
#include <cmath>

namespace dogm
{

namespace
{

int cells_along(double extent, double resolution)
{
  return static_cast<int>(std::llround(extent / resolution));
}

// Tolerance for positions that land on a cell boundary up to rounding.
constexpr double kBoundaryEps = 1e-9;

}  // namespace

GridSpec GridSpec::centered(double length_m, double width_m, double resolution_m)
{
  GridSpec s;
  s.length_m = length_m;
  s.width_m = width_m;
  s.resolution_m = resolution_m;
  s.origin_offset = Vec2(length_m / 2.0, width_m / 2.0);
  return s;
}

int GridSpec::cells_x() const { return cells_along(length_m, resolution_m); }
int GridSpec::cells_y() const { return cells_along(width_m, resolution_m); }

void GridSpec::validate() const
{
  if (!(resolution_m > 0.0) || !std::isfinite(resolution_m)) {
    throw ConfigError("grid.resolution_m must be positive");
  }
  auto check = [&](double extent, const char * key) {
    const double ratio = extent / resolution_m;
    if (!(extent > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
      throw ConfigError(std::string(key) + " must be a positive multiple of grid.resolution_m");
    }
  };
  check(length_m, "grid.length_m");
  check(width_m, "grid.width_m");
  if (!origin_offset.allFinite()) {
    throw ConfigError("grid.origin_offset must be finite");
  }
}

std::optional<CellIndex> world_to_cell(const Vec2 & pos, const GridSpec & spec)
{
  const double fx = (pos.x() + spec.origin_offset.x()) / spec.resolution_m;
  const double fy = (pos.y() + spec.origin_offset.y()) / spec.resolution_m;
  if (!std::isfinite(fx) || !std::isfinite(fy)) {
    return std::nullopt;
  }
  const double ix = std::floor(fx);
  const double iy = std::floor(fy);
  if (ix < 0.0 || iy < 0.0 || ix >= spec.cells_x() || iy >= spec.cells_y()) {
    return std::nullopt;
  }
  return CellIndex{static_cast<int>(ix), static_cast<int>(iy)};
}

Vec2 cell_to_world(const CellIndex & cell, const GridSpec & spec)
{
  return Vec2((cell.ix + 0.5) * spec.resolution_m, (cell.iy + 0.5) * spec.resolution_m) - spec.origin_offset;
}

GridMap::GridMap(const GridSpec & spec, const Pose2 & ego_pose)
: spec_(spec),
  cells_x_(spec.cells_x()),
  cells_y_(spec.cells_y()),
  ego_pose_(ego_pose),
  initial_position_(ego_pose.position())
{
  spec_.validate();
  if (!ego_pose.is_finite()) {
    throw ConfigError("initial ego pose must be finite");
  }
  cells_.assign(spec_.cell_count(), Cell::unknown());
}

Vec2 GridMap::anchor() const
{
  return initial_position_ + anchor_cells_.cast<double>() * spec_.resolution_m;
}

std::optional<std::size_t> GridMap::cell_of(const Vec2 & global) const
{
  if (auto c = world_to_cell(global - anchor(), spec_)) {
    return linear(*c);
  }
  return std::nullopt;
}

Vec2 GridMap::cell_center(std::size_t idx) const
{
  return anchor() + cell_to_world(unravel(idx), spec_);
}

void GridMap::shift_to(const Pose2 & new_ego_pose)
{
  if (!new_ego_pose.is_finite()) {
    throw UsageError("shift_grid: ego pose must be finite");
  }
  const Vec2 travelled = (new_ego_pose.position() - initial_position_) / spec_.resolution_m;
  const Eigen::Vector2i target(
    static_cast<int>(std::floor(travelled.x() + kBoundaryEps)),
    static_cast<int>(std::floor(travelled.y() + kBoundaryEps)));
  const Eigen::Vector2i shift = target - anchor_cells_;
  ego_pose_ = new_ego_pose;
  if (shift.isZero()) {
    return;
  }
  anchor_cells_ = target;

  std::vector<Cell> moved(cells_.size(), Cell::unknown());
  for (int iy = 0; iy < cells_y_; ++iy) {
    const int sy = iy + shift.y();
    if (sy < 0 || sy >= cells_y_) {
      continue;
    }
    for (int ix = 0; ix < cells_x_; ++ix) {
      const int sx = ix + shift.x();
      if (sx < 0 || sx >= cells_x_) {
        continue;
      }
      moved[linear({ix, iy})] = cells_[linear({sx, sy})];
    }
  }
  cells_ = std::move(moved);
  ref_offsets_.clear();
  ref_indices_.clear();
}

GridMap shift_grid(GridMap map, const Pose2 & new_ego_pose)
{
  map.shift_to(new_ego_pose);
  return map;
}

}  // namespace dogm
