#ifndef DOGM_GRID_HPP_
#define DOGM_GRID_HPP_

#include "dogm/types.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace dogm
{

/// Geometry of the ego-centred map. The map is axis-aligned with the global
/// frame; origin_offset is where the ego sits, measured from the map's
/// lower-left corner.
struct GridSpec
{
  double length_m{200.0};
  double width_m{25.0};
  double resolution_m{0.5};
  Vec2 origin_offset{100.0, 12.5};

  /// Spec with the ego at the map centre.
  static GridSpec centered(double length_m, double width_m, double resolution_m);

  int cells_x() const;
  int cells_y() const;
  std::size_t cell_count() const { return static_cast<std::size_t>(cells_x()) * cells_y(); }

  /// Throws ConfigError unless the extents are positive multiples of the resolution.
  void validate() const;
};

struct CellIndex
{
  int ix{0};
  int iy{0};

  friend bool operator==(const CellIndex &, const CellIndex &) = default;
};

/// Cell containing `pos` (ego frame, metres). Cells are half-open [lo, hi).
std::optional<CellIndex> world_to_cell(const Vec2 & pos, const GridSpec & spec);

/// Centre of a cell in the ego frame.
Vec2 cell_to_world(const CellIndex & cell, const GridSpec & spec);

/// Tri-state masses of one cell: free, static occupied, dynamic occupied.
struct Cell
{
  double p_empty{0.5};
  double p_static{0.5};
  double p_dynamic{0.0};

  static Cell unknown() { return {}; }
};

class GridMap
{
public:
  GridMap(const GridSpec & spec, const Pose2 & ego_pose);

  const GridSpec & spec() const { return spec_; }
  const Pose2 & ego_pose() const { return ego_pose_; }
  int cells_x() const { return cells_x_; }
  int cells_y() const { return cells_y_; }
  std::size_t size() const { return cells_.size(); }

  std::size_t linear(const CellIndex & c) const { return static_cast<std::size_t>(c.iy) * cells_x_ + c.ix; }
  CellIndex unravel(std::size_t linear) const
  {
    return {static_cast<int>(linear % cells_x_), static_cast<int>(linear / cells_x_)};
  }

  Cell & cell(const CellIndex & c) { return cells_[linear(c)]; }
  const Cell & cell(const CellIndex & c) const { return cells_[linear(c)]; }
  std::span<Cell> cells() { return cells_; }
  std::span<const Cell> cells() const { return cells_; }

  /// Global position of the ego-frame origin used for indexing. Always an
  /// integer number of cells away from the initial ego position.
  Vec2 anchor() const;
  /// Sub-cell ego displacement not yet applied to the cells, in [0, resolution).
  Vec2 residual() const { return ego_pose_.position() - anchor(); }
  /// Global position of the lower-left map corner.
  Vec2 lower_left() const { return anchor() - spec_.origin_offset; }

  std::optional<std::size_t> cell_of(const Vec2 & global) const;
  Vec2 cell_center(std::size_t linear) const;
  /// Global position expressed in continuous cell units (cell (i, j) spans [i, i+1) x [j, j+1)).
  Vec2 to_cell_units(const Vec2 & global) const { return (global - lower_left()) / spec_.resolution_m; }

  /// Recentres the map on a new ego pose. Cell contents move by the
  /// integer-cell part of the displacement; cells entering at the leading
  /// edge get the unknown prior. Particle references are invalidated.
  void shift_to(const Pose2 & new_ego_pose);

  /// Rebuilds the per-cell particle lists. `position_of(p)` yields a global
  /// position; particles outside the map are left unreferenced.
  template <typename Range, typename Projection>
  void assign_particles(const Range & particles, Projection position_of);

  std::span<const std::uint32_t> particle_refs(std::size_t linear) const
  {
    if (ref_offsets_.empty()) {
      return {};
    }
    return std::span<const std::uint32_t>(ref_indices_).subspan(
      ref_offsets_[linear], ref_offsets_[linear + 1] - ref_offsets_[linear]);
  }

private:
  GridSpec spec_;
  int cells_x_;
  int cells_y_;
  Pose2 ego_pose_;
  Vec2 initial_position_;
  Eigen::Vector2i anchor_cells_{Eigen::Vector2i::Zero()};
  std::vector<Cell> cells_;
  // Particle references as compressed rows: cell c owns indices [offsets[c], offsets[c+1]).
  std::vector<std::uint32_t> ref_offsets_;
  std::vector<std::uint32_t> ref_indices_;
};

/// Value-returning form of GridMap::shift_to.
GridMap shift_grid(GridMap map, const Pose2 & new_ego_pose);

template <typename Range, typename Projection>
void GridMap::assign_particles(const Range & particles, Projection position_of)
{
  const std::size_t n = std::size(particles);
  std::vector<std::int64_t> cell_of_particle(n, -1);
  ref_offsets_.assign(cells_.size() + 1, 0);
  std::size_t i = 0;
  for (const auto & p : particles) {
    if (auto c = cell_of(position_of(p))) {
      cell_of_particle[i] = static_cast<std::int64_t>(*c);
      ++ref_offsets_[*c + 1];
    }
    ++i;
  }
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    ref_offsets_[c + 1] += ref_offsets_[c];
  }
  ref_indices_.assign(ref_offsets_.back(), 0);
  std::vector<std::uint32_t> cursor(ref_offsets_.begin(), ref_offsets_.end() - 1);
  for (std::size_t k = 0; k < n; ++k) {
    if (cell_of_particle[k] >= 0) {
      ref_indices_[cursor[cell_of_particle[k]]++] = static_cast<std::uint32_t>(k);
    }
  }
}

}  // namespace dogm

#endif  // DOGM_GRID_HPP_
