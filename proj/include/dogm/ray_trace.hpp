#ifndef DOGM_RAY_TRACE_HPP_
#define DOGM_RAY_TRACE_HPP_

#include "dogm/grid.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

namespace dogm
{

/// Walks the cells crossed by the segment from -> to (continuous cell units,
/// cell (i, j) spans [i, i+1) x [j, j+1)), in order, stopping before the cell
/// containing `to`. A segment passing exactly through a lattice corner steps
/// diagonally: the two side cells only touch it at a point.
///
/// `visit(CellIndex)` returns false to stop early.
template <typename Visitor>
void traverse_cells(const Vec2 & from, const Vec2 & to, Visitor && visit)
{
  CellIndex cell{static_cast<int>(std::floor(from.x())), static_cast<int>(std::floor(from.y()))};
  const CellIndex last{static_cast<int>(std::floor(to.x())), static_cast<int>(std::floor(to.y()))};
  const Vec2 dir = to - from;
  const int step_x = dir.x() > 0.0 ? 1 : (dir.x() < 0.0 ? -1 : 0);
  const int step_y = dir.y() > 0.0 ? 1 : (dir.y() < 0.0 ? -1 : 0);

  constexpr double inf = std::numeric_limits<double>::infinity();
  const double delta_x = step_x != 0 ? 1.0 / std::abs(dir.x()) : inf;
  const double delta_y = step_y != 0 ? 1.0 / std::abs(dir.y()) : inf;
  double t_max_x = inf;
  double t_max_y = inf;
  if (step_x > 0) {
    t_max_x = (cell.ix + 1.0 - from.x()) * delta_x;
  } else if (step_x < 0) {
    t_max_x = (from.x() - cell.ix) * delta_x;
  }
  if (step_y > 0) {
    t_max_y = (cell.iy + 1.0 - from.y()) * delta_y;
  } else if (step_y < 0) {
    t_max_y = (from.y() - cell.iy) * delta_y;
  }

  // Upper bound on the number of cells, guards against rounding at the end cell.
  const long budget = std::labs(last.ix - cell.ix) + std::labs(last.iy - cell.iy) + 1;
  constexpr double tie = 1e-12;
  for (long n = 0; n <= budget; ++n) {
    if (cell == last) {
      return;
    }
    if (!visit(cell)) {
      return;
    }
    if (std::abs(t_max_x - t_max_y) <= tie * std::max(1.0, t_max_x)) {
      if (t_max_x > 1.0) {
        return;
      }
      cell.ix += step_x;
      cell.iy += step_y;
      t_max_x += delta_x;
      t_max_y += delta_y;
    } else if (t_max_x < t_max_y) {
      if (t_max_x > 1.0) {
        return;
      }
      cell.ix += step_x;
      t_max_x += delta_x;
    } else {
      if (t_max_y > 1.0) {
        return;
      }
      cell.iy += step_y;
      t_max_y += delta_y;
    }
  }
}

/// Cells crossed by the segment, excluding the cell that contains `hit`.
inline std::vector<CellIndex> trace_ray(const Vec2 & sensor_origin, const Vec2 & hit)
{
  std::vector<CellIndex> cells;
  traverse_cells(sensor_origin, hit, [&](const CellIndex & c) {
    cells.push_back(c);
    return true;
  });
  return cells;
}

}  // namespace dogm

#endif  // DOGM_RAY_TRACE_HPP_
