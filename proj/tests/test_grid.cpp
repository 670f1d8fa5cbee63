#include "dogm/grid.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace dogm;

namespace
{

// Scalar reference for the half-open cell rule.
std::optional<CellIndex> reference_cell(double x, double y, const GridSpec & s)
{
  const double fx = (x + s.origin_offset.x()) / s.resolution_m;
  const double fy = (y + s.origin_offset.y()) / s.resolution_m;
  long ix = static_cast<long>(fx);
  long iy = static_cast<long>(fy);
  if (fx < ix) {
    --ix;
  }
  if (fy < iy) {
    --iy;
  }
  if (fx < 0 || fy < 0 || ix >= s.cells_x() || iy >= s.cells_y()) {
    return std::nullopt;
  }
  return CellIndex{static_cast<int>(ix), static_cast<int>(iy)};
}

GridMap tagged_map(const GridSpec & spec)
{
  GridMap map(spec, {0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < map.size(); ++i) {
    map.cells()[i] = {0.0, 0.0, static_cast<double>(i + 1)};
  }
  return map;
}

}  // namespace

TEST(GridSpec, DefaultEnvelope)
{
  const GridSpec s;
  EXPECT_EQ(s.cells_x(), 400);
  EXPECT_EQ(s.cells_y(), 50);
  EXPECT_NO_THROW(s.validate());
}

TEST(GridSpec, RejectsNonMultipleExtent)
{
  EXPECT_THROW(GridSpec::centered(200.0, 25.2, 0.5).validate(), ConfigError);
  EXPECT_THROW(GridSpec::centered(200.0, 25.0, 0.0).validate(), ConfigError);
}

TEST(WorldToCell, CentreCell)
{
  const auto c = world_to_cell({0.0, 0.0}, GridSpec{});
  ASSERT_TRUE(c);
  EXPECT_EQ(*c, (CellIndex{200, 25}));
}

TEST(WorldToCell, OutOfBounds)
{
  EXPECT_FALSE(world_to_cell({1000.0, 0.0}, GridSpec{}));
  EXPECT_FALSE(world_to_cell({0.0, -12.5 - 1e-9}, GridSpec{}));
  EXPECT_FALSE(world_to_cell({100.0, 0.0}, GridSpec{}));
  EXPECT_FALSE(world_to_cell({std::nan(""), 0.0}, GridSpec{}));
}

TEST(WorldToCell, HalfOpenBoundaries)
{
  const GridSpec s;
  EXPECT_EQ(*world_to_cell({0.25, 0.25}, s), (CellIndex{200, 25}));
  EXPECT_EQ(*world_to_cell({0.5, 0.0}, s), (CellIndex{201, 25}));
  EXPECT_EQ(*world_to_cell({-1e-12, 0.0}, s), (CellIndex{199, 25}));
  EXPECT_EQ(*world_to_cell({-100.0, -12.5}, s), (CellIndex{0, 0}));
  EXPECT_EQ(*world_to_cell({99.999, 12.499}, s), (CellIndex{399, 49}));
}

TEST(WorldToCell, MatchesScalarReferenceOnBoundaryLattice)
{
  const GridSpec s;
  for (int i = -210; i <= 210; ++i) {
    for (double off : {-1e-9, 0.0, 1e-9, 0.25}) {
      const double x = i * 0.5 + off;
      const double y = (i % 30) * 0.5 + off;
      EXPECT_EQ(world_to_cell({x, y}, s), reference_cell(x, y, s)) << x << ' ' << y;
    }
  }
}

TEST(WorldToCell, RoundTripWithinHalfDiagonal)
{
  const GridSpec s;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-100.0, 100.0);
  std::uniform_real_distribution<double> uy(-12.5, 12.5);
  const double half_diag = 0.5 * std::sqrt(2.0) * s.resolution_m;
  for (int k = 0; k < 10000; ++k) {
    const Vec2 p(ux(rng), uy(rng));
    const auto c = world_to_cell(p, s);
    ASSERT_TRUE(c);
    EXPECT_LE((cell_to_world(*c, s) - p).norm(), half_diag + 1e-12);
  }
}

TEST(ShiftGrid, ZeroDisplacementLeavesMapUnchanged)
{
  const GridMap map = tagged_map(GridSpec{});
  const GridMap shifted = shift_grid(map, {0.0, 0.0, 0.3});
  for (std::size_t i = 0; i < map.size(); ++i) {
    EXPECT_EQ(shifted.cells()[i].p_dynamic, map.cells()[i].p_dynamic);
  }
}

TEST(ShiftGrid, TwoCellsAlongX)
{
  const GridMap map = tagged_map(GridSpec{});
  const GridMap shifted = shift_grid(map, {1.0, 0.0, 0.0});
  for (int iy = 0; iy < map.cells_y(); ++iy) {
    for (int ix = 0; ix + 2 < map.cells_x(); ++ix) {
      EXPECT_EQ(shifted.cell({ix, iy}).p_dynamic, map.cell({ix + 2, iy}).p_dynamic);
    }
    for (int ix = map.cells_x() - 2; ix < map.cells_x(); ++ix) {
      const Cell & c = shifted.cell({ix, iy});
      EXPECT_EQ(c.p_empty, 0.5);
      EXPECT_EQ(c.p_static, 0.5);
      EXPECT_EQ(c.p_dynamic, 0.0);
    }
  }
}

TEST(ShiftGrid, SubCellStepsAccumulateResidual)
{
  const GridSpec s;
  GridMap map = tagged_map(s);
  const double step = 0.3 * s.resolution_m;
  map.shift_to({step, 0.0, 0.0});
  EXPECT_NEAR(map.residual().x(), step, 1e-12);
  EXPECT_EQ(map.cell({0, 0}).p_dynamic, 1.0);
  for (int k = 2; k <= 10; ++k) {
    map.shift_to({k * step, 0.0, 0.0});
  }
  // 3.0 cells travelled: exactly three column shifts.
  const GridMap reference = shift_grid(tagged_map(s), {3.0 * s.resolution_m, 0.0, 0.0});
  for (std::size_t i = 0; i < map.size(); ++i) {
    ASSERT_EQ(map.cells()[i].p_dynamic, reference.cells()[i].p_dynamic) << i;
  }
  EXPECT_NEAR(map.residual().x(), 0.0, 1e-9);
}

TEST(ShiftGrid, CompositionMatchesSingleShift)
{
  const GridSpec s = GridSpec::centered(20.0, 10.0, 0.5);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  auto cells_moved = [&](const GridMap & m) {
    return Eigen::Vector2i(
      static_cast<int>(std::lround(m.anchor().x() / s.resolution_m)), static_cast<int>(std::lround(m.anchor().y() / s.resolution_m)));
  };
  for (int k = 0; k < 200; ++k) {
    const Vec2 a(u(rng), u(rng));
    const Vec2 b(u(rng), u(rng));
    const GridMap mid = shift_grid(tagged_map(s), {a.x(), a.y(), 0.0});
    const GridMap twice = shift_grid(mid, {a.x() + b.x(), a.y() + b.y(), 0.0});
    const GridMap once = shift_grid(tagged_map(s), {a.x() + b.x(), a.y() + b.y(), 0.0});
    ASSERT_EQ(cells_moved(twice), cells_moved(once));
    const Eigen::Vector2i total = cells_moved(once);
    const Eigen::Vector2i first = cells_moved(mid);
    auto inside = [&](int x, int y) { return x >= 0 && y >= 0 && x < once.cells_x() && y < once.cells_y(); };
    for (int iy = 0; iy < once.cells_y(); ++iy) {
      for (int ix = 0; ix < once.cells_x(); ++ix) {
        const int sx = ix + total.x(), sy = iy + total.y();
        const bool survived = inside(sx, sy) && inside(sx - first.x(), sy - first.y());
        const double expected = survived ? tagged_map(s).cell({sx, sy}).p_dynamic : 0.0;
        ASSERT_EQ(twice.cell({ix, iy}).p_dynamic, expected);
        if (survived) {
          ASSERT_EQ(once.cell({ix, iy}).p_dynamic, expected);
        }
      }
    }
  }
}

TEST(GridMap, CellOfFollowsAnchor)
{
  GridMap map(GridSpec{}, {10.0, 5.0, 0.0});
  EXPECT_EQ(map.unravel(*map.cell_of({10.0, 5.0})), (CellIndex{200, 25}));
  map.shift_to({11.2, 5.0, 0.0});
  // Anchor moved by two cells; the residual 0.2 m does not move the cells.
  EXPECT_EQ(map.unravel(*map.cell_of({11.0, 5.0})), (CellIndex{200, 25}));
  EXPECT_NEAR(map.residual().x(), 0.2, 1e-12);
  EXPECT_TRUE((map.cell_center(map.linear({200, 25})) - Vec2(11.25, 5.25)).norm() < 1e-12);
}

TEST(GridMap, AssignParticlesBuildsCellLists)
{
  GridMap map(GridSpec::centered(4.0, 4.0, 1.0), {0.0, 0.0, 0.0});
  const std::vector<Vec2> pts = {{0.5, 0.5}, {-1.5, 1.5}, {0.1, 0.9}, {50.0, 0.0}};
  map.assign_particles(pts, [](const Vec2 & p) { return p; });
  const auto refs = map.particle_refs(*map.cell_of({0.5, 0.5}));
  ASSERT_EQ(refs.size(), 2u);
  EXPECT_EQ(refs[0], 0u);
  EXPECT_EQ(refs[1], 2u);
  EXPECT_EQ(map.particle_refs(*map.cell_of({-1.5, 1.5})).size(), 1u);
  std::size_t total = 0;
  for (std::size_t c = 0; c < map.size(); ++c) {
    total += map.particle_refs(c).size();
  }
  EXPECT_EQ(total, 3u);
}
