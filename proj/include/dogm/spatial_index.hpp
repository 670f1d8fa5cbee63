#ifndef DOGM_SPATIAL_INDEX_HPP_
#define DOGM_SPATIAL_INDEX_HPP_

#include "dogm/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace dogm
{

struct Neighbor
{
  std::size_t index{0};
  double distance{0.0};
};

/// Uniform bucket hash over a fixed point set for exact nearest-neighbour
/// queries with a bounded search radius. Equal distances resolve to the
/// lowest point index.
class SpatialIndex
{
public:
  SpatialIndex() = default;
  SpatialIndex(std::span<const Vec2> points, double bucket_size);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  std::optional<Neighbor> nearest(const Vec2 & query, double max_radius) const;

private:
  using Key = std::int64_t;
  Key key_of(std::int64_t bx, std::int64_t by) const { return (bx << 32) ^ (by & 0xffffffffLL); }
  std::int64_t bucket_coord(double v) const { return static_cast<std::int64_t>(std::floor(v / bucket_size_)); }

  std::vector<Vec2> points_;
  double bucket_size_{1.0};
  // bucket -> [begin, end) into order_
  std::unordered_map<Key, std::pair<std::uint32_t, std::uint32_t>> buckets_;
  std::vector<std::uint32_t> order_;
};

}  // namespace dogm

#endif  // DOGM_SPATIAL_INDEX_HPP_
