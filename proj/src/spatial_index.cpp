#include "dogm/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dogm
{

SpatialIndex::SpatialIndex(std::span<const Vec2> points, double bucket_size)
: points_(points.begin(), points.end()), bucket_size_(bucket_size)
{
  if (!(bucket_size > 0.0)) {
    throw ConfigError("spatial index bucket size must be positive");
  }
  std::vector<Key> keys(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    keys[i] = key_of(bucket_coord(points_[i].x()), bucket_coord(points_[i].y()));
  }
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0U);
  std::stable_sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b]; });
  for (std::uint32_t i = 0; i < order_.size();) {
    std::uint32_t j = i;
    while (j < order_.size() && keys[order_[j]] == keys[order_[i]]) {
      ++j;
    }
    buckets_.emplace(keys[order_[i]], std::make_pair(i, j));
    i = j;
  }
}

std::optional<Neighbor> SpatialIndex::nearest(const Vec2 & query, double max_radius) const
{
  if (points_.empty() || !(max_radius >= 0.0)) {
    return std::nullopt;
  }
  const std::int64_t bx0 = bucket_coord(query.x() - max_radius);
  const std::int64_t bx1 = bucket_coord(query.x() + max_radius);
  const std::int64_t by0 = bucket_coord(query.y() - max_radius);
  const std::int64_t by1 = bucket_coord(query.y() + max_radius);

  double best_sq = max_radius * max_radius;
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (std::int64_t bx = bx0; bx <= bx1; ++bx) {
    for (std::int64_t by = by0; by <= by1; ++by) {
      auto it = buckets_.find(key_of(bx, by));
      if (it == buckets_.end()) {
        continue;
      }
      for (std::uint32_t k = it->second.first; k < it->second.second; ++k) {
        const std::uint32_t idx = order_[k];
        const double d_sq = (points_[idx] - query).squaredNorm();
        if (d_sq < best_sq || (d_sq == best_sq && idx < best)) {
          best_sq = d_sq;
          best = idx;
        }
      }
    }
  }
  if (best == std::numeric_limits<std::size_t>::max()) {
    return std::nullopt;
  }
  return Neighbor{best, std::sqrt(best_sq)};
}

}  // namespace dogm
