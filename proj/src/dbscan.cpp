#include "dogm/dbscan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>

namespace dogm
{

namespace
{

// Square buckets slightly smaller than eps/sqrt(2): any two points sharing a
// bucket are neighbours, and every neighbour lies within two buckets.
class BucketGrid
{
public:
  BucketGrid(std::span<const Vec2> points, double eps) : side_(eps / std::sqrt(2.0) * (1.0 - 1e-9))
  {
    std::vector<std::int64_t> keys(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      keys[i] = key(coord(points[i].x()), coord(points[i].y()));
    }
    order_.resize(points.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    bucket_of_.resize(points.size());
    for (std::size_t k = 0; k < order_.size();) {
      std::size_t end = k;
      while (end < order_.size() && keys[order_[end]] == keys[order_[k]]) {
        bucket_of_[order_[end]] = ranges_.size();
        ++end;
      }
      const Vec2 & p = points[order_[k]];
      index_.emplace(keys[order_[k]], ranges_.size());
      ranges_.push_back({k, end, coord(p.x()), coord(p.y())});
      k = end;
    }
  }

  std::size_t bucket_count() const { return ranges_.size(); }
  std::size_t bucket_of(std::size_t point) const { return bucket_of_[point]; }
  std::span<const std::size_t> members(std::size_t bucket) const
  {
    return std::span<const std::size_t>(order_).subspan(ranges_[bucket].begin, ranges_[bucket].end - ranges_[bucket].begin);
  }

  /// Calls fn(bucket) for every bucket in the 5x5 block around `bucket`, itself first.
  template <typename Fn>
  void for_each_near(std::size_t bucket, Fn && fn) const
  {
    fn(bucket);
    const auto & r = ranges_[bucket];
    for (std::int64_t dx = -2; dx <= 2; ++dx) {
      for (std::int64_t dy = -2; dy <= 2; ++dy) {
        if (dx == 0 && dy == 0) {
          continue;
        }
        auto it = index_.find(key(r.cx + dx, r.cy + dy));
        if (it != index_.end()) {
          fn(it->second);
        }
      }
    }
  }

private:
  struct Range
  {
    std::size_t begin;
    std::size_t end;
    std::int64_t cx;
    std::int64_t cy;
  };

  std::int64_t coord(double v) const { return static_cast<std::int64_t>(std::floor(v / side_)); }
  static std::int64_t key(std::int64_t x, std::int64_t y) { return (x << 32) ^ (y & 0xffffffffLL); }

  double side_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> bucket_of_;
  std::vector<Range> ranges_;
  std::unordered_map<std::int64_t, std::size_t> index_;
};

struct DisjointSets
{
  std::vector<std::size_t> parent;

  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  std::size_t find(std::size_t i)
  {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }

  void unite(std::size_t a, std::size_t b)
  {
    a = find(a);
    b = find(b);
    if (a != b) {
      parent[std::max(a, b)] = std::min(a, b);
    }
  }
};

}  // namespace

std::vector<int> dbscan(std::span<const Vec2> points, double eps, std::size_t min_pts)
{
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw ConfigError("dbscan: eps must be positive");
  }
  if (min_pts < 1) {
    throw ConfigError("dbscan: min_pts must be at least 1");
  }
  const std::size_t n = points.size();
  std::vector<int> labels(n, kNoise);
  if (n == 0) {
    return labels;
  }
  const double eps_sq = eps * eps;
  auto near = [&](std::size_t a, std::size_t b) { return (points[a] - points[b]).squaredNorm() <= eps_sq; };
  const BucketGrid grid(points, eps);

  std::vector<char> core(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    grid.for_each_near(grid.bucket_of(i), [&](std::size_t b) {
      for (auto j : grid.members(b)) {
        if (count >= min_pts) {
          return;
        }
        count += near(i, j) ? 1 : 0;
      }
    });
    core[i] = count >= min_pts;
  }

  // Core points of one bucket are mutually connected; link neighbouring buckets
  // through any pair of core points within eps.
  DisjointSets sets(n);
  std::vector<std::vector<std::size_t>> core_members(grid.bucket_count());
  for (std::size_t b = 0; b < grid.bucket_count(); ++b) {
    for (auto i : grid.members(b)) {
      if (core[i]) {
        core_members[b].push_back(i);
      }
    }
    for (std::size_t k = 1; k < core_members[b].size(); ++k) {
      sets.unite(core_members[b][0], core_members[b][k]);
    }
  }
  for (std::size_t b = 0; b < grid.bucket_count(); ++b) {
    if (core_members[b].empty()) {
      continue;
    }
    grid.for_each_near(b, [&](std::size_t other) {
      if (other <= b || core_members[other].empty() ||
          sets.find(core_members[b][0]) == sets.find(core_members[other][0])) {
        return;
      }
      for (auto i : core_members[b]) {
        for (auto j : core_members[other]) {
          if (near(i, j)) {
            sets.unite(i, j);
            return;
          }
        }
      }
    });
  }

  std::vector<int> component_label(n, kNoise);
  int next_label = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) {
      continue;
    }
    const std::size_t root = sets.find(i);
    if (component_label[root] == kNoise) {
      component_label[root] = next_label++;
    }
    labels[i] = component_label[root];
  }

  // A border point joins the earliest-seeded cluster that reaches it.
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) {
      continue;
    }
    grid.for_each_near(grid.bucket_of(i), [&](std::size_t b) {
      for (auto j : core_members[b]) {
        if (near(i, j) && (labels[i] == kNoise || labels[j] < labels[i])) {
          labels[i] = labels[j];
        }
      }
    });
  }
  return labels;
}

}  // namespace dogm
