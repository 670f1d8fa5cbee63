#ifndef DOGM_DBSCAN_HPP_
#define DOGM_DBSCAN_HPP_

#include "dogm/types.hpp"

#include <span>
#include <vector>

namespace dogm
{

inline constexpr int kNoise = -1;

/// Density-based clustering. A point is core when at least `min_pts` points
/// (itself included) lie within `eps` (inclusive). Core points within `eps` of
/// each other share a cluster. Clusters are numbered by their lowest core point
/// index, which is the order a sequential scan would seed them in. A non-core
/// point within `eps` of several clusters joins the lowest-numbered one (the
/// first to claim it); with no core point in reach it is noise.
///
/// Returns one label per point: cluster ids 0..k-1, or kNoise.
std::vector<int> dbscan(std::span<const Vec2> points, double eps, std::size_t min_pts);

}  // namespace dogm

#endif  // DOGM_DBSCAN_HPP_
