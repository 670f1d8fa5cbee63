#ifndef DOGM_EVALUATION_HPP_
#define DOGM_EVALUATION_HPP_

#include "dogm/particle_filter.hpp"
#include "dogm/simulator.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace dogm
{

struct ClusteringParams
{
  double eps{1.0};
  std::size_t min_pts{5};
  double gate{3.0};
  std::size_t consistent_frames{5};
};

struct Cluster
{
  std::vector<std::uint32_t> members;  ///< particle indices
  Vec2 centroid_pos{Vec2::Zero()};
  Vec2 centroid_vel{Vec2::Zero()};
  double total_weight{0.0};
};

/// DBSCAN over the given particles, returning weighted centroids. Weights are
/// the mode's resample weights; a cluster with zero total weight falls back to
/// the unweighted mean.
std::vector<Cluster> cluster_particles(
  std::span<const Particle> particles, std::span<const std::uint32_t> candidates, WeightMode mode,
  const ClusteringParams & params);

struct Match
{
  std::size_t cluster{0};
  std::size_t object{0};  ///< index into the truth frame's targets
  double distance{0.0};
};

/// Greedy nearest-centroid association: repeatedly take the closest
/// unassigned (cluster, object) pair under the gate. Only visible objects take part.
std::vector<Match> associate(std::span<const Cluster> clusters, const GroundTruthFrame & truth, double gate);

/// Per-frame outcome kept for the metrics.
struct FrameEvaluation
{
  double timestamp{0.0};
  struct ObjectResult
  {
    int id{0};
    bool visible{false};
    bool matched{false};
    double position_error{0.0};
    double velocity_error{0.0};
  };
  std::vector<ObjectResult> objects;
};

FrameEvaluation evaluate_frame(std::span<const Cluster> clusters, const GroundTruthFrame & truth, double gate);

struct MetricsReport
{
  double delta_x{0.0};
  double delta_v{0.0};
  double t_d{0.0};  ///< NaN when no consistent association ever forms
  double duration_fraction{0.0};
  std::map<int, double> per_object_duration;
  std::size_t matched_pairs{0};
};

/// Throws UsageError on an empty run.
MetricsReport compute_metrics(std::span<const FrameEvaluation> run, std::size_t consistent_frames);

}  // namespace dogm

#endif  // DOGM_EVALUATION_HPP_
