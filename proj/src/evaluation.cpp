#include "dogm/evaluation.hpp"

#include "dogm/dbscan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace dogm
{

std::vector<Cluster> cluster_particles(
  std::span<const Particle> particles, std::span<const std::uint32_t> candidates, WeightMode mode,
  const ClusteringParams & params)
{
  std::vector<Vec2> points;
  points.reserve(candidates.size());
  for (auto i : candidates) {
    points.push_back(particles[i].position);
  }
  const auto labels = dbscan(points, params.eps, params.min_pts);
  int count = 0;
  for (int l : labels) {
    count = std::max(count, l + 1);
  }
  std::vector<Cluster> clusters(static_cast<std::size_t>(count));
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] >= 0) {
      clusters[static_cast<std::size_t>(labels[k])].members.push_back(candidates[k]);
    }
  }
  for (auto & c : clusters) {
    Vec2 pos = Vec2::Zero();
    Vec2 vel = Vec2::Zero();
    double total = 0.0;
    for (auto i : c.members) {
      const double w = resample_weight(particles[i], mode);
      pos += w * particles[i].position;
      vel += w * particles[i].velocity;
      total += w;
    }
    if (total > 0.0) {
      c.centroid_pos = pos / total;
      c.centroid_vel = vel / total;
    } else {
      pos.setZero();
      vel.setZero();
      for (auto i : c.members) {
        pos += particles[i].position;
        vel += particles[i].velocity;
      }
      c.centroid_pos = pos / static_cast<double>(c.members.size());
      c.centroid_vel = vel / static_cast<double>(c.members.size());
    }
    c.total_weight = total;
  }
  return clusters;
}

std::vector<Match> associate(std::span<const Cluster> clusters, const GroundTruthFrame & truth, double gate)
{
  std::vector<Match> candidates;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (std::size_t o = 0; o < truth.targets.size(); ++o) {
      if (!truth.targets[o].visible) {
        continue;
      }
      const double d = (clusters[c].centroid_pos - truth.targets[o].pose.position()).norm();
      if (d <= gate) {
        candidates.push_back({c, o, d});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Match & a, const Match & b) {
    return std::tie(a.distance, a.cluster, a.object) < std::tie(b.distance, b.cluster, b.object);
  });
  std::vector<bool> cluster_used(clusters.size(), false);
  std::vector<bool> object_used(truth.targets.size(), false);
  std::vector<Match> matches;
  for (const auto & m : candidates) {
    if (cluster_used[m.cluster] || object_used[m.object]) {
      continue;
    }
    cluster_used[m.cluster] = true;
    object_used[m.object] = true;
    matches.push_back(m);
  }
  return matches;
}

FrameEvaluation evaluate_frame(std::span<const Cluster> clusters, const GroundTruthFrame & truth, double gate)
{
  FrameEvaluation eval;
  eval.timestamp = truth.timestamp;
  for (const auto & t : truth.targets) {
    eval.objects.push_back({t.id, t.visible, false, 0.0, 0.0});
  }
  for (const auto & m : associate(clusters, truth, gate)) {
    auto & o = eval.objects[m.object];
    o.matched = true;
    o.position_error = m.distance;
    o.velocity_error = (clusters[m.cluster].centroid_vel - truth.targets[m.object].velocity).norm();
  }
  return eval;
}

MetricsReport compute_metrics(std::span<const FrameEvaluation> run, std::size_t consistent_frames)
{
  if (run.empty()) {
    throw UsageError("compute_metrics: empty run");
  }
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  MetricsReport report;

  double sum_x = 0.0;
  double sum_v = 0.0;
  std::map<int, std::pair<std::size_t, std::size_t>> counts;  // id -> (matched, visible)
  std::map<int, std::size_t> first_visible;
  for (std::size_t f = 0; f < run.size(); ++f) {
    for (const auto & o : run[f].objects) {
      if (!o.visible) {
        continue;
      }
      auto & [matched, visible] = counts[o.id];
      ++visible;
      first_visible.emplace(o.id, f);
      if (o.matched) {
        ++matched;
        ++report.matched_pairs;
        sum_x += o.position_error;
        sum_v += o.velocity_error;
      }
    }
  }
  report.delta_x = report.matched_pairs > 0 ? sum_x / static_cast<double>(report.matched_pairs) : nan;
  report.delta_v = report.matched_pairs > 0 ? sum_v / static_cast<double>(report.matched_pairs) : nan;

  double d_sum = 0.0;
  for (const auto & [id, c] : counts) {
    const double frac = static_cast<double>(c.first) / static_cast<double>(c.second);
    report.per_object_duration[id] = frac;
    d_sum += frac;
  }
  report.duration_fraction = counts.empty() ? nan : d_sum / static_cast<double>(counts.size());

  // Convergence time for the object that becomes visible first (lowest id on ties).
  report.t_d = nan;
  if (!first_visible.empty()) {
    auto first = std::min_element(first_visible.begin(), first_visible.end(), [](const auto & a, const auto & b) {
      return std::tie(a.second, a.first) < std::tie(b.second, b.first);
    });
    const int id = first->first;
    const std::size_t start = first->second;
    const std::size_t need = std::max<std::size_t>(1, consistent_frames);
    std::size_t streak = 0;
    for (std::size_t f = start; f < run.size(); ++f) {
      bool matched = false;
      for (const auto & o : run[f].objects) {
        if (o.id == id) {
          matched = o.visible && o.matched;
        }
      }
      streak = matched ? streak + 1 : 0;
      if (streak == need) {
        report.t_d = run[f + 1 - need].timestamp - run[start].timestamp;
        break;
      }
    }
  }
  return report;
}

}  // namespace dogm
