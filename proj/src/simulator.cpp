#include "dogm/simulator.hpp"

#include "dogm/counter_rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace dogm
{

namespace
{

constexpr double kKmh = 1.0 / 3.6;
constexpr double kDeg = M_PI / 180.0;

Pose2 advance(const Pose2 & p, double speed, double yaw_rate, double tau)
{
  Pose2 out = p;
  if (std::abs(yaw_rate) < 1e-12) {
    out.x += speed * tau * std::cos(p.yaw);
    out.y += speed * tau * std::sin(p.yaw);
    return out;
  }
  const double yaw_end = p.yaw + yaw_rate * tau;
  out.x += speed / yaw_rate * (std::sin(yaw_end) - std::sin(p.yaw));
  out.y -= speed / yaw_rate * (std::cos(yaw_end) - std::cos(p.yaw));
  out.yaw = yaw_end;
  return out;
}

struct Edge
{
  Vec2 a;
  Vec2 b;
};

// Edges of the target rectangle facing `viewer`, in the global frame.
std::vector<Edge> visible_edges(const TargetState & t, const Vec2 & viewer)
{
  const double hl = 0.5 * t.length;
  const double hw = 0.5 * t.width;
  const std::array<Vec2, 4> corners = {
    t.pose.transform({hl, hw}), t.pose.transform({-hl, hw}), t.pose.transform({-hl, -hw}),
    t.pose.transform({hl, -hw})};
  const std::array<Vec2, 4> normals = {
    t.pose.rotate({0.0, 1.0}), t.pose.rotate({-1.0, 0.0}), t.pose.rotate({0.0, -1.0}), t.pose.rotate({1.0, 0.0})};
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec2 & a = corners[i];
    const Vec2 & b = corners[(i + 1) % 4];
    if (normals[i].dot(viewer - 0.5 * (a + b)) > 0.0) {
      edges.push_back({a, b});
    }
  }
  return edges;
}

struct SensorPose
{
  Vec2 position;
  double yaw;
  Vec2 velocity;
};

SensorPose sensor_pose(const RadarSensorSpec & s, const EgoState & ego)
{
  return {ego.pose.transform(s.mount.position()), ego.pose.yaw + s.mount.yaw, mounted_point_velocity(ego, s.mount.position())};
}

bool in_coverage(const RadarSensorSpec & s, const SensorPose & sp, const Vec2 & p)
{
  const Vec2 rel = p - sp.position;
  const double range = rel.norm();
  if (range > s.max_range) {
    return false;
  }
  const double az = wrap_angle(std::atan2(rel.y(), rel.x()) - sp.yaw);
  return std::abs(az) <= 0.5 * s.fov;
}

std::uint64_t stream_key(std::uint64_t seed, std::size_t step, std::size_t sensor, std::uint64_t target)
{
  return hash_combine(hash_combine(hash_combine(seed, step), sensor), target);
}

}  // namespace

Trajectory::Trajectory(const Pose2 & start, std::vector<MotionSegment> segments)
: start_(start), segments_(std::move(segments))
{
  if (!start.is_finite()) {
    throw ConfigError("trajectory start pose must be finite");
  }
  for (const auto & s : segments_) {
    if (!(s.duration >= 0.0) || !std::isfinite(s.speed) || !std::isfinite(s.yaw_rate)) {
      throw ConfigError("trajectory segments need a non-negative duration and finite speed/yaw rate");
    }
  }
}

Trajectory::State Trajectory::at(double t) const
{
  State st;
  st.pose = start_;
  double remaining = t;
  double speed = 0.0;
  double yaw_rate = 0.0;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto & seg = segments_[i];
    speed = seg.speed;
    yaw_rate = seg.yaw_rate;
    const bool last = i + 1 == segments_.size();
    const double tau = last ? remaining : std::min(remaining, seg.duration);
    st.pose = advance(st.pose, speed, yaw_rate, tau);
    remaining -= tau;
    if (remaining <= 0.0) {
      break;
    }
  }
  st.speed = speed;
  st.yaw_rate = yaw_rate;
  st.velocity = speed * Vec2(std::cos(st.pose.yaw), std::sin(st.pose.yaw));
  return st;
}

std::size_t ScenarioSpec::frame_count() const
{
  return static_cast<std::size_t>(std::floor(duration / dt + 1e-9)) + 1;
}

SensorRig ScenarioSpec::rig() const
{
  SensorRig rig;
  for (const auto & s : sensors) {
    rig.add(s.as_mount());
  }
  return rig;
}

void ScenarioSpec::validate() const
{
  if (!(dt > 0.0)) {
    throw ConfigError("scenario.dt must be positive");
  }
  if (!(duration >= 0.0)) {
    throw ConfigError("scenario.duration must be non-negative");
  }
  if (sensors.empty()) {
    throw ConfigError("scenario.sensors must not be empty");
  }
  for (const auto & s : sensors) {
    if (s.detections_per_target < 0) {
      throw ConfigError("sensor " + std::to_string(s.id) + ": detections_per_target must be non-negative");
    }
    if (s.noise.sigma_range < 0.0 || s.noise.sigma_azimuth < 0.0 || s.noise.sigma_range_rate < 0.0) {
      throw ConfigError("sensor " + std::to_string(s.id) + ": noise std-devs must be non-negative");
    }
  }
  rig();  // fov/range/duplicate-id checks
  for (const auto & t : targets) {
    if (!(t.length > 0.0 && t.width > 0.0)) {
      throw ConfigError("target " + std::to_string(t.id) + ": extent must be positive");
    }
  }
  if (!(clutter_rate >= 0.0)) {
    throw ConfigError("scenario.clutter_rate must be non-negative");
  }
}

std::vector<RadarSensorSpec> default_radar_rig()
{
  std::vector<RadarSensorSpec> rig;
  const double srr_fov = 150.0 * kDeg;
  // Short-range radars at the wheels, boresights pointing diagonally outward.
  rig.push_back({1, {1.4, 0.8, 45.0 * kDeg}, srr_fov, 50.0, {}, 3});
  rig.push_back({2, {1.4, -0.8, -45.0 * kDeg}, srr_fov, 50.0, {}, 3});
  rig.push_back({3, {-1.4, 0.8, 135.0 * kDeg}, srr_fov, 50.0, {}, 3});
  rig.push_back({4, {-1.4, -0.8, -135.0 * kDeg}, srr_fov, 50.0, {}, 3});
  // Long-range radar, front centre.
  rig.push_back({5, {2.3, 0.0, 0.0}, 20.0 * kDeg, 180.0, {}, 3});
  return rig;
}

ScenarioSpec builtin_scenario(std::string_view name)
{
  ScenarioSpec s;
  s.name = std::string(name);
  s.sensors = default_radar_rig();
  s.dt = 0.05;
  if (name == "simple_road") {
    s.dt = 0.1;
    s.duration = 20.0;
    s.ego = Trajectory({0.0, 0.0, 0.0}, {{20.0, 80.0 * kKmh, 0.0}});
    TargetObject lead;
    lead.id = 1;
    lead.length = 4.5;
    lead.width = 1.8;
    lead.trajectory = Trajectory(
      {30.0, 0.0, 0.0}, {{8.0, 90.0 * kKmh, 0.0}, {6.0, 75.0 * kKmh, 0.0}, {6.0, 90.0 * kKmh, 0.0}});
    s.targets.push_back(lead);
    return s;
  }
  if (name == "highway") {
    s.duration = 12.0;
    const double lane = 3.5;
    s.ego = Trajectory({0.0, 0.0, 0.0}, {{12.0, 100.0 * kKmh, 0.0}});
    TargetObject lead{1, 4.5, 1.8, Trajectory({35.0, 0.0, 0.0}, {{12.0, 110.0 * kKmh, 0.0}})};
    TargetObject overtaking{2, 4.7, 1.9, Trajectory({-40.0, lane, 0.0}, {{12.0, 130.0 * kKmh, 0.0}})};
    // "Object 3": truck in the adjacent lane at the ego's speed for the whole run.
    TargetObject truck{3, 12.0, 2.5, Trajectory({-1.0, -lane, 0.0}, {{12.0, 100.0 * kKmh, 0.0}})};
    TargetObject oncoming{4, 4.5, 1.8, Trajectory({95.0, 2.6 * lane, M_PI}, {{12.0, 90.0 * kKmh, 0.0}})};
    s.targets = {lead, overtaking, truck, oncoming};
    return s;
  }
  throw UsageError("unknown scenario '" + std::string(name) + "' (expected simple_road or highway)");
}

double line_of_sight_rate(
  const Vec2 & sensor_position, const Vec2 & sensor_velocity, const Vec2 & point, const Vec2 & point_velocity)
{
  const Vec2 rel = point - sensor_position;
  const double n = rel.norm();
  if (n == 0.0) {
    return 0.0;
  }
  return (point_velocity - sensor_velocity).dot(rel / n);
}

Simulator::Simulator(ScenarioSpec spec) : spec_(std::move(spec))
{
  spec_.validate();
}

EgoState Simulator::ego_state(double t) const
{
  const auto st = spec_.ego.at(t);
  return {st.pose, st.velocity, st.yaw_rate};
}

SimulationStep Simulator::step(double t) const
{
  const double k_real = t / spec_.dt;
  const double k_round = std::round(k_real);
  if (!std::isfinite(t) || t < -1e-12 || std::abs(k_real - k_round) > 1e-6 || k_round >= static_cast<double>(frame_count())) {
    throw UsageError("simulation time " + std::to_string(t) + " is not on the dt lattice within the scenario duration");
  }
  return step_at(static_cast<std::size_t>(k_round));
}

SimulationStep Simulator::step_at(std::size_t k) const
{
  if (k >= frame_count()) {
    throw UsageError("simulation step " + std::to_string(k) + " beyond scenario duration");
  }
  const double t = static_cast<double>(k) * spec_.dt;
  SimulationStep out;
  out.truth.timestamp = t;
  out.truth.ego = ego_state(t);
  const EgoState & ego = out.truth.ego;

  struct Kinematics
  {
    Vec2 velocity;
    double yaw_rate;
  };
  std::vector<Kinematics> kin;
  for (const auto & target : spec_.targets) {
    const auto st = target.trajectory.at(t);
    out.truth.targets.push_back({target.id, st.pose, st.velocity, target.length, target.width, false});
    kin.push_back({st.velocity, st.yaw_rate});
  }

  for (std::size_t si = 0; si < spec_.sensors.size(); ++si) {
    const RadarSensorSpec & sensor = spec_.sensors[si];
    const SensorPose sp = sensor_pose(sensor, ego);

    auto emit = [&](const Vec2 & point, const Vec2 & point_velocity, std::mt19937_64 & rng, int origin) {
      const Vec2 rel = point - sp.position;
      RadarDetection det;
      det.timestamp = t;
      det.sensor_id = sensor.id;
      det.range = rel.norm();
      det.azimuth = wrap_angle(std::atan2(rel.y(), rel.x()) - sp.yaw);
      det.range_rate = line_of_sight_rate(sp.position, sp.velocity, point, point_velocity);
      if (spec_.noise_enabled) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        det.range = std::max(0.0, det.range + sensor.noise.sigma_range * gauss(rng));
        det.azimuth += sensor.noise.sigma_azimuth * gauss(rng);
        det.range_rate += sensor.noise.sigma_range_rate * gauss(rng);
      }
      out.detections.push_back(det);
      out.origin.push_back(origin);
    };

    for (std::size_t ti = 0; ti < out.truth.targets.size(); ++ti) {
      TargetState & ts = out.truth.targets[ti];
      const auto edges = visible_edges(ts, sp.position);
      double total = 0.0;
      for (const auto & e : edges) {
        total += (e.b - e.a).norm();
      }
      if (total <= 0.0) {
        continue;
      }
      auto point_on_silhouette = [&](double s) {
        for (const auto & e : edges) {
          const double len = (e.b - e.a).norm();
          if (s <= len) {
            return Vec2(e.a + (e.b - e.a) * (s / len));
          }
          s -= len;
        }
        return edges.back().b;
      };
      if (!ts.visible) {
        const int samples = std::max(2, static_cast<int>(std::ceil(total / 0.1)));
        for (int i = 0; i <= samples && !ts.visible; ++i) {
          ts.visible = in_coverage(sensor, sp, point_on_silhouette(total * i / samples));
        }
      }

      std::mt19937_64 rng(stream_key(spec_.seed, k, si, ti + 1));
      std::uniform_real_distribution<double> along(0.0, total);
      for (int n = 0; n < sensor.detections_per_target; ++n) {
        const Vec2 point = point_on_silhouette(along(rng));
        if (!in_coverage(sensor, sp, point)) {
          continue;
        }
        const Vec2 r = point - ts.pose.position();
        const Vec2 point_velocity = ts.velocity + kin[ti].yaw_rate * Vec2(-r.y(), r.x());
        emit(point, point_velocity, rng, ts.id);
        ts.visible = true;
      }
    }

    if (spec_.clutter_rate > 0.0) {
      std::mt19937_64 rng(stream_key(spec_.seed, k, si, 0));
      std::poisson_distribution<int> count(spec_.clutter_rate);
      std::uniform_real_distribution<double> range(0.0, sensor.max_range);
      std::uniform_real_distribution<double> az(-0.5 * sensor.fov, 0.5 * sensor.fov);
      const int n = count(rng);
      for (int i = 0; i < n; ++i) {
        const double r = range(rng);
        const double a = az(rng);
        const Vec2 point = sp.position + r * Vec2(std::cos(sp.yaw + a), std::sin(sp.yaw + a));
        emit(point, Vec2::Zero(), rng, -1);
      }
    }
  }
  return out;
}

}  // namespace dogm
