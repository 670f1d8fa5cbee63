#include "dogm/simulator.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dogm;

namespace
{

constexpr double kKmh = 1.0 / 3.6;

RadarSensorSpec omni_sensor()
{
  RadarSensorSpec s;
  s.id = 1;
  s.fov = 2.0 * M_PI;
  s.max_range = 100.0;
  s.detections_per_target = 8;
  return s;
}

ScenarioSpec quiet_scene()
{
  ScenarioSpec s;
  s.name = "test";
  s.duration = 2.0;
  s.dt = 0.05;
  s.noise_enabled = false;
  s.ego = Trajectory({0.0, 0.0, 0.0}, {});
  s.sensors = {omni_sensor()};
  return s;
}

// Global position and velocity of the sensor that produced `det`.
struct SensorKinematics
{
  Vec2 position;
  double yaw;
  Vec2 velocity;
};

SensorKinematics sensor_kinematics(const RadarSensorSpec & s, const EgoState & ego)
{
  const Vec2 arm = ego.pose.rotate(s.mount.position());
  return {ego.pose.position() + arm, ego.pose.yaw + s.mount.yaw, ego.velocity + ego.yaw_rate * Vec2(-arm.y(), arm.x())};
}

Vec2 detection_point(const RadarDetection & d, const SensorKinematics & k)
{
  const double a = k.yaw + d.azimuth;
  return k.position + d.range * Vec2(std::cos(a), std::sin(a));
}

}  // namespace

TEST(Trajectory, StraightAndTurning)
{
  const Trajectory straight({1.0, 2.0, M_PI / 2}, {{3.0, 4.0, 0.0}});
  const auto a = straight.at(2.0);
  EXPECT_NEAR(a.pose.x, 1.0, 1e-12);
  EXPECT_NEAR(a.pose.y, 10.0, 1e-12);
  EXPECT_NEAR(a.velocity.y(), 4.0, 1e-12);
  // Quarter circle of radius 10.
  const double w = 0.1;
  const Trajectory turn({0.0, 0.0, 0.0}, {{100.0, 1.0, w}});
  const auto b = turn.at(M_PI / 2 / w);
  EXPECT_NEAR(b.pose.x, 10.0, 1e-9);
  EXPECT_NEAR(b.pose.y, 10.0, 1e-9);
  EXPECT_NEAR(b.pose.yaw, M_PI / 2, 1e-12);
  // Segments chain; the last one continues past its duration.
  const Trajectory chain({0.0, 0.0, 0.0}, {{1.0, 2.0, 0.0}, {1.0, 5.0, 0.0}});
  EXPECT_NEAR(chain.at(3.0).pose.x, 2.0 + 10.0, 1e-12);
  EXPECT_EQ(chain.at(3.0).speed, 5.0);
}

TEST(Simulator, TangentialMoverHasZeroRangeRate)
{
  // A body circling the sensor: every point moves at right angles to its line of sight.
  ScenarioSpec s = quiet_scene();
  const double radius = 20.0, speed = 15.0;
  s.targets.push_back({7, 4.0, 1.8, Trajectory({0.0, -radius, 0.0}, {{10.0, speed, speed / radius}})});
  const Simulator sim(s);
  std::size_t count = 0;
  for (std::size_t k = 0; k < sim.frame_count(); ++k) {
    const auto step = sim.step_at(k);
    EXPECT_GT(step.truth.targets[0].velocity.norm(), 0.0);
    for (const auto & d : step.detections) {
      EXPECT_NEAR(d.range_rate, 0.0, 1e-9);
      ++count;
    }
  }
  EXPECT_GT(count, 100u);
}

TEST(Simulator, RecedingAlongBoresight)
{
  ScenarioSpec s = quiet_scene();
  s.targets.push_back({1, 4.5, 1e-4, Trajectory({20.0, 0.0, 0.0}, {{10.0, 5.0, 0.0}})});
  const Simulator sim(s);
  for (std::size_t k = 0; k < sim.frame_count(); ++k) {
    for (const auto & d : sim.step_at(k).detections) {
      EXPECT_NEAR(d.range_rate, 5.0, 1e-9);
    }
  }
}

TEST(Simulator, StaticObjectCompensatesToZeroUnderEgoMotion)
{
  ScenarioSpec s = quiet_scene();
  s.duration = 5.0;
  s.sensors = default_radar_rig();
  s.ego = Trajectory({0.0, 0.0, 0.3}, {{2.0, 20.0, 0.15}, {3.0, 25.0, -0.2}});
  s.targets.push_back({1, 3.0, 3.0, Trajectory({40.0, 8.0, 0.7}, {})});
  s.targets.push_back({2, 1.0, 1.0, Trajectory({-10.0, -6.0, 0.0}, {})});
  const Simulator sim(s);
  const SensorRig rig = s.rig();
  std::size_t count = 0;
  for (std::size_t k = 0; k < sim.frame_count(); ++k) {
    const auto step = sim.step_at(k);
    for (const auto & d : step.detections) {
      const auto m = detection_to_cartesian(d, rig, step.truth.ego);
      EXPECT_LT(m.velocity.norm(), 1e-9);
      ++count;
    }
  }
  EXPECT_GT(count, 50u);
}

TEST(Simulator, NoiseOffRangeRateMatchesAnalyticProjection)
{
  ScenarioSpec s = quiet_scene();
  s.sensors = default_radar_rig();
  s.ego = Trajectory({0.0, 0.0, 0.0}, {{1.0, 20.0, 0.1}, {5.0, 22.0, -0.05}});
  s.targets.push_back({1, 4.5, 1.8, Trajectory({15.0, 2.0, 0.2}, {{10.0, 25.0, -0.1}})});
  s.targets.push_back({2, 12.0, 2.5, Trajectory({-5.0, -3.5, 0.0}, {{10.0, 20.0, 0.0}})});
  const Simulator sim(s);
  for (std::size_t k = 0; k < sim.frame_count(); k += 3) {
    const double t = static_cast<double>(k) * s.dt;
    const auto step = sim.step_at(k);
    for (std::size_t i = 0; i < step.detections.size(); ++i) {
      const auto & d = step.detections[i];
      const auto & spec = s.sensors[static_cast<std::size_t>(d.sensor_id - 1)];
      ASSERT_EQ(spec.id, d.sensor_id);
      const auto sk = sensor_kinematics(spec, step.truth.ego);
      const Vec2 p = detection_point(d, sk);
      const auto & target = s.targets[static_cast<std::size_t>(step.origin[i] - 1)];
      const auto st = target.trajectory.at(t);
      const Vec2 r = p - st.pose.position();
      const Vec2 vp = st.velocity + st.yaw_rate * Vec2(-r.y(), r.x());
      const Vec2 u = (p - sk.position).normalized();
      EXPECT_NEAR(d.range_rate, (vp - sk.velocity).dot(u), 1e-9);

      // Independent check: finite difference of the range to the same body point.
      const Vec2 body = Pose2{0.0, 0.0, -st.pose.yaw}.rotate(r);
      const double h = 1e-5;
      auto range_at = [&](double tt) {
        const Vec2 pt = target.trajectory.at(tt).pose.transform(body);
        const auto ego = sim.ego_state(tt);
        return (pt - sensor_kinematics(spec, ego).position).norm();
      };
      EXPECT_NEAR(d.range_rate, (range_at(t + h) - range_at(t - h)) / (2.0 * h), 1e-5);
    }
  }
}

TEST(Simulator, DetectionsStayInsideCoverage)
{
  ScenarioSpec s = builtin_scenario("highway");
  s.noise_enabled = false;
  const Simulator sim(s);
  for (std::size_t k = 0; k < sim.frame_count(); k += 5) {
    for (const auto & d : sim.step_at(k).detections) {
      const auto & sensor = s.sensors[static_cast<std::size_t>(d.sensor_id - 1)];
      EXPECT_LE(d.range, sensor.max_range + 1e-9);
      EXPECT_LE(std::abs(d.azimuth), 0.5 * sensor.fov + 1e-9);
    }
  }
}

TEST(Simulator, DeterministicPerSeed)
{
  ScenarioSpec s = builtin_scenario("highway");
  s.seed = 42;
  const Simulator a(s), b(s);
  s.seed = 43;
  const Simulator c(s);
  bool differs = false;
  for (std::size_t k = 0; k < a.frame_count(); k += 7) {
    const auto x = a.step_at(k), y = b.step_at(k), z = c.step_at(k);
    EXPECT_EQ(x.detections, y.detections);
    differs = differs || x.detections != z.detections;
  }
  EXPECT_TRUE(differs);
  // Steps are independent of the order they are requested in.
  EXPECT_EQ(a.step_at(100).detections, a.step(5.0).detections);
}

TEST(Simulator, OffLatticeTimeIsUsageError)
{
  const Simulator sim(builtin_scenario("simple_road"));
  EXPECT_THROW(sim.step(0.03), UsageError);
  EXPECT_THROW(sim.step(-1.0), UsageError);
  EXPECT_THROW(sim.step(1e6), UsageError);
  EXPECT_THROW(sim.step_at(sim.frame_count()), UsageError);
  EXPECT_NO_THROW(sim.step(0.3));
}

TEST(Simulator, ClutterIsOffByDefaultAndTaggedWhenOn)
{
  ScenarioSpec s = quiet_scene();
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_TRUE(Simulator(s).step_at(k).detections.empty());
  }
  s.clutter_rate = 4.0;
  const Simulator sim(s);
  std::size_t clutter = 0;
  for (std::size_t k = 0; k < sim.frame_count(); ++k) {
    const auto step = sim.step_at(k);
    for (int o : step.origin) {
      EXPECT_EQ(o, -1);
      ++clutter;
    }
  }
  EXPECT_GT(clutter, 0u);
}

TEST(BuiltinScenario, SimpleRoadStartsWithOneLeadInLongRangeFov)
{
  const ScenarioSpec s = builtin_scenario("simple_road");
  const Simulator sim(s);
  const auto step = sim.step_at(0);
  ASSERT_EQ(step.truth.targets.size(), 1u);
  const auto & lead = step.truth.targets[0];
  EXPECT_GT(lead.pose.x, step.truth.ego.pose.x);
  EXPECT_TRUE(lead.visible);
  bool seen_by_lrr = false;
  for (std::size_t i = 0; i < step.detections.size(); ++i) {
    seen_by_lrr = seen_by_lrr || step.detections[i].sensor_id == 5;
  }
  EXPECT_TRUE(seen_by_lrr);
}

TEST(BuiltinScenario, HighwayHasParallelSameSpeedTarget)
{
  const ScenarioSpec s = builtin_scenario("highway");
  EXPECT_GE(s.targets.size(), 3u);
  const std::size_t n = s.frame_count();
  bool found = false;
  for (const auto & target : s.targets) {
    std::size_t parallel = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) * s.dt;
      const auto ego = s.ego.at(t);
      const auto st = target.trajectory.at(t);
      if ((st.velocity - ego.velocity).norm() < 0.1) {
        ++parallel;
      }
    }
    found = found || 2 * parallel >= n;
  }
  EXPECT_TRUE(found);
}

TEST(BuiltinScenario, SpeedsWithinRange)
{
  for (const char * name : {"simple_road", "highway"}) {
    const ScenarioSpec s = builtin_scenario(name);
    for (double t = 0.0; t <= s.duration; t += s.dt) {
      const double ego = s.ego.at(t).speed;
      EXPECT_GE(ego, 70.0 * kKmh - 1e-9);
      EXPECT_LE(ego, 130.0 * kKmh + 1e-9);
      for (const auto & target : s.targets) {
        const double v = target.trajectory.at(t).speed;
        EXPECT_GE(v, 70.0 * kKmh - 1e-9) << name;
        EXPECT_LE(v, 130.0 * kKmh + 1e-9) << name;
      }
    }
  }
  EXPECT_THROW(builtin_scenario("city"), UsageError);
}
