#include "dogm/scenario_config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace dogm
{

namespace
{

std::string read_file(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void reject_unknown(const YAML::Node & node, const std::string & prefix, std::initializer_list<const char *> allowed)
{
  if (!node.IsMap()) {
    throw ConfigError(prefix + ": expected a mapping");
  }
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto & kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!keys.count(key)) {
      throw ConfigError("unknown key '" + (prefix.empty() ? key : prefix + "." + key) + "'");
    }
  }
}

template <typename T>
T get(const YAML::Node & node, const std::string & key, const T & fallback)
{
  const YAML::Node v = node[key];
  if (!v) {
    return fallback;
  }
  try {
    return v.as<T>();
  } catch (const YAML::Exception &) {
    throw ConfigError("invalid value for key '" + key + "'");
  }
}

std::vector<double> numbers(const YAML::Node & node, const std::string & key)
{
  try {
    return node.as<std::vector<double>>();
  } catch (const YAML::Exception &) {
    throw ConfigError("key '" + key + "' must be a list of numbers");
  }
}

Pose2 pose(const YAML::Node & node, const std::string & key)
{
  const auto v = numbers(node, key);
  if (v.size() != 3) {
    throw ConfigError("key '" + key + "' must be [x, y, yaw]");
  }
  return {v[0], v[1], v[2]};
}

Trajectory trajectory(const YAML::Node & node, const std::string & prefix)
{
  if (!node["start"]) {
    throw ConfigError("missing key '" + prefix + ".start'");
  }
  std::vector<MotionSegment> segments;
  if (const auto segs = node["segments"]) {
    if (!segs.IsSequence()) {
      throw ConfigError("key '" + prefix + ".segments' must be a list");
    }
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const std::string p = prefix + ".segments[" + std::to_string(i) + "]";
      reject_unknown(segs[i], p, {"duration", "speed", "yaw_rate"});
      MotionSegment s;
      s.duration = get<double>(segs[i], "duration", 0.0);
      s.speed = get<double>(segs[i], "speed", 0.0);
      s.yaw_rate = get<double>(segs[i], "yaw_rate", 0.0);
      segments.push_back(s);
    }
  }
  return Trajectory(pose(node["start"], prefix + ".start"), std::move(segments));
}

template <int N>
Eigen::Matrix<double, N, N> covariance(const YAML::Node & node, const std::string & key)
{
  // Either N standard deviations (diagonal) or a full row-major N x N matrix.
  const auto v = numbers(node, key);
  Eigen::Matrix<double, N, N> m = Eigen::Matrix<double, N, N>::Zero();
  if (v.size() == static_cast<std::size_t>(N)) {
    for (int i = 0; i < N; ++i) {
      m(i, i) = v[i] * v[i];
    }
  } else if (v.size() == static_cast<std::size_t>(N * N)) {
    for (int i = 0; i < N * N; ++i) {
      m(i / N, i % N) = v[i];
    }
  } else {
    throw ConfigError("key '" + key + "' needs " + std::to_string(N) + " std-devs or " + std::to_string(N * N) + " entries");
  }
  return m;
}

YAML::Node parse_yaml(const std::string & text)
{
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception & e) {
    throw ConfigError(std::string("malformed YAML: ") + e.what());
  }
}

}  // namespace

ScenarioSpec parse_scenario(const std::string & yaml_text)
{
  const YAML::Node root = parse_yaml(yaml_text);
  reject_unknown(root, "", {"name", "duration", "dt", "seed", "noise", "clutter_rate", "ego", "targets", "sensors"});
  ScenarioSpec s;
  s.name = get<std::string>(root, "name", "custom");
  s.duration = get<double>(root, "duration", s.duration);
  s.dt = get<double>(root, "dt", s.dt);
  s.seed = get<std::uint64_t>(root, "seed", 0);
  s.noise_enabled = get<bool>(root, "noise", true);
  s.clutter_rate = get<double>(root, "clutter_rate", 0.0);
  if (!root["ego"]) {
    throw ConfigError("missing key 'ego'");
  }
  reject_unknown(root["ego"], "ego", {"start", "segments"});
  s.ego = trajectory(root["ego"], "ego");

  if (const auto targets = root["targets"]) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const std::string p = "targets[" + std::to_string(i) + "]";
      reject_unknown(targets[i], p, {"id", "length", "width", "start", "segments"});
      TargetObject t;
      t.id = get<int>(targets[i], "id", static_cast<int>(i + 1));
      t.length = get<double>(targets[i], "length", t.length);
      t.width = get<double>(targets[i], "width", t.width);
      t.trajectory = trajectory(targets[i], p);
      s.targets.push_back(t);
    }
  }

  if (const auto sensors = root["sensors"]) {
    for (std::size_t i = 0; i < sensors.size(); ++i) {
      const std::string p = "sensors[" + std::to_string(i) + "]";
      const YAML::Node n = sensors[i];
      reject_unknown(n, p, {"id", "mount", "fov", "max_range", "noise", "detections_per_target"});
      RadarSensorSpec r;
      r.id = get<int>(n, "id", static_cast<int>(i + 1));
      if (!n["mount"]) {
        throw ConfigError("missing key '" + p + ".mount'");
      }
      r.mount = pose(n["mount"], p + ".mount");
      r.fov = get<double>(n, "fov", r.fov);
      r.max_range = get<double>(n, "max_range", r.max_range);
      r.detections_per_target = get<int>(n, "detections_per_target", r.detections_per_target);
      if (const auto noise = n["noise"]) {
        reject_unknown(noise, p + ".noise", {"range", "azimuth", "range_rate"});
        r.noise.sigma_range = get<double>(noise, "range", r.noise.sigma_range);
        r.noise.sigma_azimuth = get<double>(noise, "azimuth", r.noise.sigma_azimuth);
        r.noise.sigma_range_rate = get<double>(noise, "range_rate", r.noise.sigma_range_rate);
      }
      s.sensors.push_back(r);
    }
  } else {
    s.sensors = default_radar_rig();
  }
  s.validate();
  return s;
}

ScenarioSpec load_scenario(const std::string & path) { return parse_scenario(read_file(path)); }

ParameterOverrides parse_overrides(const std::string & yaml_text, ParameterOverrides base)
{
  const YAML::Node root = parse_yaml(yaml_text);
  if (!root || root.IsNull()) {
    return base;
  }
  reject_unknown(root, "", {"grid", "filter", "measurement", "clustering", "threads"});
  FilterConfig & fc = base.filter;

  if (const auto g = root["grid"]) {
    reject_unknown(g, "grid", {"length_m", "width_m", "resolution_m"});
    fc.grid = GridSpec::centered(
      get<double>(g, "length_m", fc.grid.length_m), get<double>(g, "width_m", fc.grid.width_m),
      get<double>(g, "resolution_m", fc.grid.resolution_m));
  }
  if (const auto f = root["filter"]) {
    reject_unknown(
      f, "filter",
      {"particle_count", "epsilon", "process_noise_pos", "process_noise_vel", "sigma_v", "birth_fraction",
       "v_init_max", "max_radius", "unobserved_mass"});
    FilterParams & p = fc.filter;
    p.particle_count = get<std::size_t>(f, "particle_count", p.particle_count);
    p.epsilon = get<double>(f, "epsilon", p.epsilon);
    p.process_noise_pos = get<double>(f, "process_noise_pos", p.process_noise_pos);
    p.process_noise_vel = get<double>(f, "process_noise_vel", p.process_noise_vel);
    if (f["sigma_v"]) {
      p.sigma_v = covariance<2>(f["sigma_v"], "filter.sigma_v");
    }
    p.birth_fraction = get<double>(f, "birth_fraction", p.birth_fraction);
    p.v_init_max = get<double>(f, "v_init_max", p.v_init_max);
    p.max_radius = get<double>(f, "max_radius", p.max_radius);
    p.unobserved_mass = get<double>(f, "unobserved_mass", p.unobserved_mass);
  }
  if (const auto m = root["measurement"]) {
    reject_unknown(m, "measurement", {"sigma_f", "sigma_s"});
    fc.free_model.sigma_f = get<double>(m, "sigma_f", fc.free_model.sigma_f);
    if (m["sigma_s"]) {
      fc.static_model.sigma_s = covariance<3>(m["sigma_s"], "measurement.sigma_s");
    }
  }
  if (const auto c = root["clustering"]) {
    reject_unknown(c, "clustering", {"eps", "min_pts", "gate", "consistent_frames"});
    base.clustering.eps = get<double>(c, "eps", base.clustering.eps);
    base.clustering.min_pts = get<std::size_t>(c, "min_pts", base.clustering.min_pts);
    base.clustering.gate = get<double>(c, "gate", base.clustering.gate);
    base.clustering.consistent_frames = get<std::size_t>(c, "consistent_frames", base.clustering.consistent_frames);
  }
  fc.threads = get<unsigned>(root, "threads", fc.threads);
  fc.validate();
  if (!(base.clustering.eps > 0.0) || base.clustering.min_pts == 0 || !(base.clustering.gate > 0.0)) {
    throw ConfigError("clustering.eps/min_pts/gate must be positive");
  }
  return base;
}

ParameterOverrides load_overrides(const std::string & path, ParameterOverrides base)
{
  return parse_overrides(read_file(path), std::move(base));
}

}  // namespace dogm
