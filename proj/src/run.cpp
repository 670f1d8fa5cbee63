#include "dogm/run.hpp"

#include "dogm/logs.hpp"
#include "dogm/snapshot.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace dogm
{

namespace fs = std::filesystem;

namespace
{

struct Fnv
{
  std::uint64_t h{0xcbf29ce484222325ULL};

  void bytes(const void * data, std::size_t n)
  {
    const auto * p = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h = (h ^ p[i]) * 0x100000001b3ULL;
    }
  }
  void number(double v) { bytes(&v, sizeof v); }
  void integer(std::int64_t v) { bytes(&v, sizeof v); }
};

std::string fixed(double v)
{
  if (std::isnan(v)) {
    return "nan";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string hex(std::uint64_t v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::ofstream open_output(const fs::path & path, std::ios::openmode mode = std::ios::out)
{
  std::ofstream os(path, mode);
  if (!os) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  return os;
}

std::string frame_name(std::size_t frame, const char * ext)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "frame_%06zu.%s", frame, ext);
  return buf;
}

void write_particles(const fs::path & path, std::span<const Particle> particles)
{
  auto os = open_output(path);
  os << "x,y,vx,vy,w_position,w_velocity\n";
  for (const auto & p : particles) {
    os << format_double(p.position.x()) << ',' << format_double(p.position.y()) << ','
       << format_double(p.velocity.x()) << ',' << format_double(p.velocity.y()) << ','
       << format_double(p.w_position) << ',' << format_double(p.w_velocity) << '\n';
  }
}

void write_manifest(
  std::ostream & os, const RunConfig & config, const ScenarioSpec * scenario, const ParameterOverrides & params,
  const std::vector<ModeResult> & results)
{
  const FilterConfig & fc = params.filter;
  const FilterParams & p = fc.filter;
  os << "version: " << kVersion << '\n';
  if (config.replay_detections.empty()) {
    os << "scenario: " << config.scenario << '\n';
    os << "scenario_name: " << scenario->name << '\n';
    os << "duration: " << format_double(scenario->duration) << '\n';
    os << "dt: " << format_double(scenario->dt) << '\n';
    os << "noise: " << (scenario->noise_enabled ? "true" : "false") << '\n';
    os << "clutter_rate: " << format_double(scenario->clutter_rate) << '\n';
  } else {
    os << "replay_detections: " << config.replay_detections << '\n';
    os << "replay_truth: " << config.replay_truth << '\n';
  }
  os << "seed: " << *config.seed << '\n';
  os << "config: " << config.config_path << '\n';
  os << "modes:";
  for (auto m : config.modes) {
    os << ' ' << to_string(m);
  }
  os << '\n';
  os << "grid: {length_m: " << format_double(fc.grid.length_m) << ", width_m: " << format_double(fc.grid.width_m)
     << ", resolution_m: " << format_double(fc.grid.resolution_m) << "}\n";
  os << "filter: {particle_count: " << p.particle_count << ", epsilon: " << format_double(p.epsilon)
     << ", process_noise_pos: " << format_double(p.process_noise_pos)
     << ", process_noise_vel: " << format_double(p.process_noise_vel) << ", sigma_v: [" << format_double(p.sigma_v(0, 0))
     << ", " << format_double(p.sigma_v(0, 1)) << ", " << format_double(p.sigma_v(1, 0)) << ", "
     << format_double(p.sigma_v(1, 1)) << "], birth_fraction: " << format_double(p.birth_fraction)
     << ", v_init_max: " << format_double(p.v_init_max) << ", max_radius: " << format_double(p.max_radius)
     << ", unobserved_mass: " << format_double(p.unobserved_mass) << "}\n";
  os << "measurement: {sigma_f: " << format_double(fc.free_model.sigma_f) << ", sigma_s: [";
  for (int i = 0; i < 9; ++i) {
    os << (i ? ", " : "") << format_double(fc.static_model.sigma_s(i / 3, i % 3));
  }
  os << "]}\n";
  os << "clustering: {eps: " << format_double(params.clustering.eps) << ", min_pts: " << params.clustering.min_pts
     << ", gate: " << format_double(params.clustering.gate)
     << ", consistent_frames: " << params.clustering.consistent_frames << "}\n";
  os << "threads: " << fc.threads << '\n';
  os << "snapshot_every: " << config.snapshot_every << '\n';
  for (const auto & r : results) {
    os << "stream_hash_" << to_string(r.mode) << ": " << hex(r.stream_hash) << '\n';
    os << "reset_events_" << to_string(r.mode) << ": " << r.reset_events << '\n';
  }
  os << "metrics: " << (results.empty() || results.front().metrics ? "computed" : "skipped (no truth log)") << '\n';
}

}  // namespace

RecordedStream record_scenario(const ScenarioSpec & scenario)
{
  const Simulator sim(scenario);
  RecordedStream stream;
  stream.rig = scenario.rig();
  const std::size_t n = sim.frame_count();
  stream.frames.reserve(n);
  stream.truth.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    SimulationStep step = sim.step_at(k);
    stream.frames.push_back(step.sensor_frame());
    stream.truth.push_back(std::move(step.truth));
  }
  return stream;
}

std::uint64_t stream_hash(const std::vector<SensorFrame> & frames)
{
  Fnv h;
  for (const auto & f : frames) {
    h.number(f.timestamp);
    h.number(f.ego.pose.x);
    h.number(f.ego.pose.y);
    h.number(f.ego.pose.yaw);
    h.number(f.ego.velocity.x());
    h.number(f.ego.velocity.y());
    h.number(f.ego.yaw_rate);
    h.integer(static_cast<std::int64_t>(f.detections.size()));
    for (const auto & d : f.detections) {
      h.number(d.timestamp);
      h.integer(d.sensor_id);
      h.number(d.range);
      h.number(d.azimuth);
      h.number(d.range_rate);
    }
  }
  return h.h;
}

ModeResult run_mode(
  const RecordedStream & stream, const ParameterOverrides & params, WeightMode mode, const FrameObserver & observer)
{
  ModeResult result;
  result.mode = mode;
  result.stream_hash = stream_hash(stream.frames);
  const bool evaluate = !stream.truth.empty();
  if (evaluate && stream.truth.size() != stream.frames.size()) {
    throw UsageError("truth log has " + std::to_string(stream.truth.size()) + " frames, detection log has " +
                     std::to_string(stream.frames.size()));
  }

  FilterConfig fc = params.filter;
  fc.filter.weight_mode = mode;
  DynamicGridFilter filter(fc, stream.rig);
  std::vector<FrameEvaluation> evaluations;
  evaluations.reserve(stream.frames.size());
  for (std::size_t k = 0; k < stream.frames.size(); ++k) {
    filter.process(stream.frames[k]);
    if (evaluate) {
      const auto candidates = filter.dynamic_particles();
      const auto clusters = cluster_particles(filter.particles(), candidates, mode, params.clustering);
      evaluations.push_back(evaluate_frame(clusters, stream.truth[k], params.clustering.gate));
    }
    if (observer) {
      observer(k, filter);
    }
  }
  result.reset_events = filter.reset_events();
  if (evaluate && !evaluations.empty()) {
    result.metrics = compute_metrics(evaluations, params.clustering.consistent_frames);
  }
  return result;
}

void write_metrics_csv(std::ostream & os, const std::vector<ModeResult> & results)
{
  os << "mode,delta_x,delta_v,t_d,D\n";
  for (const auto & r : results) {
    if (!r.metrics) {
      continue;
    }
    const auto & m = *r.metrics;
    os << to_string(r.mode) << ',' << fixed(m.delta_x) << ',' << fixed(m.delta_v) << ',' << fixed(m.t_d) << ','
       << fixed(m.duration_fraction) << '\n';
  }
}

void write_duration_csv(std::ostream & os, const std::vector<ModeResult> & results)
{
  os << "mode,object_id,duration\n";
  for (const auto & r : results) {
    if (!r.metrics) {
      continue;
    }
    for (const auto & [id, d] : r.metrics->per_object_duration) {
      os << to_string(r.mode) << ',' << id << ',' << fixed(d) << '\n';
    }
  }
}

int run(const RunConfig & config, std::ostream & err)
{
  try {
    if (config.modes.empty()) {
      throw UsageError("--mode: at least one weight mode is required");
    }
    if (!config.seed) {
      throw UsageError("--seed: a seed is required");
    }
    if (config.replay_detections.empty() && config.scenario.empty()) {
      throw UsageError("scenario: a built-in name or scenario file is required");
    }

    ParameterOverrides params;
    if (!config.config_path.empty()) {
      params = load_overrides(config.config_path, params);
    }
    params.filter.seed = *config.seed;
    if (config.threads) {
      params.filter.threads = *config.threads;
    }
    params.filter.validate();

    RecordedStream stream;
    std::optional<ScenarioSpec> scenario;
    if (config.replay_detections.empty()) {
      const bool is_file = config.scenario.find('/') != std::string::npos || config.scenario.ends_with(".yaml") ||
                           config.scenario.ends_with(".yml");
      scenario = is_file ? load_scenario(config.scenario) : builtin_scenario(config.scenario);
      scenario->seed = *config.seed;
      stream = record_scenario(*scenario);
    } else {
      std::ifstream det(config.replay_detections);
      if (!det) {
        throw UsageError("cannot open detection log '" + config.replay_detections + "'");
      }
      DetectionLog log = read_detection_log(det, config.replay_detections);
      stream.rig = std::move(log.rig);
      stream.frames = std::move(log.frames);
      if (!config.replay_truth.empty()) {
        std::ifstream truth(config.replay_truth);
        if (!truth) {
          throw UsageError("cannot open truth log '" + config.replay_truth + "'");
        }
        stream.truth = read_truth_log(truth, config.replay_truth);
      }
    }

    const fs::path out(config.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) {
      throw std::runtime_error("cannot create output directory '" + out.string() + "'");
    }

    if (scenario) {
      auto det = open_output(out / "detections.log");
      write_detection_log(det, stream.rig, stream.frames);
      auto truth = open_output(out / "truth.log");
      write_truth_log(truth, stream.truth);
    }

    std::vector<ModeResult> results;
    for (WeightMode mode : config.modes) {
      const std::string name(to_string(mode));
      const fs::path snap_dir = out / "snapshots" / name;
      const fs::path trace_dir = out / "particles" / name;
      if (config.snapshot_every > 0) {
        fs::create_directories(snap_dir);
      }
      if (config.trace_particles) {
        fs::create_directories(trace_dir);
      }
      const std::size_t last = stream.frames.empty() ? 0 : stream.frames.size() - 1;
      FrameObserver observer = [&](std::size_t k, const DynamicGridFilter & filter) {
        const bool periodic = config.snapshot_every > 0 && k % config.snapshot_every == 0;
        if (periodic) {
          const auto pixels = render_grid(filter.map(), filter.particles(), mode);
          auto os = open_output(snap_dir / frame_name(k, "ppm"), std::ios::out | std::ios::binary);
          write_ppm(os, filter.map().cells_x(), filter.map().cells_y(), pixels);
        }
        if (config.trace_particles && (periodic || k == last)) {
          write_particles(trace_dir / frame_name(k, "csv"), filter.particles());
        }
      };
      results.push_back(run_mode(stream, params, mode, observer));
      if (results.back().stream_hash != results.front().stream_hash) {
        throw std::logic_error("weight modes saw different detection streams");
      }
    }

    if (!stream.truth.empty()) {
      auto metrics = open_output(out / "metrics.csv");
      write_metrics_csv(metrics, results);
      auto durations = open_output(out / "per_object_duration.csv");
      write_duration_csv(durations, results);
    }
    auto manifest = open_output(out / "manifest.txt");
    write_manifest(manifest, config, scenario ? &*scenario : nullptr, params, results);
    if (!manifest) {
      throw std::runtime_error("failed writing the manifest");
    }
    return 0;
  } catch (const LogParseError & e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const ConfigError & e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError & e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception & e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace dogm
