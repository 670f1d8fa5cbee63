#include "dogm/logs.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string_view>

namespace dogm
{

namespace
{

std::vector<std::string_view> split(std::string_view line)
{
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

class LineReader
{
public:
  LineReader(std::istream & is, std::string source) : is_(is), source_(std::move(source)) {}

  // Next non-blank, non-comment line; false at end of stream.
  bool next(std::vector<std::string_view> & fields)
  {
    while (std::getline(is_, buffer_)) {
      ++line_;
      const std::string_view t = trim(buffer_);
      if (t.empty() || t.front() == '#') {
        continue;
      }
      fields = split(t);
      for (auto & f : fields) {
        f = trim(f);
      }
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string & reason) const { throw LogParseError(source_, line_, reason); }

  double number(std::string_view field) const
  {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      fail("invalid number '" + std::string(field) + "'");
    }
    return v;
  }

  long integer(std::string_view field) const
  {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      fail("invalid integer '" + std::string(field) + "'");
    }
    return v;
  }

  void expect_fields(const std::vector<std::string_view> & fields, std::size_t n, const char * what) const
  {
    if (fields.size() != n) {
      fail(std::string(what) + " record needs " + std::to_string(n) + " fields, got " + std::to_string(fields.size()));
    }
  }

  std::size_t line() const { return line_; }

private:
  std::istream & is_;
  std::string source_;
  std::string buffer_;
  std::size_t line_{0};
};

void write_fields(std::ostream & os, std::initializer_list<double> values)
{
  for (double v : values) {
    os << ',' << format_double(v);
  }
  os << '\n';
}

}  // namespace

LogParseError::LogParseError(const std::string & source, std::size_t line, const std::string & reason)
: std::runtime_error(source + ":" + std::to_string(line) + ": " + reason), line_(line)
{
}

std::string format_double(double v)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_detection_log(std::ostream & os, const SensorRig & rig, const std::vector<SensorFrame> & frames)
{
  os << "# dogm detection log v1\n";
  for (const auto & m : rig.mounts()) {
    os << "sensor," << m.id;
    write_fields(os, {m.mount.x, m.mount.y, m.mount.yaw, m.fov, m.max_range});
  }
  for (const auto & f : frames) {
    os << "ego";
    write_fields(
      os, {f.timestamp, f.ego.pose.x, f.ego.pose.y, f.ego.pose.yaw, f.ego.velocity.x(), f.ego.velocity.y(),
           f.ego.yaw_rate});
    for (const auto & d : f.detections) {
      os << format_double(d.timestamp) << ',' << d.sensor_id;
      write_fields(os, {d.range, d.azimuth, d.range_rate});
    }
  }
  os << "end," << frames.size() << '\n';
}

DetectionLog read_detection_log(std::istream & is, const std::string & source)
{
  DetectionLog log;
  LineReader reader(is, source);
  std::vector<std::string_view> f;
  bool ended = false;
  while (reader.next(f)) {
    if (ended) {
      reader.fail("content after end marker");
    }
    if (f[0] == "sensor") {
      reader.expect_fields(f, 7, "sensor");
      SensorMount m;
      m.id = static_cast<int>(reader.integer(f[1]));
      m.mount = {reader.number(f[2]), reader.number(f[3]), reader.number(f[4])};
      m.fov = reader.number(f[5]);
      m.max_range = reader.number(f[6]);
      try {
        log.rig.add(m);
      } catch (const ConfigError & e) {
        reader.fail(e.what());
      }
    } else if (f[0] == "ego") {
      reader.expect_fields(f, 8, "ego");
      SensorFrame frame;
      frame.timestamp = reader.number(f[1]);
      frame.ego.pose = {reader.number(f[2]), reader.number(f[3]), reader.number(f[4])};
      frame.ego.velocity = Vec2(reader.number(f[5]), reader.number(f[6]));
      frame.ego.yaw_rate = reader.number(f[7]);
      if (!log.frames.empty() && !(frame.timestamp > log.frames.back().timestamp)) {
        reader.fail("frame timestamps must increase");
      }
      log.frames.push_back(std::move(frame));
    } else if (f[0] == "end") {
      reader.expect_fields(f, 2, "end");
      if (static_cast<std::size_t>(reader.integer(f[1])) != log.frames.size()) {
        reader.fail("end marker frame count does not match the log");
      }
      ended = true;
    } else {
      reader.expect_fields(f, 5, "detection");
      if (log.frames.empty()) {
        reader.fail("detection before the first ego record");
      }
      RadarDetection d;
      d.timestamp = reader.number(f[0]);
      d.sensor_id = static_cast<int>(reader.integer(f[1]));
      d.range = reader.number(f[2]);
      d.azimuth = reader.number(f[3]);
      d.range_rate = reader.number(f[4]);
      if (!log.rig.contains(d.sensor_id)) {
        reader.fail("unknown sensor_id " + std::to_string(d.sensor_id));
      }
      if (!(d.range >= 0.0)) {
        reader.fail("negative range");
      }
      log.frames.back().detections.push_back(d);
    }
  }
  if (!ended) {
    throw LogParseError(source, reader.line() + 1, "truncated log: missing end marker");
  }
  return log;
}

void write_truth_log(std::ostream & os, const std::vector<GroundTruthFrame> & frames)
{
  os << "# dogm truth log v1\n";
  for (const auto & f : frames) {
    os << "frame";
    write_fields(
      os, {f.timestamp, f.ego.pose.x, f.ego.pose.y, f.ego.pose.yaw, f.ego.velocity.x(), f.ego.velocity.y(),
           f.ego.yaw_rate});
    for (const auto & t : f.targets) {
      os << "target," << format_double(f.timestamp) << ',' << t.id;
      os << ',' << format_double(t.pose.x) << ',' << format_double(t.pose.y) << ',' << format_double(t.pose.yaw);
      os << ',' << format_double(t.velocity.x()) << ',' << format_double(t.velocity.y());
      os << ',' << format_double(t.length) << ',' << format_double(t.width) << ',' << (t.visible ? 1 : 0) << '\n';
    }
  }
  os << "end," << frames.size() << '\n';
}

std::vector<GroundTruthFrame> read_truth_log(std::istream & is, const std::string & source)
{
  std::vector<GroundTruthFrame> frames;
  LineReader reader(is, source);
  std::vector<std::string_view> f;
  bool ended = false;
  while (reader.next(f)) {
    if (ended) {
      reader.fail("content after end marker");
    }
    if (f[0] == "frame") {
      reader.expect_fields(f, 8, "frame");
      GroundTruthFrame frame;
      frame.timestamp = reader.number(f[1]);
      frame.ego.pose = {reader.number(f[2]), reader.number(f[3]), reader.number(f[4])};
      frame.ego.velocity = Vec2(reader.number(f[5]), reader.number(f[6]));
      frame.ego.yaw_rate = reader.number(f[7]);
      frames.push_back(std::move(frame));
    } else if (f[0] == "target") {
      reader.expect_fields(f, 11, "target");
      if (frames.empty()) {
        reader.fail("target before the first frame record");
      }
      TargetState t;
      if (reader.number(f[1]) != frames.back().timestamp) {
        reader.fail("target timestamp does not match its frame");
      }
      t.id = static_cast<int>(reader.integer(f[2]));
      t.pose = {reader.number(f[3]), reader.number(f[4]), reader.number(f[5])};
      t.velocity = Vec2(reader.number(f[6]), reader.number(f[7]));
      t.length = reader.number(f[8]);
      t.width = reader.number(f[9]);
      const long visible = reader.integer(f[10]);
      if (visible != 0 && visible != 1) {
        reader.fail("visible flag must be 0 or 1");
      }
      t.visible = visible == 1;
      frames.back().targets.push_back(t);
    } else if (f[0] == "end") {
      reader.expect_fields(f, 2, "end");
      if (static_cast<std::size_t>(reader.integer(f[1])) != frames.size()) {
        reader.fail("end marker frame count does not match the log");
      }
      ended = true;
    } else {
      reader.fail("unknown record '" + std::string(f[0]) + "'");
    }
  }
  if (!ended) {
    throw LogParseError(source, reader.line() + 1, "truncated log: missing end marker");
  }
  return frames;
}

}  // namespace dogm
