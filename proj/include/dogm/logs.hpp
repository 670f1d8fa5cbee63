#ifndef DOGM_LOGS_HPP_
#define DOGM_LOGS_HPP_

#include "dogm/dynamic_grid_filter.hpp"
#include "dogm/simulator.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace dogm
{

/// Malformed replay log. what() names the file and line.
class LogParseError : public std::runtime_error
{
public:
  LogParseError(const std::string & source, std::size_t line, const std::string & reason);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Line-delimited detection stream. Layout:
///
///     # comment
///     sensor,<id>,<x>,<y>,<yaw>,<fov>,<max_range>
///     ego,<t>,<x>,<y>,<yaw>,<vx>,<vy>,<yaw_rate>       (starts a frame)
///     <t>,<sensor_id>,<range>,<azimuth>,<range_rate>   (one detection)
///     end,<frame_count>
///
/// Doubles use the shortest round-trip representation, so a parsed log
/// reproduces the written values bit for bit.
struct DetectionLog
{
  SensorRig rig;
  std::vector<SensorFrame> frames;
};

void write_detection_log(std::ostream & os, const SensorRig & rig, const std::vector<SensorFrame> & frames);
DetectionLog read_detection_log(std::istream & is, const std::string & source = "detections");

/// Ground truth stream:
///
///     frame,<t>,<x>,<y>,<yaw>,<vx>,<vy>,<yaw_rate>
///     target,<t>,<id>,<x>,<y>,<yaw>,<vx>,<vy>,<length>,<width>,<visible 0|1>
///     end,<frame_count>
void write_truth_log(std::ostream & os, const std::vector<GroundTruthFrame> & frames);
std::vector<GroundTruthFrame> read_truth_log(std::istream & is, const std::string & source = "truth");

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace dogm

#endif  // DOGM_LOGS_HPP_
