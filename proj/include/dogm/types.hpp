#ifndef DOGM_TYPES_HPP_
#define DOGM_TYPES_HPP_

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>

namespace dogm
{

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Planar pose; yaw in radians, counter-clockwise from +x.
struct Pose2
{
  double x{0.0};
  double y{0.0};
  double yaw{0.0};

  Vec2 position() const { return {x, y}; }

  /// Maps a point expressed in this pose's frame into the parent frame.
  Vec2 transform(const Vec2 & local) const
  {
    const double c = std::cos(yaw);
    const double s = std::sin(yaw);
    return {x + c * local.x() - s * local.y(), y + s * local.x() + c * local.y()};
  }

  Vec2 rotate(const Vec2 & local) const
  {
    const double c = std::cos(yaw);
    const double s = std::sin(yaw);
    return {c * local.x() - s * local.y(), s * local.x() + c * local.y()};
  }

  bool is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(yaw); }
};

/// Ego vehicle state in the global frame.
struct EgoState
{
  Pose2 pose;
  Vec2 velocity{Vec2::Zero()};
  double yaw_rate{0.0};
};

/// Invalid or inconsistent configuration (bad parameters, unknown sensor, ...).
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Caller violated an operation's usage contract (off-lattice time, unknown name, ...).
class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline double wrap_angle(double a)
{
  return std::remainder(a, 2.0 * M_PI);
}

}  // namespace dogm

#endif  // DOGM_TYPES_HPP_
