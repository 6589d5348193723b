#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Core>

// Frame and unit conventions used throughout:
//  - Earth-fixed frame is NED-like: x = north [m], y = east [m], heading is
//    the rotation from north towards east [rad].
//  - Body frame velocities: surge (forward), sway (starboard), yaw rate.
//  - Forces in newtons, moments in newton-metres, angles in radians.
// Degrees appear only at file/CLI boundaries.

namespace dock::model {

inline constexpr double kPi = std::numbers::pi;

using Vector6d = Eigen::Matrix<double, 6, 1>;

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

struct Pose {
  double north{0.0};
  double east{0.0};
  double heading{0.0};

  Eigen::Vector2d position() const { return {north, east}; }
  Eigen::Vector3d vec() const { return {north, east, heading}; }
  static Pose from_vec(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
};

struct BodyVelocity {
  double surge{0.0};
  double sway{0.0};
  double yaw_rate{0.0};

  Eigen::Vector3d vec() const { return {surge, sway, yaw_rate}; }
  static BodyVelocity from_vec(const Eigen::Vector3d& v) {
    return {v[0], v[1], v[2]};
  }
};

struct VesselState {
  Pose pose;
  BodyVelocity velocity;

  Vector6d vec() const {
    Vector6d x;
    x << pose.vec(), velocity.vec();
    return x;
  }
  static VesselState from_vec(const Vector6d& x) {
    return {Pose::from_vec(x.head<3>()), BodyVelocity::from_vec(x.tail<3>())};
  }
};

/// Planar force pair per azimuth thruster, expressed in the body frame.
struct ThrusterForces {
  double fx1{0.0};
  double fy1{0.0};
  double fx2{0.0};
  double fy2{0.0};

  Eigen::Vector4d vec() const { return {fx1, fy1, fx2, fy2}; }
  static ThrusterForces from_vec(const Eigen::Vector4d& v) {
    return {v[0], v[1], v[2], v[3]};
  }
};

/// Physical azimuth-drive state: azimuth angle [rad] and signed propeller
/// speed [rev/s] for each of the two thrusters.
struct ActuatorState {
  std::array<double, 2> azimuth{0.0, 0.0};
  std::array<double, 2> speed{0.0, 0.0};
};

struct ActuatorCommands {
  std::array<double, 2> azimuth{0.0, 0.0};
  std::array<double, 2> speed{0.0, 0.0};
};

}  // namespace dock::model
