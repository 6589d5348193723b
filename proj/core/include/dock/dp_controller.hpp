#pragma once

#include <Eigen/Core>

#include "dock/model_params.hpp"
#include "dock/vessel_types.hpp"

namespace dock::ctrl {

/// PID gains in the earth frame plus a bound on the integral force
/// contribution [N, N, Nm].
struct DpGains {
  Eigen::Vector3d kp{100.0, 100.0, 200.0};
  Eigen::Vector3d ki{10.0, 10.0, 20.0};
  Eigen::Vector3d kd{1000.0, 1000.0, 1500.0};
  Eigen::Vector3d integral_limit{150.0, 150.0, 200.0};
};

struct ControllerState {
  // Integral force contribution [N, N, Nm]; advanced by ki * error * dt and
  // clamped to the anti-windup box after every update.
  Eigen::Vector3d integral{0.0, 0.0, 0.0};
};

struct ControlCommand {
  Eigen::Vector3d tau{0.0, 0.0, 0.0};  // generalized body force [N, N, Nm]
  Eigen::Vector3d feedforward{0.0, 0.0, 0.0};
  Eigen::Vector3d feedback{0.0, 0.0, 0.0};
};

/// Earth-frame pose error with the heading component wrapped to (-pi, pi].
Eigen::Vector3d pose_error(const model::Pose& pose, const model::Pose& reference);

/// One tracking-controller update: model feedforward along the reference
/// plus earth-frame PID feedback rotated into the body frame. The stored
/// integral is clamped so its force contribution stays inside
/// gains.integral_limit.
ControlCommand control(ControllerState& state, const model::VesselState& measured,
                       const model::Pose& reference_pose,
                       const model::BodyVelocity& reference_velocity,
                       const Eigen::Vector3d& reference_acceleration,
                       const DpGains& gains, const model::ModelParams& params,
                       double dt);

}  // namespace dock::ctrl
