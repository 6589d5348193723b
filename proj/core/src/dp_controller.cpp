#include "dock/dp_controller.hpp"

#include <algorithm>

#include "dock/vessel_model.hpp"

namespace dock::ctrl {

Eigen::Vector3d pose_error(const model::Pose& pose, const model::Pose& reference) {
  return {pose.north - reference.north, pose.east - reference.east,
          model::wrap_angle(pose.heading - reference.heading)};
}

ControlCommand control(ControllerState& state, const model::VesselState& measured,
                       const model::Pose& reference_pose,
                       const model::BodyVelocity& reference_velocity,
                       const Eigen::Vector3d& reference_acceleration,
                       const DpGains& gains, const model::ModelParams& params,
                       double dt) {
  const Eigen::Vector3d err = pose_error(measured.pose, reference_pose);
  const Eigen::Matrix3d rot = model::rotation_matrix(measured.pose.heading);
  const Eigen::Vector3d err_rate =
      rot * measured.velocity.vec() -
      model::rotation_matrix(reference_pose.heading) * reference_velocity.vec();

  for (int i = 0; i < 3; ++i) {
    state.integral[i] += gains.ki[i] * err[i] * dt;
    state.integral[i] = std::clamp(state.integral[i], -gains.integral_limit[i],
                                   gains.integral_limit[i]);
  }

  ControlCommand out;
  out.feedforward = model::tracking_feedforward(reference_velocity,
                                                reference_acceleration, params);
  out.feedback = -(rot.transpose() *
                   (gains.kp.cwiseProduct(err) + state.integral +
                    gains.kd.cwiseProduct(err_rate)));
  out.tau = out.feedforward + out.feedback;
  return out;
}

}  // namespace dock::ctrl
