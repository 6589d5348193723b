#include "dock/dp_controller.hpp"

#include <cmath>

#include "dock/vessel_model.hpp"

#include <gtest/gtest.h>

namespace {

using namespace dock;
using namespace dock::ctrl;

TEST(PoseError, WrapsHeading) {
  const model::Pose pose{1.0, 2.0, 3.0};
  const model::Pose ref{0.0, 4.0, -3.0};
  const Eigen::Vector3d e = pose_error(pose, ref);
  EXPECT_DOUBLE_EQ(e[0], 1.0);
  EXPECT_DOUBLE_EQ(e[1], -2.0);
  EXPECT_NEAR(e[2], 6.0 - 2.0 * model::kPi, 1e-15);
}

TEST(Control, ZeroErrorPassesFeedforwardThrough) {
  const model::ModelParams params;
  const DpGains gains;
  ControllerState cs;
  model::VesselState x;
  x.pose = {10.0, -5.0, 0.8};
  x.velocity = {0.5, 0.1, -0.02};
  const Eigen::Vector3d acc{0.05, 0.0, 0.01};
  const auto cmd = control(cs, x, x.pose, x.velocity, acc, gains, params, 0.1);
  EXPECT_LT(cmd.feedback.norm(), 1e-12);
  EXPECT_EQ((cmd.tau - cmd.feedforward).cwiseAbs().maxCoeff(), 0.0);
  // feedforward matches the model directly
  EXPECT_TRUE(cmd.feedforward.isApprox(
      model::tracking_feedforward(x.velocity, acc, params), 1e-13));
}

TEST(Control, ProportionalActionOpposesPositionError) {
  const model::ModelParams params;
  const DpGains gains;
  ControllerState cs;
  model::VesselState x;
  x.pose = {1.0, 0.0, 0.0};  // 1 m north of the reference
  const model::Pose ref{0.0, 0.0, 0.0};
  const auto cmd = control(cs, x, ref, model::BodyVelocity{},
                           Eigen::Vector3d::Zero(), gains, params, 0.0);
  EXPECT_NEAR(cmd.feedback[0], -gains.kp[0], 1e-12);
  EXPECT_NEAR(cmd.feedback[1], 0.0, 1e-12);
  EXPECT_NEAR(cmd.feedback[2], 0.0, 1e-12);
}

TEST(Control, FeedbackRotatesIntoBodyFrame) {
  const model::ModelParams params;
  const DpGains gains;
  ControllerState cs;
  model::VesselState x;
  x.pose = {1.0, 0.0, model::kPi / 2.0};  // pointing east, offset north
  const model::Pose ref{0.0, 0.0, model::kPi / 2.0};
  const auto cmd = control(cs, x, ref, model::BodyVelocity{},
                           Eigen::Vector3d::Zero(), gains, params, 0.0);
  // the north error maps to negative body sway force at this heading
  EXPECT_NEAR(cmd.feedback[0], 0.0, 1e-9);
  EXPECT_NEAR(cmd.feedback[1], gains.kp[0], 1e-9);
  EXPECT_NEAR(cmd.feedback[2], 0.0, 1e-9);
}

TEST(Control, DerivativeTermUsesVelocityMismatch) {
  const model::ModelParams params;
  DpGains gains;
  gains.ki.setZero();
  ControllerState cs;
  model::VesselState x;
  x.velocity.surge = 1.0;  // reference is at rest, poses agree
  const auto cmd = control(cs, x, model::Pose{}, model::BodyVelocity{},
                           Eigen::Vector3d::Zero(), gains, params, 0.1);
  // feedforward is zero for a resting reference
  EXPECT_LT(cmd.feedforward.norm(), 1e-12);
  EXPECT_NEAR(cmd.tau[0], -gains.kd[0], 1e-9);
}

TEST(Control, IntegralAccumulatesAsForceContribution) {
  const model::ModelParams params;
  const DpGains gains;
  ControllerState cs;
  model::VesselState x;
  x.pose = {1.0, 0.0, 0.0};
  const model::Pose ref{0.0, 0.0, 0.0};
  control(cs, x, ref, model::BodyVelocity{}, Eigen::Vector3d::Zero(), gains,
          params, 0.1);
  // one step: ki * err * dt = 10 * 1 * 0.1
  EXPECT_NEAR(cs.integral[0], 1.0, 1e-12);
  control(cs, x, ref, model::BodyVelocity{}, Eigen::Vector3d::Zero(), gains,
          params, 0.1);
  EXPECT_NEAR(cs.integral[0], 2.0, 1e-12);
}

TEST(Control, AntiWindupClampsTheContribution) {
  const model::ModelParams params;
  const DpGains gains;
  ControllerState cs;
  model::VesselState x;
  x.pose = {50.0, -50.0, 3.0};  // large persistent error
  const model::Pose ref{0.0, 0.0, 0.0};
  for (int i = 0; i < 1000; ++i) {
    control(cs, x, ref, model::BodyVelocity{}, Eigen::Vector3d::Zero(), gains,
            params, 0.1);
    EXPECT_LE(std::abs(cs.integral[0]), gains.integral_limit[0]);
    EXPECT_LE(std::abs(cs.integral[1]), gains.integral_limit[1]);
    EXPECT_LE(std::abs(cs.integral[2]), gains.integral_limit[2]);
  }
  EXPECT_DOUBLE_EQ(cs.integral[0], gains.integral_limit[0]);
  EXPECT_DOUBLE_EQ(cs.integral[1], -gains.integral_limit[1]);
}

TEST(Control, IntegralStateCarriesAcrossCalls) {
  const model::ModelParams params;
  const DpGains gains;
  ControllerState cs;
  cs.integral << 25.0, 0.0, 0.0;
  model::VesselState x;  // zero error, zero rates
  DpGains no_ki = gains;
  no_ki.ki.setZero();
  const auto cmd = control(cs, x, model::Pose{}, model::BodyVelocity{},
                           Eigen::Vector3d::Zero(), no_ki, params, 0.1);
  EXPECT_NEAR(cmd.feedback[0], -25.0, 1e-12);
}

}  // namespace
