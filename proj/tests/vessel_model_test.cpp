#include "dock/vessel_model.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace {

using namespace dock::model;

TEST(WrapAngle, StaysInHalfOpenInterval) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = dist(rng);
    const double w = wrap_angle(a);
    EXPECT_GT(w, -kPi);
    EXPECT_LE(w, kPi);
    EXPECT_NEAR(std::sin(w), std::sin(a), 1e-12);
    EXPECT_NEAR(std::cos(w), std::cos(a), 1e-12);
  }
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(0.0), 0.0);
}

TEST(Rotation, MatchesHandValues) {
  const Eigen::Matrix3d r = rotation_matrix(kPi / 2.0);
  EXPECT_NEAR(r(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(r(0, 1), -1.0, 1e-15);
  EXPECT_NEAR(r(1, 0), 1.0, 1e-15);
  EXPECT_NEAR(r(2, 2), 1.0, 1e-15);
  const Eigen::Matrix2d top = rotation_matrix(0.4).topLeftCorner<2, 2>();
  EXPECT_TRUE(top.isApprox(rotation_matrix2(0.4), 1e-15));
}

TEST(Rotation, HeadingDerivativeMatchesFiniteDifference) {
  const double h = 1e-6;
  for (double psi : {0.0, 0.7, -2.2, 3.1}) {
    const Eigen::Matrix3d fd =
        (rotation_matrix(psi + h) - rotation_matrix(psi - h)) / (2.0 * h);
    EXPECT_TRUE(rotation_matrix_heading_derivative(psi).isApprox(fd, 1e-8));
  }
}

TEST(Damping, PolynomialValues) {
  const ModelParams p;
  EXPECT_DOUBLE_EQ(surge_damping(p, 1.0), 200.0);
  EXPECT_DOUBLE_EQ(surge_damping(p, 0.0), 50.0);
  EXPECT_DOUBLE_EQ(sway_damping(p, 1.0), 380.0);
  EXPECT_DOUBLE_EQ(yaw_damping(p, 0.1), 340.0);
  // odd symmetry of the damping force
  BodyVelocity nu{-0.8, 0.4, -0.2};
  BodyVelocity mnu{0.8, -0.4, 0.2};
  EXPECT_TRUE(damping_force(p, nu).isApprox(-damping_force(p, mnu), 1e-12));
}

TEST(Damping, JacobianMatchesFiniteDifference) {
  const ModelParams p;
  const BodyVelocity nu{0.6, -0.3, 0.15};
  const double h = 1e-7;
  const Eigen::Matrix3d jac = damping_force_jacobian(p, nu);
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d lo = nu.vec(), hi = nu.vec();
    hi[i] += h;
    lo[i] -= h;
    const Eigen::Vector3d fd = (damping_force(p, BodyVelocity::from_vec(hi)) -
                                damping_force(p, BodyVelocity::from_vec(lo))) /
                               (2.0 * h);
    EXPECT_TRUE(jac.col(i).isApprox(fd, 1e-6)) << "column " << i;
  }
}

TEST(Coriolis, SkewSymmetric) {
  const ModelParams p;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const BodyVelocity nu{dist(rng), dist(rng), dist(rng)};
    const Eigen::Matrix3d c = coriolis_matrix(p, nu);
    EXPECT_LT((c + c.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Thrusters, ForceMapMatchesMatrix) {
  const ModelParams p;
  const ThrusterForces u{120.0, 40.0, -60.0, 25.0};
  const Eigen::Vector3d tau = thruster_force_map(p, u);
  EXPECT_TRUE(tau.isApprox(thruster_force_matrix(p) * u.vec(), 1e-13));
  EXPECT_DOUBLE_EQ(tau[0], 60.0);
  EXPECT_DOUBLE_EQ(tau[1], 65.0);
  EXPECT_DOUBLE_EQ(tau[2], 40.0 * 1.8 + 25.0 * (-1.8));
}

TEST(PlanningDynamics, PureSurgeDecay) {
  const ModelParams p;
  VesselState x;
  x.velocity.surge = 1.0;
  const Vector6d dx = planning_dynamics(x, ThrusterForces{}, p);
  EXPECT_DOUBLE_EQ(dx[0], 1.0);  // north rate at zero heading
  EXPECT_DOUBLE_EQ(dx[1], 0.0);
  // scaled surge inertia 2.5 * 2100, damping 200 at 1 m/s
  EXPECT_NEAR(dx[3], -200.0 / 5250.0, 1e-15);
  EXPECT_DOUBLE_EQ(dx[4], 0.0);
  EXPECT_DOUBLE_EQ(dx[5], 0.0);
}

TEST(PlanningDynamics, JacobiansMatchFiniteDifference) {
  const ModelParams p;
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    VesselState x;
    x.pose = {10.0 * dist(rng), 10.0 * dist(rng), 3.0 * dist(rng)};
    x.velocity = {dist(rng), dist(rng), 0.1 * dist(rng)};
    ThrusterForces u{300.0 * dist(rng), 300.0 * dist(rng), 300.0 * dist(rng),
                     300.0 * dist(rng)};
    const PlanningJacobians jac = planning_dynamics_jacobians(x, u, p);

    const double h = 1e-6;
    Eigen::Matrix<double, 6, 6> fdx;
    for (int i = 0; i < 6; ++i) {
      Vector6d lo = x.vec(), hi = x.vec();
      hi[i] += h;
      lo[i] -= h;
      fdx.col(i) = (planning_dynamics(VesselState::from_vec(hi), u, p) -
                    planning_dynamics(VesselState::from_vec(lo), u, p)) /
                   (2.0 * h);
    }
    EXPECT_LT((jac.x - fdx).cwiseAbs().maxCoeff(), 1e-6);

    Eigen::Matrix<double, 6, 4> fdu;
    for (int i = 0; i < 4; ++i) {
      Eigen::Vector4d lo = u.vec(), hi = u.vec();
      hi[i] += h;
      lo[i] -= h;
      fdu.col(i) = (planning_dynamics(x, ThrusterForces::from_vec(hi), p) -
                    planning_dynamics(x, ThrusterForces::from_vec(lo), p)) /
                   (2.0 * h);
    }
    EXPECT_LT((jac.u - fdu).cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(SimulationDynamics, EnergyDissipatesWithoutThrust) {
  ModelParams p;
  p.coupling.m23 = 300.0;
  p.coupling.d23 = -40.0;
  p.coupling.d32 = -60.0;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ActuatorState idle;  // zero speed, zero thrust
  ActuatorCommands cmd;
  for (int i = 0; i < 200; ++i) {
    VesselState x;
    x.pose = {dist(rng), dist(rng), 3.0 * dist(rng)};
    x.velocity = {dist(rng), dist(rng), 0.5 * dist(rng)};
    const Eigen::Vector3d nu = x.velocity.vec();
    if (nu.norm() < 1e-3) continue;
    const PlantDerivative d = simulation_dynamics(x, idle, cmd, p);
    const double power = nu.dot(simulation_inertia(p) * d.vessel.tail<3>());
    EXPECT_LE(power, 1e-9);
  }
}

TEST(SimulationDynamics, ActuatorLagAndRateLimit) {
  const ModelParams p;
  VesselState x;
  ActuatorState a;
  a.azimuth = {0.0, 0.0};
  a.speed = {0.0, 0.0};
  ActuatorCommands cmd;
  cmd.azimuth = {2.0, -2.0};  // far away: rate limit binds
  cmd.speed = {8.0, 40.0};    // second command exceeds n_max
  const PlantDerivative d = simulation_dynamics(x, a, cmd, p);
  EXPECT_DOUBLE_EQ(d.azimuth_rate[0], deg2rad(60.0));
  EXPECT_DOUBLE_EQ(d.azimuth_rate[1], -deg2rad(60.0));
  EXPECT_DOUBLE_EQ(d.speed_rate[0], 8.0 / 0.5);
  EXPECT_DOUBLE_EQ(d.speed_rate[1], 16.0 / 0.5);  // clamped to n_max first

  ActuatorState near_target;
  near_target.azimuth = {1.95, 0.0};
  cmd.azimuth = {2.0, 0.0};
  cmd.speed = {0.0, 0.0};
  const PlantDerivative d2 = simulation_dynamics(x, near_target, cmd, p);
  EXPECT_NEAR(d2.azimuth_rate[0], 0.05 / 0.2, 1e-12);  // first order region
}

TEST(SimulationDynamics, ActuatorForceOracle) {
  const ModelParams p;
  ActuatorState a;
  a.azimuth = {0.0, kPi / 2.0};
  a.speed = {4.0, 3.0};
  const Eigen::Vector3d tau = actuator_force(p, a);
  // thrust = 2 n |n|: 32 N surge from the first, 18 N sway from the second
  EXPECT_NEAR(tau[0], 32.0, 1e-12);
  EXPECT_NEAR(tau[1], 18.0, 1e-12);
  EXPECT_NEAR(tau[2], -1.8 * 18.0, 1e-12);

  a.speed = {-4.0, 0.0};  // reverse thrust flips sign
  a.azimuth = {0.0, 0.0};
  EXPECT_NEAR(actuator_force(p, a)[0], -32.0, 1e-12);
}

TEST(SimulationDynamics, ExternalForceEntersBodyFrame) {
  const ModelParams p;
  VesselState x;
  ActuatorState a;
  ActuatorCommands cmd;
  const Eigen::Vector3d f{100.0, 0.0, 0.0};
  const PlantDerivative with = simulation_dynamics(x, a, cmd, p, f);
  const PlantDerivative without = simulation_dynamics(x, a, cmd, p);
  EXPECT_NEAR(with.vessel[3] - without.vessel[3], 100.0 / p.m11, 1e-12);
}

TEST(Feedforward, InertiaPlusDamping) {
  const ModelParams p;
  const BodyVelocity nu{1.0, 0.0, 0.0};
  EXPECT_TRUE(tracking_feedforward(nu, Eigen::Vector3d::Zero(), p)
                  .isApprox(Eigen::Vector3d{200.0, 0.0, 0.0}, 1e-13));
  EXPECT_TRUE(tracking_feedforward(nu, Eigen::Vector3d{0.1, 0.0, 0.0}, p)
                  .isApprox(Eigen::Vector3d{410.0, 0.0, 0.0}, 1e-13));
  // at rest the feedforward vanishes
  EXPECT_LT(tracking_feedforward(BodyVelocity{}, Eigen::Vector3d::Zero(), p)
                .norm(),
            1e-15);
}

}  // namespace
