#include "dock/vessel_model.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

namespace dock::model {

Eigen::Matrix2d rotation_matrix2(double heading) {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

Eigen::Matrix3d rotation_matrix(double heading) {
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  r.topLeftCorner<2, 2>() = rotation_matrix2(heading);
  return r;
}

Eigen::Matrix3d rotation_matrix_heading_derivative(double heading) {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  Eigen::Matrix3d r = Eigen::Matrix3d::Zero();
  r(0, 0) = -s;
  r(0, 1) = -c;
  r(1, 0) = c;
  r(1, 1) = -s;
  return r;
}

double surge_damping(const ModelParams& p, double u) {
  return -p.X_u - p.X_uu * std::abs(u) - p.X_uuu * u * u;
}

double sway_damping(const ModelParams& p, double v) {
  return -p.Y_v - p.Y_vv * std::abs(v) - p.Y_vvv * v * v;
}

double yaw_damping(const ModelParams& p, double r) {
  return -p.N_r - p.N_rr * std::abs(r);
}

Eigen::Vector3d damping_force(const ModelParams& p, const BodyVelocity& nu) {
  return {surge_damping(p, nu.surge) * nu.surge,
          sway_damping(p, nu.sway) * nu.sway,
          yaw_damping(p, nu.yaw_rate) * nu.yaw_rate};
}

Eigen::Matrix3d damping_force_jacobian(const ModelParams& p,
                                       const BodyVelocity& nu) {
  Eigen::Matrix3d d = Eigen::Matrix3d::Zero();
  d(0, 0) = -p.X_u - 2.0 * p.X_uu * std::abs(nu.surge) -
            3.0 * p.X_uuu * nu.surge * nu.surge;
  d(1, 1) = -p.Y_v - 2.0 * p.Y_vv * std::abs(nu.sway) -
            3.0 * p.Y_vvv * nu.sway * nu.sway;
  d(2, 2) = -p.N_r - 2.0 * p.N_rr * std::abs(nu.yaw_rate);
  return d;
}

Eigen::Matrix3d coriolis_matrix(const ModelParams& p, const BodyVelocity& nu) {
  Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
  c(0, 2) = -p.m22 * nu.sway;
  c(1, 2) = p.m11 * nu.surge;
  c(2, 0) = p.m22 * nu.sway;
  c(2, 1) = -p.m11 * nu.surge;
  return c;
}

Eigen::Matrix<double, 3, 4> thruster_force_matrix(const ModelParams& p) {
  Eigen::Matrix<double, 3, 4> b;
  b << 1.0, 0.0, 1.0, 0.0,
       0.0, 1.0, 0.0, 1.0,
       0.0, p.l1, 0.0, p.l2;
  return b;
}

Eigen::Vector3d thruster_force_map(const ModelParams& p,
                                   const ThrusterForces& u) {
  return {u.fx1 + u.fx2, u.fy1 + u.fy2, p.l1 * u.fy1 + p.l2 * u.fy2};
}

Vector6d planning_dynamics(const VesselState& x, const ThrusterForces& u,
                           const ModelParams& p) {
  const Eigen::Vector3d nu = x.velocity.vec();
  const Eigen::Vector3d minv{1.0 / (p.inertia_scaling[0] * p.m11),
                             1.0 / (p.inertia_scaling[1] * p.m22),
                             1.0 / (p.inertia_scaling[2] * p.m33)};
  const Eigen::Vector3d tau = thruster_force_map(p, u);
  const Eigen::Vector3d rhs =
      tau - coriolis_matrix(p, x.velocity) * nu - damping_force(p, x.velocity);

  Vector6d dx;
  dx.head<3>() = rotation_matrix(x.pose.heading) * nu;
  dx.tail<3>() = minv.cwiseProduct(rhs);
  return dx;
}

PlanningJacobians planning_dynamics_jacobians(const VesselState& x,
                                              const ThrusterForces& u,
                                              const ModelParams& p) {
  (void)u;  // dynamics are affine in u
  const Eigen::Vector3d nu = x.velocity.vec();
  const Eigen::Vector3d minv{1.0 / (p.inertia_scaling[0] * p.m11),
                             1.0 / (p.inertia_scaling[1] * p.m22),
                             1.0 / (p.inertia_scaling[2] * p.m33)};

  PlanningJacobians jac;
  jac.x.setZero();
  jac.u.setZero();

  jac.x.topRightCorner<3, 3>() = rotation_matrix(x.pose.heading);
  jac.x.block<3, 1>(0, 2) =
      rotation_matrix_heading_derivative(x.pose.heading) * nu;

  // d(C(nu) nu)/dnu for the diagonal-inertia Coriolis matrix.
  Eigen::Matrix3d dcor;
  dcor << 0.0, -p.m22 * nu[2], -p.m22 * nu[1],
          p.m11 * nu[2], 0.0, p.m11 * nu[0],
          (p.m22 - p.m11) * nu[1], (p.m22 - p.m11) * nu[0], 0.0;

  jac.x.bottomRightCorner<3, 3>() =
      minv.asDiagonal() * (-dcor - damping_force_jacobian(p, x.velocity));
  jac.u.bottomRows<3>() = minv.asDiagonal() * thruster_force_matrix(p);

  return jac;
}

Eigen::Matrix3d simulation_inertia(const ModelParams& p) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  m(0, 0) = p.m11;
  m(1, 1) = p.m22;
  m(2, 2) = p.m33;
  m(1, 2) = p.coupling.m23;
  m(2, 1) = p.coupling.m23;
  return m;
}

Eigen::Matrix3d simulation_coriolis(const ModelParams& p,
                                    const BodyVelocity& nu) {
  // Fossen-style parameterization for the (possibly coupled) inertia.
  const double a = p.m22 * nu.sway + p.coupling.m23 * nu.yaw_rate;
  const double b = p.m11 * nu.surge;
  Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
  c(0, 2) = -a;
  c(1, 2) = b;
  c(2, 0) = a;
  c(2, 1) = -b;
  return c;
}

Eigen::Matrix3d simulation_damping(const ModelParams& p,
                                   const BodyVelocity& nu) {
  Eigen::Matrix3d d = Eigen::Matrix3d::Zero();
  d(0, 0) = surge_damping(p, nu.surge);
  d(1, 1) = sway_damping(p, nu.sway);
  d(2, 2) = yaw_damping(p, nu.yaw_rate);
  d(1, 2) = p.coupling.d23;
  d(2, 1) = p.coupling.d32;
  return d;
}

Eigen::Vector3d actuator_force(const ModelParams& p, const ActuatorState& a) {
  Eigen::Vector3d tau = Eigen::Vector3d::Zero();
  const double arm[2] = {p.l1, p.l2};
  for (int i = 0; i < 2; ++i) {
    const double thrust =
        p.thrust_coeff * a.speed[i] * std::abs(a.speed[i]);
    const double fx = thrust * std::cos(a.azimuth[i]);
    const double fy = thrust * std::sin(a.azimuth[i]);
    tau[0] += fx;
    tau[1] += fy;
    tau[2] += arm[i] * fy;
  }
  return tau;
}

PlantDerivative simulation_dynamics(const VesselState& x,
                                    const ActuatorState& a,
                                    const ActuatorCommands& cmd,
                                    const ModelParams& p,
                                    const Eigen::Vector3d& external_force) {
  const Eigen::Vector3d nu = x.velocity.vec();
  const Eigen::Vector3d tau = actuator_force(p, a) + external_force;
  const Eigen::Vector3d rhs = tau - simulation_coriolis(p, x.velocity) * nu -
                              simulation_damping(p, x.velocity) * nu;

  PlantDerivative d;
  d.vessel.head<3>() = rotation_matrix(x.pose.heading) * nu;
  d.vessel.tail<3>() =
      simulation_inertia(p).ldlt().solve(rhs);

  for (int i = 0; i < 2; ++i) {
    const double err = wrap_angle(cmd.azimuth[i] - a.azimuth[i]);
    d.azimuth_rate[i] = std::clamp(err / p.azimuth_time_constant,
                                   -p.azimuth_rate_limit,
                                   p.azimuth_rate_limit);
    const double n_cmd = std::clamp(cmd.speed[i], -p.n_max, p.n_max);
    d.speed_rate[i] = (n_cmd - a.speed[i]) / p.speed_time_constant;
  }
  return d;
}

Eigen::Vector3d tracking_feedforward(const BodyVelocity& planned_velocity,
                                     const Eigen::Vector3d& planned_accel,
                                     const ModelParams& p) {
  Eigen::Vector3d m{p.m11, p.m22, p.m33};
  return m.cwiseProduct(planned_accel) + damping_force(p, planned_velocity);
}

}  // namespace dock::model
