#pragma once

#include <Eigen/Core>

#include "dock/model_params.hpp"
#include "dock/vessel_types.hpp"

namespace dock::model {

/// Rotation from body to earth frame for the generalized position vector,
/// i.e. blkdiag(R2(psi), 1).
Eigen::Matrix3d rotation_matrix(double heading);

/// Planar part of rotation_matrix.
Eigen::Matrix2d rotation_matrix2(double heading);

/// d/dpsi of rotation_matrix.
Eigen::Matrix3d rotation_matrix_heading_derivative(double heading);

// Diagonal damping polynomials, positive for all arguments.
double surge_damping(const ModelParams& p, double u);
double sway_damping(const ModelParams& p, double v);
double yaw_damping(const ModelParams& p, double r);

/// D(nu) * nu for the diagonal damping model shared by planner and plant.
Eigen::Vector3d damping_force(const ModelParams& p, const BodyVelocity& nu);

/// Jacobian of damping_force with respect to nu (diagonal).
Eigen::Matrix3d damping_force_jacobian(const ModelParams& p,
                                       const BodyVelocity& nu);

/// Skew-symmetric Coriolis/centripetal matrix built from the diagonal
/// inertia, evaluated at nu.
Eigen::Matrix3d coriolis_matrix(const ModelParams& p, const BodyVelocity& nu);

/// Maps per-thruster planar forces to a generalized body force.
Eigen::Vector3d thruster_force_map(const ModelParams& p,
                                   const ThrusterForces& u);

/// The (constant) matrix behind thruster_force_map.
Eigen::Matrix<double, 3, 4> thruster_force_matrix(const ModelParams& p);

/// Control-design dynamics: diagonal inertia amplified by inertia_scaling,
/// skew-symmetric Coriolis, diagonal damping, direct force input. Returns
/// d/dt [pose; velocity].
Vector6d planning_dynamics(const VesselState& x, const ThrusterForces& u,
                           const ModelParams& p);

struct PlanningJacobians {
  Eigen::Matrix<double, 6, 6> x;
  Eigen::Matrix<double, 6, 4> u;
};
PlanningJacobians planning_dynamics_jacobians(const VesselState& x,
                                              const ThrusterForces& u,
                                              const ModelParams& p);

/// Inertia matrix of the simulation plant (no scaling, optional coupling).
Eigen::Matrix3d simulation_inertia(const ModelParams& p);
Eigen::Matrix3d simulation_coriolis(const ModelParams& p,
                                    const BodyVelocity& nu);
Eigen::Matrix3d simulation_damping(const ModelParams& p,
                                   const BodyVelocity& nu);

/// Generalized force produced by the actuators in state a.
Eigen::Vector3d actuator_force(const ModelParams& p, const ActuatorState& a);

struct PlantDerivative {
  Vector6d vessel;
  std::array<double, 2> azimuth_rate{0.0, 0.0};
  std::array<double, 2> speed_rate{0.0, 0.0};
};

/// Full plant used by the simulator: unscaled inertia, first-order azimuth
/// and propeller-speed responses (azimuth additionally rate limited), thrust
/// from the quadratic propeller law, plus an optional external generalized
/// force in the body frame (wind, contact tests).
PlantDerivative simulation_dynamics(
    const VesselState& x, const ActuatorState& a, const ActuatorCommands& cmd,
    const ModelParams& p,
    const Eigen::Vector3d& external_force = Eigen::Vector3d::Zero());

/// Model-based feedforward for the tracking controller: inertia and damping
/// response along the planned trajectory, evaluated with the unscaled
/// diagonal inertia and no Coriolis term.
Eigen::Vector3d tracking_feedforward(const BodyVelocity& planned_velocity,
                                     const Eigen::Vector3d& planned_accel,
                                     const ModelParams& p);

}  // namespace dock::model
