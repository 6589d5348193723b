#pragma once

#include <array>

#include <Eigen/Core>

#include "dock/model_params.hpp"
#include "dock/vessel_types.hpp"

namespace dock::alloc {

struct AllocationResult {
  model::ActuatorCommands commands;
  model::ThrusterForces forces;  // per-thruster forces after clipping [N]
  bool saturated{false};
};

/// Distributes a generalized body force over the two azimuth thrusters with
/// the minimum-norm (pseudoinverse) solution, clips each planar force to the
/// per-thruster limit, and converts to azimuth angles plus propeller speeds
/// through the quadratic propeller law. When a thruster carries no force its
/// azimuth command holds the supplied angle so idle drives do not swing.
AllocationResult allocate(const Eigen::Vector3d& tau,
                          const model::ModelParams& params,
                          const std::array<double, 2>& hold_azimuth = {0.0, 0.0});

}  // namespace dock::alloc
