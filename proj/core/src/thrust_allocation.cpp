#include "dock/thrust_allocation.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "dock/vessel_model.hpp"

namespace dock::alloc {

AllocationResult allocate(const Eigen::Vector3d& tau,
                          const model::ModelParams& params,
                          const std::array<double, 2>& hold_azimuth) {
  const Eigen::Matrix<double, 3, 4> b = model::thruster_force_matrix(params);
  const Eigen::Matrix3d gram = b * b.transpose();
  Eigen::Vector4d f = b.transpose() * gram.ldlt().solve(tau);

  AllocationResult out;
  for (int i = 0; i < 2; ++i) {
    Eigen::Vector2d fi(f[2 * i], f[2 * i + 1]);
    double norm = fi.norm();
    if (norm > params.f_max) {
      fi *= params.f_max / norm;
      norm = params.f_max;
      out.saturated = true;
    }
    if (norm > 1e-9) {
      out.commands.azimuth[i] = std::atan2(fi[1], fi[0]);
    } else {
      out.commands.azimuth[i] = hold_azimuth[i];
      fi.setZero();
      norm = 0.0;
    }
    double speed = std::sqrt(norm / params.thrust_coeff);
    if (speed > params.n_max) {
      speed = params.n_max;
      out.saturated = true;
    }
    out.commands.speed[i] = speed;
    f[2 * i] = fi[0];
    f[2 * i + 1] = fi[1];
  }
  out.forces = model::ThrusterForces::from_vec(f);
  return out;
}

}  // namespace dock::alloc
