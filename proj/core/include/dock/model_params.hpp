#pragma once

#include <array>
#include <filesystem>

#include "dock/vessel_types.hpp"

namespace dock::model {

/// Off-diagonal sway/yaw terms of the simulation model. Zero by default so
/// the plant matches the decoupled planning model structure.
struct SimulationCoupling {
  double m23{0.0};
  double d23{0.0};
  double d32{0.0};
};

/// Vessel and actuator parameters for a small double-ended ferry.
///
/// Damping polynomials use hydrodynamic-derivative sign conventions, i.e.
/// the coefficients are negative and d11(u) = -X_u - X_uu*|u| - X_uuu*u^2
/// is positive for all u (same pattern for sway; yaw has no cubic term).
struct ModelParams {
  // Rigid-body plus added mass, diagonal part.
  double m11{2100.0};
  double m22{2800.0};
  double m33{5500.0};

  // Surge damping: linear, |u|u, u^3.
  double X_u{-50.0};
  double X_uu{-100.0};
  double X_uuu{-50.0};
  // Sway damping: linear, |v|v, v^3.
  double Y_v{-80.0};
  double Y_vv{-200.0};
  double Y_vvv{-100.0};
  // Yaw damping: linear, |r|r.
  double N_r{-300.0};
  double N_rr{-400.0};

  // Planning-model inertia amplification per axis (>= 1).
  std::array<double, 3> inertia_scaling{2.5, 2.5, 5.0};

  // Thruster lever arms along the body x axis [m]; bow positive.
  double l1{1.8};
  double l2{-1.8};

  // Actuator envelope and response.
  double f_max{500.0};                  // per-thruster force limit [N]
  double thrust_coeff{2.0};             // F = thrust_coeff * n * |n|  [N s^2]
  double n_max{16.0};                   // propeller speed limit [rev/s]
  double azimuth_rate_limit{deg2rad(60.0)};  // [rad/s]
  double azimuth_time_constant{0.2};    // [s]
  double speed_time_constant{0.5};      // [s]

  // Rectangular footprint used for collision constraints [m].
  double footprint_length{5.0};
  double footprint_width{2.8};

  SimulationCoupling coupling{};

  /// Throws std::invalid_argument when a physical constraint is broken
  /// (non-positive-definite inertia, non-dissipative damping, bad limits).
  void validate() const;
};

/// Loads parameters from JSON. Unknown keys are rejected and the result is
/// validated; both failure modes throw std::invalid_argument with the key or
/// constraint spelled out.
ModelParams load_params(const std::filesystem::path& file);

}  // namespace dock::model
