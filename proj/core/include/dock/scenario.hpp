#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "dock/dp_controller.hpp"
#include "dock/harbor_geometry.hpp"
#include "dock/model_params.hpp"
#include "dock/ocp_planner.hpp"
#include "dock/vessel_types.hpp"

namespace dock::sim {

/// Constant body-frame wind force plus a sinusoidal gust along the same
/// direction; the gust phase is drawn from the scenario seed.
struct WindModel {
  Eigen::Vector2d force{0.0, 0.0};  // body frame [N]
  double gust_amplitude{0.0};       // [N]
  double gust_period{60.0};         // [s]
};

/// Optional measurement noise fed to controller and planner (never to the
/// plant). All zero by default.
struct NoiseModel {
  double pose_std{0.0};      // north/east [m]
  double heading_std{0.0};   // [rad]
  double velocity_std{0.0};  // body velocities [m/s], [rad/s]
};

enum class PlanLatencyMode {
  Zero,      // a finished plan activates at the tick that requested it
  Measured,  // activation is delayed by the recorded solve wall time
};

struct AcceptanceThresholds {
  double position_tolerance{0.5};                    // [m]
  double heading_tolerance{model::deg2rad(5.0)};     // [rad]
};

class ScenarioInvalid : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  std::string name;
  geom::HarborMap map;
  model::ModelParams params;
  model::VesselState initial_state;
  plan::DockingSpec spec;  // carries the docking pose
  ctrl::DpGains gains;
  WindModel wind;
  NoiseModel noise;
  double duration{200.0};  // [s]
  std::uint64_t seed{1};
  PlanLatencyMode latency{PlanLatencyMode::Zero};
  bool reset_integral_on_replan{false};
  AcceptanceThresholds acceptance;

  void validate() const;  // throws ScenarioInvalid
};

/// Reads a scenario file; map and parameter files are referenced by path
/// relative to the scenario file. Angles are given in degrees in the file
/// and converted here. Unknown keys are rejected.
Scenario load_scenario(const std::filesystem::path& file);

}  // namespace dock::sim
