#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dock/harbor_geometry.hpp"
#include "dock/ocp_planner.hpp"
#include "dock/scenario.hpp"
#include "dock/vessel_types.hpp"

namespace dock::sim {

/// One 10 Hz log row: everything the controller saw and produced at that
/// tick plus the physical actuator state. No wall-clock quantities appear
/// here, so the serialized log is reproducible byte for byte.
struct LogRow {
  double t{0.0};
  model::VesselState state;  // as measured (equals truth with noise off)
  plan::TrajectorySample reference;
  Eigen::Vector3d tau{0.0, 0.0, 0.0};
  Eigen::Vector3d integral{0.0, 0.0, 0.0};
  model::ActuatorState actuators;
  model::ActuatorCommands commands;
  int plan_id{-1};
  double plan_slack{0.0};  // max slack of the active plan
};

struct Event {
  double t{0.0};
  std::string kind;
  std::string detail;
};

struct PlanRecord {
  int id{0};
  double requested_at{0.0};
  double active_from{0.0};  // meaningful when accepted
  bool accepted{false};
  plan::PlannedTrajectory trajectory;
};

struct RunLog {
  std::vector<LogRow> rows;
  std::vector<Event> events;
  std::vector<PlanRecord> plans;  // every replan attempt, accepted or not
  double wall_seconds{0.0};
};

/// Runs the closed loop: RK4 plant at 100 Hz, tracking controller at 10 Hz,
/// replanning every 10 s from the measured state with warm starts. A replan
/// that fails to converge (or throws) leaves the previous plan active and
/// logs an event; before any plan is active the controller holds the initial
/// pose.
RunLog run(const Scenario& scenario);

struct CollisionReport {
  int violations{0};               // log rows with any footprint corner inside an obstacle
  double first_violation_time{-1.0};
};

/// Independent collision oracle: tests every logged pose's footprint corners
/// against every obstacle polygon with the point-in-polygon test only.
CollisionReport check_collision_free(const RunLog& log, const geom::HarborMap& map,
                                     const geom::Footprint& footprint);

/// Fixed column order, one row per 10 Hz tick, values printed with %.12g.
void write_runlog_csv(const RunLog& log, std::ostream& out);

void write_plan_csv(const plan::PlannedTrajectory& trajectory, std::ostream& out);

struct SolveTimeStats {
  double min{0.0};
  double mean{0.0};
  double max{0.0};
  int count{0};
};

SolveTimeStats solve_time_stats(const RunLog& log);

/// Final tracking errors against the scenario's docking pose.
struct FinalError {
  double position{0.0};  // [m]
  double heading{0.0};   // [rad]
  bool within(const AcceptanceThresholds& a) const {
    return position <= a.position_tolerance && heading <= a.heading_tolerance;
  }
};

FinalError final_error(const RunLog& log, const Scenario& scenario);

void write_summary_json(const RunLog& log, const Scenario& scenario,
                        const CollisionReport& report, std::ostream& out);

}  // namespace dock::sim
