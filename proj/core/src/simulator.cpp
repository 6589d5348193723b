#include "dock/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <utility>

#include <json.hpp>

#include "dock/dp_controller.hpp"
#include "dock/thrust_allocation.hpp"
#include "dock/vessel_model.hpp"

namespace dock::sim {
namespace {

struct PlantState {
  model::VesselState vessel;
  model::ActuatorState act;
};

struct PlantRate {
  model::Vector6d vessel;
  std::array<double, 2> azimuth{0.0, 0.0};
  std::array<double, 2> speed{0.0, 0.0};
};

PlantState add_scaled(const PlantState& s, const PlantRate& d, double scale) {
  PlantState out;
  out.vessel = model::VesselState::from_vec(s.vessel.vec() + scale * d.vessel);
  for (int i = 0; i < 2; ++i) {
    out.act.azimuth[i] = s.act.azimuth[i] + scale * d.azimuth[i];
    out.act.speed[i] = s.act.speed[i] + scale * d.speed[i];
  }
  return out;
}

template <class WindFn>
PlantState rk4_step(const PlantState& s, const model::ActuatorCommands& cmd,
                    const model::ModelParams& p, double t, double dt,
                    const WindFn& wind) {
  const auto rate = [&](const PlantState& at, double tt) {
    const model::PlantDerivative d =
        model::simulation_dynamics(at.vessel, at.act, cmd, p, wind(tt));
    return PlantRate{d.vessel, d.azimuth_rate, d.speed_rate};
  };
  const PlantRate k1 = rate(s, t);
  const PlantRate k2 = rate(add_scaled(s, k1, 0.5 * dt), t + 0.5 * dt);
  const PlantRate k3 = rate(add_scaled(s, k2, 0.5 * dt), t + 0.5 * dt);
  const PlantRate k4 = rate(add_scaled(s, k3, dt), t + dt);
  PlantRate sum;
  sum.vessel = (k1.vessel + 2.0 * k2.vessel + 2.0 * k3.vessel + k4.vessel) / 6.0;
  for (int i = 0; i < 2; ++i) {
    sum.azimuth[i] =
        (k1.azimuth[i] + 2.0 * k2.azimuth[i] + 2.0 * k3.azimuth[i] + k4.azimuth[i]) / 6.0;
    sum.speed[i] =
        (k1.speed[i] + 2.0 * k2.speed[i] + 2.0 * k3.speed[i] + k4.speed[i]) / 6.0;
  }
  return add_scaled(s, sum, dt);
}

std::string format(const char* fmt, ...) __attribute__((format(printf, 1, 2)));

std::string format(const char* fmt, ...) {
  char buf[160];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  out << ',' << buf;
}

}  // namespace

RunLog run(const Scenario& sc) {
  sc.validate();
  const auto wall0 = std::chrono::steady_clock::now();

  RunLog log;
  const double dt = 0.01;
  const int steps = static_cast<int>(std::llround(sc.duration / dt));

  PlantState plant{sc.initial_state, {}};
  ctrl::ControllerState controller;
  model::ActuatorCommands cmd;

  std::mt19937_64 rng(sc.seed);
  const double gust_phase =
      std::uniform_real_distribution<double>(0.0, 2.0 * model::kPi)(rng);
  const Eigen::Vector2d gust_dir = sc.wind.force.norm() > 1e-12
                                       ? Eigen::Vector2d(sc.wind.force.normalized())
                                       : Eigen::Vector2d(1.0, 0.0);
  const auto wind_at = [&](double t) -> Eigen::Vector3d {
    Eigen::Vector2d f = sc.wind.force;
    if (sc.wind.gust_amplitude > 0.0)
      f += sc.wind.gust_amplitude *
           std::sin(2.0 * model::kPi * t / sc.wind.gust_period + gust_phase) *
           gust_dir;
    return {f[0], f[1], 0.0};
  };

  std::normal_distribution<double> gauss(0.0, 1.0);
  const bool noisy = sc.noise.pose_std > 0.0 || sc.noise.heading_std > 0.0 ||
                     sc.noise.velocity_std > 0.0;
  const auto measure = [&]() {
    model::VesselState m = plant.vessel;
    if (noisy) {
      m.pose.north += sc.noise.pose_std * gauss(rng);
      m.pose.east += sc.noise.pose_std * gauss(rng);
      m.pose.heading += sc.noise.heading_std * gauss(rng);
      m.velocity.surge += sc.noise.velocity_std * gauss(rng);
      m.velocity.sway += sc.noise.velocity_std * gauss(rng);
      m.velocity.yaw_rate += sc.noise.velocity_std * gauss(rng);
    }
    return m;
  };

  std::optional<plan::PlannedTrajectory> active;
  int active_id = -1;
  std::optional<plan::PlannedTrajectory> pending;
  int pending_id = -1;
  double pending_at = 0.0;
  std::optional<plan::PlannedTrajectory> last_accepted;
  int next_id = 0;

  plan::TrajectorySample hold;  // rest reference until the first plan lands
  hold.pose = sc.initial_state.pose;

  const auto activate = [&](plan::PlannedTrajectory&& traj, int id) {
    active = std::move(traj);
    active_id = id;
    if (sc.reset_integral_on_replan) controller.integral.setZero();
  };

  for (int i = 0; i <= steps; ++i) {
    const double t = i * dt;

    if (pending && t + 1e-12 >= pending_at) {
      log.events.push_back({t, "plan_active", format("id=%d", pending_id)});
      activate(std::move(*pending), pending_id);
      pending.reset();
    }

    if (i % 1000 == 0 && i < steps) {
      const model::VesselState measured = measure();
      try {
        plan::PlannedTrajectory traj =
            plan::plan(measured,
                       geom::extract_convex_region(sc.map, measured.pose.position()),
                       sc.spec, sc.params,
                       last_accepted ? &*last_accepted : nullptr, t);
        PlanRecord rec;
        rec.id = next_id++;
        rec.requested_at = t;
        rec.trajectory = traj;
        if (traj.solve_stats.converged) {
          rec.accepted = true;
          const double at = sc.latency == PlanLatencyMode::Measured
                                ? t + traj.solve_stats.solve_seconds
                                : t;
          rec.active_from = at;
          last_accepted = traj;
          log.events.push_back(
              {t, "plan_accepted",
               format("id=%d iterations=%d slack=%.3g", rec.id,
                      traj.solve_stats.iterations, traj.slack_summary.max())});
          if (at <= t + 1e-12) {
            activate(std::move(traj), rec.id);
          } else {
            pending = std::move(traj);
            pending_id = rec.id;
            pending_at = at;
          }
        } else {
          log.events.push_back(
              {t, "plan_rejected",
               format("id=%d violation=%.3g", rec.id,
                      traj.solve_stats.constraint_violation)});
        }
        log.plans.push_back(std::move(rec));
      } catch (const std::exception& e) {
        log.events.push_back({t, "plan_failed", e.what()});
      }
    }

    if (i % 10 == 0) {
      const model::VesselState measured = measure();
      plan::TrajectorySample ref = active ? active->sample_at(t) : hold;
      if (!active) ref.t = t;
      const ctrl::ControlCommand cc =
          ctrl::control(controller, measured, ref.pose, ref.velocity,
                        ref.acceleration, sc.gains, sc.params, 0.1);
      const alloc::AllocationResult al =
          alloc::allocate(cc.tau, sc.params, cmd.azimuth);
      cmd = al.commands;

      LogRow row;
      row.t = t;
      row.state = measured;
      row.reference = ref;
      row.tau = cc.tau;
      row.integral = controller.integral;
      row.actuators = plant.act;
      row.commands = cmd;
      row.plan_id = active_id;
      row.plan_slack = active ? active->slack_summary.max() : 0.0;
      log.rows.push_back(row);
    }

    if (i == steps) break;
    plant = rk4_step(plant, cmd, sc.params, t, dt, wind_at);
  }

  log.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0)
          .count();
  return log;
}

CollisionReport check_collision_free(const RunLog& log, const geom::HarborMap& map,
                                     const geom::Footprint& footprint) {
  CollisionReport report;
  for (const LogRow& row : log.rows) {
    const std::vector<geom::Point> corners =
        geom::footprint_vertices(row.state.pose, footprint);
    bool hit = false;
    for (const geom::Polygon& obstacle : map.obstacles) {
      for (const geom::Point& corner : corners) {
        if (obstacle.contains(corner)) {
          hit = true;
          break;
        }
      }
      if (hit) break;
    }
    if (hit) {
      ++report.violations;
      if (report.first_violation_time < 0.0) report.first_violation_time = row.t;
    }
  }
  return report;
}

void write_runlog_csv(const RunLog& log, std::ostream& out) {
  out << "t,north,east,heading,surge,sway,yaw_rate,"
         "ref_north,ref_east,ref_heading,ref_surge,ref_sway,ref_yaw_rate,"
         "ref_acc_surge,ref_acc_sway,ref_acc_yaw,"
         "tau_x,tau_y,tau_n,integral_x,integral_y,integral_n,"
         "azimuth1,speed1,azimuth2,speed2,"
         "cmd_azimuth1,cmd_speed1,cmd_azimuth2,cmd_speed2,"
         "plan_id,plan_slack\n";
  for (const LogRow& r : log.rows) {
    char head[32];
    std::snprintf(head, sizeof(head), "%.12g", r.t);
    out << head;
    put(out, r.state.pose.north);
    put(out, r.state.pose.east);
    put(out, r.state.pose.heading);
    put(out, r.state.velocity.surge);
    put(out, r.state.velocity.sway);
    put(out, r.state.velocity.yaw_rate);
    put(out, r.reference.pose.north);
    put(out, r.reference.pose.east);
    put(out, r.reference.pose.heading);
    put(out, r.reference.velocity.surge);
    put(out, r.reference.velocity.sway);
    put(out, r.reference.velocity.yaw_rate);
    put(out, r.reference.acceleration[0]);
    put(out, r.reference.acceleration[1]);
    put(out, r.reference.acceleration[2]);
    put(out, r.tau[0]);
    put(out, r.tau[1]);
    put(out, r.tau[2]);
    put(out, r.integral[0]);
    put(out, r.integral[1]);
    put(out, r.integral[2]);
    put(out, r.actuators.azimuth[0]);
    put(out, r.actuators.speed[0]);
    put(out, r.actuators.azimuth[1]);
    put(out, r.actuators.speed[1]);
    put(out, r.commands.azimuth[0]);
    put(out, r.commands.speed[0]);
    put(out, r.commands.azimuth[1]);
    put(out, r.commands.speed[1]);
    out << ',' << r.plan_id;
    put(out, r.plan_slack);
    out << '\n';
  }
}

void write_plan_csv(const plan::PlannedTrajectory& trajectory, std::ostream& out) {
  out << "t,north,east,heading,surge,sway,yaw_rate,"
         "acc_surge,acc_sway,acc_yaw,fx1,fy1,fx2,fy2\n";
  for (const plan::TrajectorySample& s : trajectory.samples) {
    char head[32];
    std::snprintf(head, sizeof(head), "%.12g", s.t);
    out << head;
    put(out, s.pose.north);
    put(out, s.pose.east);
    put(out, s.pose.heading);
    put(out, s.velocity.surge);
    put(out, s.velocity.sway);
    put(out, s.velocity.yaw_rate);
    put(out, s.acceleration[0]);
    put(out, s.acceleration[1]);
    put(out, s.acceleration[2]);
    put(out, s.input.fx1);
    put(out, s.input.fy1);
    put(out, s.input.fx2);
    put(out, s.input.fy2);
    out << '\n';
  }
}

SolveTimeStats solve_time_stats(const RunLog& log) {
  SolveTimeStats stats;
  double total = 0.0;
  for (const PlanRecord& rec : log.plans) {
    const double s = rec.trajectory.solve_stats.solve_seconds;
    if (stats.count == 0) {
      stats.min = s;
      stats.max = s;
    } else {
      stats.min = std::min(stats.min, s);
      stats.max = std::max(stats.max, s);
    }
    total += s;
    ++stats.count;
  }
  if (stats.count > 0) stats.mean = total / stats.count;
  return stats;
}

FinalError final_error(const RunLog& log, const Scenario& scenario) {
  FinalError err;
  if (log.rows.empty()) {
    err.position = std::numeric_limits<double>::infinity();
    err.heading = model::kPi;
    return err;
  }
  const model::Pose& pose = log.rows.back().state.pose;
  err.position =
      (pose.position() - scenario.spec.docking_pose.position()).norm();
  err.heading =
      std::abs(model::wrap_angle(pose.heading - scenario.spec.docking_pose.heading));
  return err;
}

void write_summary_json(const RunLog& log, const Scenario& scenario,
                        const CollisionReport& report, std::ostream& out) {
  nlohmann::json j;
  j["name"] = scenario.name;
  j["duration"] = scenario.duration;
  const FinalError err = final_error(log, scenario);
  j["final_position_error"] = err.position;
  j["final_heading_error_deg"] = model::rad2deg(err.heading);
  j["thresholds"]["position_tolerance"] = scenario.acceptance.position_tolerance;
  j["thresholds"]["heading_tolerance_deg"] =
      model::rad2deg(scenario.acceptance.heading_tolerance);
  j["thresholds_met"] = err.within(scenario.acceptance);
  j["collision_violations"] = report.violations;
  const SolveTimeStats stats = solve_time_stats(log);
  j["solve_time"] = {{"min", stats.min},
                     {"mean", stats.mean},
                     {"max", stats.max},
                     {"count", stats.count}};
  int accepted = 0;
  for (const PlanRecord& rec : log.plans)
    if (rec.accepted) ++accepted;
  j["plans_accepted"] = accepted;
  j["plans_rejected"] = static_cast<int>(log.plans.size()) - accepted;
  nlohmann::json events = nlohmann::json::array();
  for (const Event& e : log.events)
    events.push_back({{"t", e.t}, {"kind", e.kind}, {"detail", e.detail}});
  j["events"] = events;
  j["wall_seconds"] = log.wall_seconds;
  out << j.dump(2) << '\n';
}

}  // namespace dock::sim
