#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dock/harbor_geometry.hpp"
#include "dock/ocp_planner.hpp"
#include "dock/scenario.hpp"
#include "dock/simulator.hpp"

namespace fs = std::filesystem;

namespace {

struct RunOutcome {
  bool passed{false};
  dock::sim::FinalError error;
  int violations{0};
};

RunOutcome run_scenario(const dock::sim::Scenario& sc, const fs::path& out_dir) {
  dock::sim::RunLog log = dock::sim::run(sc);

  const auto footprint = dock::geom::Footprint::rectangle(
      sc.params.footprint_length, sc.params.footprint_width);
  const auto report = dock::sim::check_collision_free(log, sc.map, footprint);
  const auto error = dock::sim::final_error(log, sc);

  if (!out_dir.empty()) {
    fs::create_directories(out_dir / "plans");
    {
      std::ofstream f(out_dir / "runlog.csv");
      dock::sim::write_runlog_csv(log, f);
    }
    for (const auto& rec : log.plans) {
      if (!rec.accepted) continue;
      std::ofstream f(out_dir / "plans" /
                      ("plan_" + std::to_string(rec.id) + ".csv"));
      dock::sim::write_plan_csv(rec.trajectory, f);
    }
    {
      std::ofstream f(out_dir / "summary.json");
      dock::sim::write_summary_json(log, sc, report, f);
    }
  }

  RunOutcome outcome;
  outcome.error = error;
  outcome.violations = report.violations;
  outcome.passed = error.within(sc.acceptance) && report.violations == 0;
  return outcome;
}

void print_outcome(const std::string& name, const RunOutcome& o) {
  std::printf("%-24s %s  position %.3f m  heading %.2f deg  violations %d\n",
              name.c_str(), o.passed ? "PASS" : "FAIL", o.error.position,
              dock::model::rad2deg(o.error.heading), o.violations);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"autonomous docking simulator"};
  app.require_subcommand(1);

  std::string scenario_file;
  std::string out_dir;
  auto* cmd_run = app.add_subcommand("run", "simulate a scenario end to end");
  cmd_run->add_option("scenario", scenario_file, "scenario json file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_run->add_option("--out", out_dir, "output directory for logs");

  std::string map_file;
  auto* cmd_map = app.add_subcommand("validate-map", "load and check a map");
  cmd_map->add_option("map", map_file, "map json file")
      ->required()
      ->check(CLI::ExistingFile);

  std::string plan_scenario;
  std::string plan_out;
  auto* cmd_plan =
      app.add_subcommand("plan-once", "solve a single plan from the initial state");
  cmd_plan->add_option("scenario", plan_scenario, "scenario json file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_plan->add_option("--out", plan_out, "trajectory csv file");

  std::vector<std::string> sweep_files;
  std::string sweep_dir;
  auto* cmd_sweep = app.add_subcommand("sweep", "run several scenarios");
  cmd_sweep->add_option("scenarios", sweep_files, "scenario json files")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_sweep->add_option("--out", sweep_dir, "directory for per-scenario logs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_run) {
      const auto sc = dock::sim::load_scenario(scenario_file);
      const auto outcome = run_scenario(sc, out_dir);
      print_outcome(sc.name, outcome);
      return outcome.passed ? 0 : 1;
    }

    if (*cmd_map) {
      const auto map = dock::geom::load_map(map_file);
      double area = 0.0;
      for (const auto& poly : map.obstacles) area += poly.area();
      std::printf("map %s: %zu obstacles, obstacle area %.1f m^2, "
                  "%d winding fixes\n",
                  map.name.c_str(), map.obstacles.size(), area,
                  map.stats.winding_fixes);
      return 0;
    }

    if (*cmd_plan) {
      const auto sc = dock::sim::load_scenario(plan_scenario);
      const auto region = dock::geom::extract_convex_region(
          sc.map, sc.initial_state.pose.position());
      const auto traj =
          dock::plan::plan(sc.initial_state, region, sc.spec, sc.params);
      const auto& st = traj.solve_stats;
      std::printf("%s: iterations %d, kkt %.3g, violation %.3g, "
                  "objective %.6g, max slack %.3g, %.3f s\n",
                  st.converged ? "converged" : "not converged", st.iterations,
                  st.kkt_residual, st.constraint_violation, st.objective,
                  traj.slack_summary.max(), st.solve_seconds);
      if (!plan_out.empty()) {
        std::ofstream f(plan_out);
        dock::sim::write_plan_csv(traj, f);
      }
      return st.converged ? 0 : 1;
    }

    if (*cmd_sweep) {
      bool all = true;
      for (const auto& file : sweep_files) {
        const auto sc = dock::sim::load_scenario(file);
        fs::path dir;
        if (!sweep_dir.empty()) dir = fs::path(sweep_dir) / sc.name;
        const auto outcome = run_scenario(sc, dir);
        print_outcome(sc.name, outcome);
        all = all && outcome.passed;
      }
      return all ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
