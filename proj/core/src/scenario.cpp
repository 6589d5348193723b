#include "dock/scenario.hpp"

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

namespace dock::sim {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
  throw ScenarioInvalid("scenario: " + msg);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!known.count(item.key()))
      fail("unknown key \"" + item.key() + "\" in " + where);
  }
}

double number(const json& obj, const char* key, double fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) fail(std::string(key) + " must be a number");
  return it->get<double>();
}

Eigen::Vector3d triple(const json& obj, const char* key,
                       const Eigen::Vector3d& fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_array() || it->size() != 3)
    fail(std::string(key) + " must be an array of 3 numbers");
  Eigen::Vector3d out;
  for (int i = 0; i < 3; ++i) {
    if (!(*it)[i].is_number()) fail(std::string(key) + " entries must be numbers");
    out[i] = (*it)[i].get<double>();
  }
  return out;
}

model::Pose parse_pose(const json& obj, const std::string& where) {
  reject_unknown_keys(obj, {"north", "east", "heading_deg"}, where);
  for (const char* key : {"north", "east", "heading_deg"})
    if (!obj.contains(key)) fail(where + " requires " + key);
  model::Pose pose;
  pose.north = number(obj, "north", 0.0);
  pose.east = number(obj, "east", 0.0);
  pose.heading = model::deg2rad(number(obj, "heading_deg", 0.0));
  return pose;
}

}  // namespace

void Scenario::validate() const {
  if (!(duration > 0.0)) fail("duration must be positive");
  if (wind.gust_amplitude < 0.0) fail("gust_amplitude must be nonnegative");
  if (wind.gust_amplitude > 0.0 && !(wind.gust_period > 0.0))
    fail("gust_period must be positive when gusts are enabled");
  if (noise.pose_std < 0.0 || noise.heading_std < 0.0 || noise.velocity_std < 0.0)
    fail("noise deviations must be nonnegative");
  if (!(acceptance.position_tolerance > 0.0) ||
      !(acceptance.heading_tolerance > 0.0))
    fail("acceptance thresholds must be positive");
  try {
    params.validate();
    spec.validate();
    map.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail("cannot open " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(std::string("parse error: ") + e.what());
  }
  if (!j.is_object()) fail("top level must be an object");
  reject_unknown_keys(
      j,
      {"name", "map", "params", "initial_state", "docking_pose", "planner",
       "gains", "wind", "noise", "duration", "seed", "plan_latency_mode",
       "reset_integral_on_replan", "acceptance"},
      "scenario file");

  Scenario sc;
  sc.name = j.value("name", file.stem().string());

  if (!j.contains("map") || !j["map"].is_string())
    fail("map must be a file path string");
  const std::filesystem::path base = file.parent_path();
  try {
    sc.map = geom::load_map(base / j["map"].get<std::string>());
  } catch (const std::exception& e) {
    fail(std::string("map: ") + e.what());
  }

  if (j.contains("params")) {
    if (!j["params"].is_string()) fail("params must be a file path string");
    try {
      sc.params = model::load_params(base / j["params"].get<std::string>());
    } catch (const std::exception& e) {
      fail(std::string("params: ") + e.what());
    }
  }

  if (!j.contains("initial_state")) fail("initial_state is required");
  {
    const json& s = j["initial_state"];
    reject_unknown_keys(
        s, {"north", "east", "heading_deg", "surge", "sway", "yaw_rate_deg_s"},
        "initial_state");
    sc.initial_state.pose.north = number(s, "north", 0.0);
    sc.initial_state.pose.east = number(s, "east", 0.0);
    sc.initial_state.pose.heading = model::deg2rad(number(s, "heading_deg", 0.0));
    sc.initial_state.velocity.surge = number(s, "surge", 0.0);
    sc.initial_state.velocity.sway = number(s, "sway", 0.0);
    sc.initial_state.velocity.yaw_rate =
        model::deg2rad(number(s, "yaw_rate_deg_s", 0.0));
  }

  if (!j.contains("docking_pose")) fail("docking_pose is required");
  sc.spec.docking_pose = parse_pose(j["docking_pose"], "docking_pose");

  if (j.contains("planner")) {
    const json& p = j["planner"];
    reject_unknown_keys(p,
                        {"horizon", "intervals", "surge_speed_max",
                         "sway_speed_max", "yaw_rate_max_deg_s", "f_max",
                         "slack_weight", "huber_delta", "heading_weight",
                         "sway_weight", "yaw_rate_weight"},
                        "planner");
    sc.spec.horizon = number(p, "horizon", sc.spec.horizon);
    sc.spec.intervals =
        static_cast<int>(number(p, "intervals", sc.spec.intervals));
    sc.spec.surge_speed_max = number(p, "surge_speed_max", sc.spec.surge_speed_max);
    sc.spec.sway_speed_max = number(p, "sway_speed_max", sc.spec.sway_speed_max);
    if (p.contains("yaw_rate_max_deg_s"))
      sc.spec.yaw_rate_max = model::deg2rad(number(p, "yaw_rate_max_deg_s", 0.0));
    sc.spec.f_max = number(p, "f_max", sc.spec.f_max);
    sc.spec.slack_weight = number(p, "slack_weight", sc.spec.slack_weight);
    sc.spec.huber_delta = number(p, "huber_delta", sc.spec.huber_delta);
    sc.spec.heading_weight = number(p, "heading_weight", sc.spec.heading_weight);
    sc.spec.sway_weight = number(p, "sway_weight", sc.spec.sway_weight);
    sc.spec.yaw_rate_weight =
        number(p, "yaw_rate_weight", sc.spec.yaw_rate_weight);
  }

  if (j.contains("gains")) {
    const json& g = j["gains"];
    reject_unknown_keys(g, {"kp", "ki", "kd", "integral_limit"}, "gains");
    sc.gains.kp = triple(g, "kp", sc.gains.kp);
    sc.gains.ki = triple(g, "ki", sc.gains.ki);
    sc.gains.kd = triple(g, "kd", sc.gains.kd);
    sc.gains.integral_limit = triple(g, "integral_limit", sc.gains.integral_limit);
  }

  if (j.contains("wind")) {
    const json& w = j["wind"];
    reject_unknown_keys(w, {"force_x", "force_y", "gust_amplitude", "gust_period"},
                        "wind");
    sc.wind.force[0] = number(w, "force_x", 0.0);
    sc.wind.force[1] = number(w, "force_y", 0.0);
    sc.wind.gust_amplitude = number(w, "gust_amplitude", 0.0);
    sc.wind.gust_period = number(w, "gust_period", sc.wind.gust_period);
  }

  if (j.contains("noise")) {
    const json& n = j["noise"];
    reject_unknown_keys(n, {"pose_std", "heading_std", "velocity_std"}, "noise");
    sc.noise.pose_std = number(n, "pose_std", 0.0);
    sc.noise.heading_std = number(n, "heading_std", 0.0);
    sc.noise.velocity_std = number(n, "velocity_std", 0.0);
  }

  sc.duration = number(j, "duration", sc.duration);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) fail("seed must be an integer");
    sc.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("plan_latency_mode")) {
    const std::string mode = j["plan_latency_mode"].get<std::string>();
    if (mode == "zero")
      sc.latency = PlanLatencyMode::Zero;
    else if (mode == "measured")
      sc.latency = PlanLatencyMode::Measured;
    else
      fail("plan_latency_mode must be \"zero\" or \"measured\"");
  }
  if (j.contains("reset_integral_on_replan")) {
    if (!j["reset_integral_on_replan"].is_boolean())
      fail("reset_integral_on_replan must be a boolean");
    sc.reset_integral_on_replan = j["reset_integral_on_replan"].get<bool>();
  }
  if (j.contains("acceptance")) {
    const json& a = j["acceptance"];
    reject_unknown_keys(a, {"position_tolerance", "heading_tolerance_deg"},
                        "acceptance");
    sc.acceptance.position_tolerance =
        number(a, "position_tolerance", sc.acceptance.position_tolerance);
    if (a.contains("heading_tolerance_deg"))
      sc.acceptance.heading_tolerance =
          model::deg2rad(number(a, "heading_tolerance_deg", 0.0));
  }

  sc.validate();
  return sc;
}

}  // namespace dock::sim
