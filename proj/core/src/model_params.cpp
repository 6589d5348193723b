#include "dock/model_params.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dock/vessel_types.hpp"

namespace dock::model {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument("model params: " + msg);
}

void require(bool ok, const std::string& msg) {
  if (!ok) fail(msg);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!known.count(item.key())) {
      fail("unknown key \"" + item.key() + "\" in " + where);
    }
  }
}

void read(const json& obj, const char* key, double& out) {
  if (auto it = obj.find(key); it != obj.end()) {
    if (!it->is_number()) fail(std::string(key) + " must be a number");
    out = it->get<double>();
  }
}

}  // namespace

void ModelParams::validate() const {
  require(m11 > 0.0 && m22 > 0.0 && m33 > 0.0, "inertia must be positive");
  require(m22 * m33 - coupling.m23 * coupling.m23 > 0.0,
          "sway/yaw inertia block must be positive definite");

  require(X_u < 0.0 && Y_v < 0.0 && N_r < 0.0,
          "linear damping coefficients must be negative");
  require(X_uu <= 0.0 && X_uuu <= 0.0 && Y_vv <= 0.0 && Y_vvv <= 0.0 &&
              N_rr <= 0.0,
          "higher-order damping coefficients must be non-positive");
  {
    const double d22 = -Y_v;
    const double d33 = -N_r;
    const double off = 0.5 * (coupling.d23 + coupling.d32);
    require(d22 * d33 >= off * off,
            "damping coupling too strong for dissipativity");
  }

  for (double s : inertia_scaling) {
    require(s >= 1.0, "inertia_scaling entries must be >= 1");
  }

  require(l1 != l2, "thruster lever arms must differ");
  require(f_max > 0.0, "f_max must be positive");
  require(thrust_coeff > 0.0 && n_max > 0.0,
          "thrust_coeff and n_max must be positive");
  require(thrust_coeff * n_max * n_max >= f_max,
          "propeller speed limit cannot realize f_max");
  require(azimuth_rate_limit > 0.0, "azimuth_rate_limit must be positive");
  require(azimuth_time_constant > 0.0 && speed_time_constant > 0.0,
          "actuator time constants must be positive");
  require(footprint_length > 0.0 && footprint_width > 0.0,
          "footprint dimensions must be positive");
}

ModelParams load_params(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail("cannot open " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail(file.string() + ": " + e.what());
  }
  if (!j.is_object()) fail("top level must be an object");

  static const std::set<std::string> kTop = {
      "m11", "m22", "m33",
      "X_u", "X_uu", "X_uuu",
      "Y_v", "Y_vv", "Y_vvv",
      "N_r", "N_rr",
      "inertia_scaling",
      "l1", "l2",
      "f_max", "thrust_coeff", "n_max",
      "azimuth_rate_limit_deg_s", "azimuth_time_constant",
      "speed_time_constant",
      "footprint_length", "footprint_width",
      "coupling"};
  reject_unknown_keys(j, kTop, "parameter file");

  ModelParams p;
  read(j, "m11", p.m11);
  read(j, "m22", p.m22);
  read(j, "m33", p.m33);
  read(j, "X_u", p.X_u);
  read(j, "X_uu", p.X_uu);
  read(j, "X_uuu", p.X_uuu);
  read(j, "Y_v", p.Y_v);
  read(j, "Y_vv", p.Y_vv);
  read(j, "Y_vvv", p.Y_vvv);
  read(j, "N_r", p.N_r);
  read(j, "N_rr", p.N_rr);
  if (auto it = j.find("inertia_scaling"); it != j.end()) {
    if (!it->is_array() || it->size() != 3) {
      fail("inertia_scaling must be an array of 3 numbers");
    }
    for (int i = 0; i < 3; ++i) p.inertia_scaling[i] = (*it)[i].get<double>();
  }
  read(j, "l1", p.l1);
  read(j, "l2", p.l2);
  read(j, "f_max", p.f_max);
  read(j, "thrust_coeff", p.thrust_coeff);
  read(j, "n_max", p.n_max);
  if (auto it = j.find("azimuth_rate_limit_deg_s"); it != j.end()) {
    p.azimuth_rate_limit = deg2rad(it->get<double>());
  }
  read(j, "azimuth_time_constant", p.azimuth_time_constant);
  read(j, "speed_time_constant", p.speed_time_constant);
  read(j, "footprint_length", p.footprint_length);
  read(j, "footprint_width", p.footprint_width);
  if (auto it = j.find("coupling"); it != j.end()) {
    reject_unknown_keys(*it, {"m23", "d23", "d32"}, "coupling");
    read(*it, "m23", p.coupling.m23);
    read(*it, "d23", p.coupling.d23);
    read(*it, "d32", p.coupling.d32);
  }

  p.validate();
  return p;
}

}  // namespace dock::model
