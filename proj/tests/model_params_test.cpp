#include "dock/model_params.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <gtest/gtest.h>

namespace {

using namespace dock::model;
namespace fs = std::filesystem;

const fs::path kDataDir = DOCK_DATA_DIR;

fs::path write_temp(const std::string& body) {
  static int counter = 0;
  const fs::path file =
      fs::temp_directory_path() /
      ("params_test_" + std::to_string(::getpid()) + "_" +
       std::to_string(counter++) + ".json");
  std::ofstream out(file);
  out << body;
  return file;
}

TEST(ParamsFile, DefaultFileMatchesBuiltInDefaults) {
  const ModelParams loaded = load_params(kDataDir / "params_default.json");
  const ModelParams d;
  EXPECT_EQ(loaded.m11, d.m11);
  EXPECT_EQ(loaded.m22, d.m22);
  EXPECT_EQ(loaded.m33, d.m33);
  EXPECT_EQ(loaded.X_u, d.X_u);
  EXPECT_EQ(loaded.X_uu, d.X_uu);
  EXPECT_EQ(loaded.X_uuu, d.X_uuu);
  EXPECT_EQ(loaded.Y_v, d.Y_v);
  EXPECT_EQ(loaded.Y_vv, d.Y_vv);
  EXPECT_EQ(loaded.Y_vvv, d.Y_vvv);
  EXPECT_EQ(loaded.N_r, d.N_r);
  EXPECT_EQ(loaded.N_rr, d.N_rr);
  for (int i = 0; i < 3; ++i)
    EXPECT_EQ(loaded.inertia_scaling[i], d.inertia_scaling[i]);
  EXPECT_EQ(loaded.coupling.m23, d.coupling.m23);
  EXPECT_EQ(loaded.coupling.d23, d.coupling.d23);
  EXPECT_EQ(loaded.coupling.d32, d.coupling.d32);
  EXPECT_EQ(loaded.l1, d.l1);
  EXPECT_EQ(loaded.l2, d.l2);
  EXPECT_EQ(loaded.f_max, d.f_max);
  EXPECT_EQ(loaded.thrust_coeff, d.thrust_coeff);
  EXPECT_EQ(loaded.n_max, d.n_max);
  EXPECT_EQ(loaded.azimuth_rate_limit, d.azimuth_rate_limit);
  EXPECT_EQ(loaded.azimuth_time_constant, d.azimuth_time_constant);
  EXPECT_EQ(loaded.speed_time_constant, d.speed_time_constant);
  EXPECT_EQ(loaded.footprint_length, d.footprint_length);
  EXPECT_EQ(loaded.footprint_width, d.footprint_width);
}

TEST(ParamsFile, RateLimitConvertedFromDegrees) {
  const auto file = write_temp(R"({"azimuth_rate_limit_deg_s": 90.0})");
  EXPECT_DOUBLE_EQ(load_params(file).azimuth_rate_limit, deg2rad(90.0));
  fs::remove(file);
}

TEST(ParamsFile, AbsentKeysKeepDefaults) {
  const auto file = write_temp(R"({"m11": 2500.0})");
  const ModelParams p = load_params(file);
  EXPECT_EQ(p.m11, 2500.0);
  EXPECT_EQ(p.m22, ModelParams{}.m22);
  fs::remove(file);
}

TEST(ParamsFile, UnknownKeyRejected) {
  const auto file = write_temp(R"({"m11": 2100.0, "mass": 1.0})");
  EXPECT_THROW(load_params(file), std::invalid_argument);
  fs::remove(file);
}

TEST(ParamsFile, UnknownCouplingKeyRejected) {
  const auto file = write_temp(R"({"coupling": {"m32": 10.0}})");
  EXPECT_THROW(load_params(file), std::invalid_argument);
  fs::remove(file);
}

TEST(ParamsFile, MissingFileRejected) {
  EXPECT_THROW(load_params(kDataDir / "does_not_exist.json"),
               std::invalid_argument);
}

TEST(ParamsFile, MalformedJsonRejected) {
  const auto file = write_temp("{ not json");
  EXPECT_THROW(load_params(file), std::invalid_argument);
  fs::remove(file);
}

TEST(ParamsValidate, RejectsBadValues) {
  ModelParams p;
  p.m11 = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);

  p = ModelParams{};
  p.X_u = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);

  p = ModelParams{};
  p.coupling.m23 = 5000.0;  // breaks positive definiteness of the 2x2 block
  EXPECT_THROW(p.validate(), std::invalid_argument);

  p = ModelParams{};
  p.coupling.d23 = -400.0;
  p.coupling.d32 = -400.0;  // too much for the linear diagonal
  EXPECT_THROW(p.validate(), std::invalid_argument);

  p = ModelParams{};
  p.l2 = p.l1;
  EXPECT_THROW(p.validate(), std::invalid_argument);

  p = ModelParams{};
  p.n_max = 2.0;  // cannot realize f_max
  EXPECT_THROW(p.validate(), std::invalid_argument);

  p = ModelParams{};
  p.inertia_scaling[1] = 0.5;
  EXPECT_THROW(p.validate(), std::invalid_argument);

  EXPECT_NO_THROW(ModelParams{}.validate());
}

}  // namespace
