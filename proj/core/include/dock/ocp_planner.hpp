#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "dock/harbor_geometry.hpp"
#include "dock/model_params.hpp"
#include "dock/nlp_solver.hpp"
#include "dock/vessel_types.hpp"

namespace dock::plan {

/// Berthing task description plus the planner weights and limits.
struct DockingSpec {
  model::Pose docking_pose{};
  double horizon{120.0};     // [s]
  int intervals{60};
  double surge_speed_max{1.0};             // [m/s]
  double sway_speed_max{1.0};              // [m/s]
  double yaw_rate_max{model::deg2rad(5.0)};  // [rad/s]
  double f_max{500.0};                     // per-thruster norm bound [N]
  double slack_weight{1.0e3};
  double huber_delta{10.0};                // [m]
  double heading_weight{20.0};
  double sway_weight{10.0};
  double yaw_rate_weight{10.0};

  void validate() const;  // throws std::invalid_argument
};

/// delta^2 (sqrt(1 + |a|^2/delta^2) - 1): quadratic near zero, linear far
/// out, so distant goals do not dominate the Hessian.
double pseudo_huber(const Eigen::Vector2d& a, double delta);

/// Stage cost of the docking objective at one (state, input) pair.
double cost_to_go(const model::VesselState& state,
                  const model::ThrusterForces& input, const DockingSpec& spec,
                  const model::ModelParams& params);

struct TrajectorySample {
  double t{0.0};
  model::Pose pose;
  model::BodyVelocity velocity;
  Eigen::Vector3d acceleration{0.0, 0.0, 0.0};  // body frame [m/s^2, rad/s^2]
  model::ThrusterForces input;                  // [N]
};

struct SlackSummary {
  double collision{0.0};  // [m]
  double velocity{0.0};   // [m/s] / [rad/s]
  double thrust{0.0};     // [N]

  double max() const;
};

struct SolveStats {
  bool converged{false};
  int iterations{0};
  double solve_seconds{0.0};
  double kkt_residual{0.0};
  double constraint_violation{0.0};
  double objective{0.0};
};

struct PlannedTrajectory {
  double t0{0.0};
  double horizon{0.0};
  std::vector<TrajectorySample> samples;  // controller rate, spans [t0, t0+T]
  SlackSummary slack_summary;
  SolveStats solve_stats;

  double end_time() const { return t0 + horizon; }
  /// Linear interpolation, clamped to [t0, t0+T]; inputs held constant
  /// between samples.
  TrajectorySample sample_at(double t) const;
};

class InvalidRegionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Direct-collocation transcription of the docking problem: degree-3
/// Legendre-Gauss collocation, piecewise-constant inputs, soft collision,
/// velocity and thruster-norm rows with one nonnegative slack per row.
/// Thruster force decision variables are held in kN so the Hessian stays
/// well scaled; the public trajectory interface is in N.
class OcpTranscription : public nlp::NlpProblem {
 public:
  OcpTranscription(const model::VesselState& measured,
                   const geom::ConvexRegion& region, const DockingSpec& spec,
                   const model::ModelParams& params);
  ~OcpTranscription() override;

  int num_variables() const override;
  int num_equalities() const override;
  int num_inequalities() const override;
  Eigen::VectorXd lower_bounds() const override;
  Eigen::VectorXd upper_bounds() const override;
  double objective(const Eigen::VectorXd& x) const override;
  void objective_gradient(const Eigen::VectorXd& x,
                          Eigen::VectorXd& grad) const override;
  void equalities(const Eigen::VectorXd& x,
                  Eigen::VectorXd& residual) const override;
  void inequalities(const Eigen::VectorXd& x,
                    Eigen::VectorXd& residual) const override;
  const nlp::SparsityPattern& equality_jacobian_pattern() const override;
  const nlp::SparsityPattern& inequality_jacobian_pattern() const override;
  void equality_jacobian(const Eigen::VectorXd& x,
                         std::vector<double>& values) const override;
  void inequality_jacobian(const Eigen::VectorXd& x,
                           std::vector<double>& values) const override;
  bool has_objective_hessian() const override { return true; }
  const nlp::SparsityPattern& objective_hessian_pattern() const override;
  void objective_hessian(const Eigen::VectorXd& x,
                         std::vector<double>& values) const override;
  bool has_lagrangian_hessian() const override { return true; }
  void lagrangian_hessian(const Eigen::VectorXd& x, const Eigen::VectorXd& lam,
                          const Eigen::VectorXd& mu,
                          std::vector<double>& values) const override;

  // Variable layout, exposed for seeding and extraction.
  int state_index(int node) const;            // boundary nodes 0..N
  int collocation_index(int k, int j) const;  // interval k, point j = 0..2
  int input_index(int k) const;
  int node_slack_index(int node) const;
  int thrust_slack_index(int k) const;
  int collision_rows_per_node() const;
  int node_slack_count() const;  // collision rows + 6 velocity rows

  /// Cold start: kinematic straight-line profile towards the goal with
  /// trapezoidal speed, zero inputs, slacks set to the row residuals.
  Eigen::VectorXd cold_start() const;

  /// Warm start: previous plan shifted to new_t0 and resampled onto this
  /// grid, tail-padded with the goal state at rest.
  Eigen::VectorXd warm_start(const PlannedTrajectory& previous,
                             double new_t0) const;

  /// Controller-rate trajectory from a solution vector. Accelerations are
  /// the planning dynamics evaluated at each sample, so they are consistent
  /// with the reported states and inputs by construction.
  PlannedTrajectory extract(const Eigen::VectorXd& x, double t0) const;

  SlackSummary slack_summary(const Eigen::VectorXd& x) const;

  static constexpr double kInputScale = 1000.0;  // decision kN -> N

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Throws InvalidRegionError when the region has no interior point.
std::unique_ptr<OcpTranscription> build_ocp(const model::VesselState& measured,
                                            const geom::ConvexRegion& region,
                                            const DockingSpec& spec,
                                            const model::ModelParams& params);

/// Solver settings the planner uses; exposed so tests and tools solve the
/// same problem the same way.
nlp::SolveOptions planner_solve_options();

/// Builds, seeds and solves the docking OCP, then samples the solution at
/// the controller rate. On an unconverged solve the best iterate is still
/// returned, flagged via solve_stats.converged = false; the caller decides
/// what to do with it.
PlannedTrajectory plan(const model::VesselState& measured,
                       const geom::ConvexRegion& region,
                       const DockingSpec& spec,
                       const model::ModelParams& params,
                       const PlannedTrajectory* warm_start = nullptr,
                       double t0 = 0.0,
                       std::vector<nlp::IterationRecord>* iteration_log =
                           nullptr);

}  // namespace dock::plan
