#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "dock/nlp_problem.hpp"
#include "dock/qp_solver.hpp"

namespace dock::nlp {

enum class HessianMode {
  DampedBfgs,    // quasi-Newton, works for any problem
  GaussNewton,   // use the problem's PSD objective Hessian callback
};

enum class SolveStatus {
  Converged,
  MaxIterations,
  LineSearchFailure,
  QpFailure,
};

struct SolveOptions {
  int max_iterations{200};
  double kkt_tolerance{1e-6};
  double constraint_tolerance{1e-6};
  HessianMode hessian_mode{HessianMode::DampedBfgs};
  double hessian_damping{1e-8};  // sigma added to the QP Hessian diagonal
  double armijo_coefficient{1e-4};
  double backtrack_factor{0.5};
  int max_backtracks{30};
  double initial_penalty{10.0};
  bool record_iterations{true};
  QpOptions qp{};
};

struct IterationRecord {
  int iteration{0};
  double objective{0.0};
  double constraint_violation{0.0};
  double kkt_residual{0.0};
  double step_norm{0.0};
  double step_length{0.0};
  double merit{0.0};
  double penalty{0.0};
  int qp_rounds{0};
};

struct SolveResult {
  SolveStatus status{SolveStatus::MaxIterations};
  Eigen::VectorXd x;
  Eigen::VectorXd eq_multipliers;
  Eigen::VectorXd in_multipliers;
  double objective{0.0};
  double kkt_residual{0.0};
  double constraint_violation{0.0};
  int iterations{0};
  double solve_seconds{0.0};
  std::vector<IterationRecord> history;

  bool converged() const { return status == SolveStatus::Converged; }
};

/// Sequential quadratic programming with an L1 merit line search. Inequality
/// and bound subproblems are handled by a primal-dual active-set QP that
/// reuses one KKT factorization structure across all iterations.
SolveResult solve(const NlpProblem& problem, const Eigen::VectorXd& x0,
                  const SolveOptions& options = {});

struct DerivativeCheckReport {
  double objective_gradient_error{0.0};
  double equality_jacobian_error{0.0};
  double inequality_jacobian_error{0.0};
  double directional_error{0.0};

  double max_error() const;
};

/// Compares declared first derivatives against central finite differences
/// at x, column by column, plus one random directional probe drawn from
/// `seed`. Errors are relative to max(1, |analytic|, |numeric|).
DerivativeCheckReport check_derivatives(const NlpProblem& problem,
                                        const Eigen::VectorXd& x,
                                        std::uint64_t seed = 0);

}  // namespace dock::nlp
