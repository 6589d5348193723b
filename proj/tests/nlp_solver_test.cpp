#include "dock/nlp_solver.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

namespace {

using namespace dock::nlp;
using Eigen::VectorXd;

struct Quadratic : NlpProblem {
  Eigen::Vector3d a{1.0, -2.0, 3.0};

  int num_variables() const override { return 3; }
  int num_equalities() const override { return 0; }
  int num_inequalities() const override { return 0; }
  double objective(const VectorXd& x) const override {
    return 0.5 * (x - a).squaredNorm();
  }
  void objective_gradient(const VectorXd& x, VectorXd& grad) const override {
    grad = x - a;
  }
};

TEST(NlpSolver, QuadraticConvergesImmediately) {
  Quadratic p;
  const auto r = solve(p, VectorXd::Zero(3));
  ASSERT_TRUE(r.converged());
  EXPECT_LE(r.iterations, 3);
  // default Hessian damping caps the accuracy of a single Newton step
  EXPECT_LT((r.x - p.a).norm(), 1e-6);

  SolveOptions exact;
  exact.hessian_damping = 0.0;
  const auto re = solve(p, VectorXd::Zero(3), exact);
  ASSERT_TRUE(re.converged());
  EXPECT_LT((re.x - p.a).norm(), 1e-12);
  EXPECT_LT(re.kkt_residual, 1e-12);
}

struct Rosenbrock : NlpProblem {
  int num_variables() const override { return 2; }
  int num_equalities() const override { return 0; }
  int num_inequalities() const override { return 0; }
  double objective(const VectorXd& x) const override {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  }
  void objective_gradient(const VectorXd& x, VectorXd& grad) const override {
    const double b = x[1] - x[0] * x[0];
    grad.resize(2);
    grad[0] = -2.0 * (1.0 - x[0]) - 400.0 * x[0] * b;
    grad[1] = 200.0 * b;
  }
};

TEST(NlpSolver, RosenbrockFromStandardStart) {
  Rosenbrock p;
  VectorXd x0(2);
  x0 << -1.2, 1.0;
  const auto r = solve(p, x0);
  ASSERT_TRUE(r.converged());
  EXPECT_NEAR(r.x[0], 1.0, 1e-6);
  EXPECT_NEAR(r.x[1], 1.0, 1e-6);
}

struct EqualityQp : NlpProblem {
  int num_variables() const override { return 2; }
  int num_equalities() const override { return 1; }
  int num_inequalities() const override { return 0; }
  double objective(const VectorXd& x) const override {
    return x.squaredNorm();
  }
  void objective_gradient(const VectorXd& x, VectorXd& grad) const override {
    grad = 2.0 * x;
  }
  void equalities(const VectorXd& x, VectorXd& res) const override {
    res.resize(1);
    res[0] = x[0] + x[1] - 1.0;
  }
  const SparsityPattern& equality_jacobian_pattern() const override {
    static const SparsityPattern p{1, 2, {{0, 0}, {0, 1}}};
    return p;
  }
  void equality_jacobian(const VectorXd&,
                         std::vector<double>& v) const override {
    v = {1.0, 1.0};
  }
};

TEST(NlpSolver, EqualityQpHandSolved) {
  EqualityQp p;
  const auto r = solve(p, VectorXd::Zero(2));
  ASSERT_TRUE(r.converged());
  EXPECT_NEAR(r.x[0], 0.5, 1e-9);
  EXPECT_NEAR(r.x[1], 0.5, 1e-9);
  // 2x + lambda (1,1) = 0 at (0.5, 0.5)
  ASSERT_EQ(r.eq_multipliers.size(), 1);
  EXPECT_NEAR(r.eq_multipliers[0], -1.0, 1e-8);
}

struct CircleEquality : NlpProblem {
  bool sabotage_jacobian{false};

  int num_variables() const override { return 2; }
  int num_equalities() const override { return 1; }
  int num_inequalities() const override { return 0; }
  double objective(const VectorXd& x) const override { return x[0] + x[1]; }
  void objective_gradient(const VectorXd& x, VectorXd& grad) const override {
    grad.resize(2);
    grad << 1.0, 1.0;
    (void)x;
  }
  void equalities(const VectorXd& x, VectorXd& res) const override {
    res.resize(1);
    res[0] = x.squaredNorm() - 1.0;
  }
  const SparsityPattern& equality_jacobian_pattern() const override {
    static const SparsityPattern p{1, 2, {{0, 0}, {0, 1}}};
    return p;
  }
  void equality_jacobian(const VectorXd& x,
                         std::vector<double>& v) const override {
    v = {2.0 * x[0], 2.0 * x[1]};
    if (sabotage_jacobian) v[1] += 0.5;
  }
};

TEST(NlpSolver, CircleEqualityOptimum) {
  CircleEquality p;
  VectorXd x0(2);
  x0 << 0.0, -1.0;
  const auto r = solve(p, x0);
  ASSERT_TRUE(r.converged());
  const double s = -std::sqrt(0.5);
  EXPECT_NEAR(r.x[0], s, 1e-7);
  EXPECT_NEAR(r.x[1], s, 1e-7);
  EXPECT_LT(r.constraint_violation, 1e-9);
}

struct CornerInequality : NlpProblem {
  int num_variables() const override { return 2; }
  int num_equalities() const override { return 0; }
  int num_inequalities() const override { return 2; }
  double objective(const VectorXd& x) const override {
    return (x[0] + 1.0) * (x[0] + 1.0) + (x[1] + 1.0) * (x[1] + 1.0);
  }
  void objective_gradient(const VectorXd& x, VectorXd& grad) const override {
    grad = 2.0 * (x + Eigen::Vector2d::Ones());
  }
  void inequalities(const VectorXd& x, VectorXd& res) const override {
    res = -x;  // x >= 0
  }
  const SparsityPattern& inequality_jacobian_pattern() const override {
    static const SparsityPattern p{2, 2, {{0, 0}, {1, 1}}};
    return p;
  }
  void inequality_jacobian(const VectorXd&,
                           std::vector<double>& v) const override {
    v = {-1.0, -1.0};
  }
};

TEST(NlpSolver, ActiveInequalitiesAtCorner) {
  CornerInequality p;
  VectorXd x0(2);
  x0 << 2.0, 3.0;
  const auto r = solve(p, x0);
  ASSERT_TRUE(r.converged());
  EXPECT_LT(r.x.cwiseAbs().maxCoeff(), 1e-8);
  ASSERT_EQ(r.in_multipliers.size(), 2);
  EXPECT_NEAR(r.in_multipliers[0], 2.0, 1e-7);
  EXPECT_NEAR(r.in_multipliers[1], 2.0, 1e-7);
}

struct BoundedQuadratic : NlpProblem {
  int num_variables() const override { return 2; }
  int num_equalities() const override { return 0; }
  int num_inequalities() const override { return 0; }
  VectorXd lower_bounds() const override { return VectorXd::Zero(2); }
  double objective(const VectorXd& x) const override {
    return (x + Eigen::Vector2d::Ones()).squaredNorm();
  }
  void objective_gradient(const VectorXd& x, VectorXd& grad) const override {
    grad = 2.0 * (x + Eigen::Vector2d::Ones());
  }
};

TEST(NlpSolver, VariableBoundsRespected) {
  BoundedQuadratic p;
  VectorXd x0(2);
  x0 << 1.0, 1.0;
  const auto r = solve(p, x0);
  ASSERT_TRUE(r.converged());
  EXPECT_LT(r.x.cwiseAbs().maxCoeff(), 1e-9);
}

struct WeightedLeastSquares : NlpProblem {
  Eigen::Vector3d a{2.0, -1.0, 0.5};
  Eigen::Vector3d w{1.0, 4.0, 9.0};

  int num_variables() const override { return 3; }
  int num_equalities() const override { return 0; }
  int num_inequalities() const override { return 0; }
  double objective(const VectorXd& x) const override {
    return 0.5 * (x - a).dot(w.cwiseProduct(x - a));
  }
  void objective_gradient(const VectorXd& x, VectorXd& grad) const override {
    grad = w.cwiseProduct(x - a);
  }
  bool has_objective_hessian() const override { return true; }
  const SparsityPattern& objective_hessian_pattern() const override {
    static const SparsityPattern p{3, 3, {{0, 0}, {1, 1}, {2, 2}}};
    return p;
  }
  void objective_hessian(const VectorXd&,
                         std::vector<double>& v) const override {
    v = {1.0, 4.0, 9.0};
  }
};

TEST(NlpSolver, GaussNewtonModeUsesExactHessian) {
  WeightedLeastSquares p;
  SolveOptions opts;
  opts.hessian_mode = HessianMode::GaussNewton;
  opts.hessian_damping = 0.0;  // the declared Hessian is already exact
  const auto r = solve(p, VectorXd::Zero(3), opts);
  ASSERT_TRUE(r.converged());
  EXPECT_LE(r.iterations, 2);
  EXPECT_LT((r.x - p.a).norm(), 1e-9);
}

TEST(NlpSolver, HistoryTracksIterations) {
  Rosenbrock p;
  VectorXd x0(2);
  x0 << -1.2, 1.0;
  const auto r = solve(p, x0);
  ASSERT_TRUE(r.converged());
  ASSERT_EQ(static_cast<int>(r.history.size()), r.iterations + 1);
  EXPECT_EQ(r.history.front().iteration, 0);
  EXPECT_LE(r.history.back().kkt_residual, 1e-6);
  SolveOptions quiet;
  quiet.record_iterations = false;
  EXPECT_TRUE(solve(p, x0, quiet).history.empty());
}

TEST(NlpSolver, DeterministicRepeatSolves) {
  Rosenbrock p;
  VectorXd x0(2);
  x0 << -1.2, 1.0;
  const auto r1 = solve(p, x0);
  const auto r2 = solve(p, x0);
  ASSERT_EQ(r1.iterations, r2.iterations);
  EXPECT_EQ((r1.x - r2.x).cwiseAbs().maxCoeff(), 0.0);
  ASSERT_EQ(r1.history.size(), r2.history.size());
  for (size_t i = 0; i < r1.history.size(); ++i) {
    EXPECT_EQ(r1.history[i].merit, r2.history[i].merit);
    EXPECT_EQ(r1.history[i].step_norm, r2.history[i].step_norm);
  }
}

TEST(DerivativeCheck, AcceptsCorrectAndFlagsWrong) {
  CircleEquality good;
  VectorXd x(2);
  x << 0.3, -0.8;
  EXPECT_LT(check_derivatives(good, x, 5).max_error(), 1e-7);

  CircleEquality bad;
  bad.sabotage_jacobian = true;
  EXPECT_GT(check_derivatives(bad, x, 5).max_error(), 1e-2);
}

}  // namespace
