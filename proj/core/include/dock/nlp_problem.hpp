#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

namespace dock::nlp {

/// Fixed list of structurally nonzero entries, in a deterministic order.
/// Value callbacks fill a flat array aligned with `entries`.
struct SparsityPattern {
  int rows{0};
  int cols{0};
  std::vector<std::pair<int, int>> entries;

  int nnz() const { return static_cast<int>(entries.size()); }
};

/// Smooth nonlinear program
///
///   min f(x)   s.t.  c_eq(x) = 0,  c_in(x) <= 0,  lb <= x <= ub
///
/// with user-declared Jacobian sparsity. The declared patterns must not
/// change between calls; values are written aligned with the pattern entry
/// order.
class NlpProblem {
 public:
  virtual ~NlpProblem() = default;

  virtual int num_variables() const = 0;
  virtual int num_equalities() const = 0;
  virtual int num_inequalities() const = 0;

  virtual Eigen::VectorXd lower_bounds() const;
  virtual Eigen::VectorXd upper_bounds() const;

  virtual double objective(const Eigen::VectorXd& x) const = 0;
  virtual void objective_gradient(const Eigen::VectorXd& x,
                                  Eigen::VectorXd& grad) const = 0;

  virtual void equalities(const Eigen::VectorXd& x,
                          Eigen::VectorXd& residual) const;
  virtual void inequalities(const Eigen::VectorXd& x,
                            Eigen::VectorXd& residual) const;

  virtual const SparsityPattern& equality_jacobian_pattern() const;
  virtual const SparsityPattern& inequality_jacobian_pattern() const;
  virtual void equality_jacobian(const Eigen::VectorXd& x,
                                 std::vector<double>& values) const;
  virtual void inequality_jacobian(const Eigen::VectorXd& x,
                                   std::vector<double>& values) const;

  /// Optional positive-semidefinite objective Hessian (or Gauss-Newton
  /// approximation of it), lower triangle only. When provided, the solver
  /// can skip quasi-Newton updates.
  virtual bool has_objective_hessian() const { return false; }
  virtual const SparsityPattern& objective_hessian_pattern() const;
  virtual void objective_hessian(const Eigen::VectorXd& x,
                                 std::vector<double>& values) const;

  /// Optional Hessian of the full Lagrangian f + lam' c_eq + mu' c_in on
  /// the objective Hessian pattern. `lam` and `mu` are multiplier
  /// estimates; the matrix may be indefinite.
  virtual bool has_lagrangian_hessian() const { return false; }
  virtual void lagrangian_hessian(const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& lam,
                                  const Eigen::VectorXd& mu,
                                  std::vector<double>& values) const;
};

}  // namespace dock::nlp
