#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace dock::nlp {

/// Convex quadratic program
///
///   min 1/2 z' H z + g' z
///   s.t. A_eq z = b_eq,  A_in z <= b_in,  lb <= z <= ub.
///
/// H is the full symmetric matrix (both triangles stored).
struct QpProblem {
  Eigen::SparseMatrix<double> H;
  Eigen::VectorXd g;
  Eigen::SparseMatrix<double, Eigen::RowMajor> A_eq;
  Eigen::VectorXd b_eq;
  Eigen::SparseMatrix<double, Eigen::RowMajor> A_in;
  Eigen::VectorXd b_in;
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;
};

struct QpOptions {
  int max_rounds{200};
  double tolerance{1e-9};
  double kkt_shift{1e-10};    // dual-block regularization of the KKT matrix
  int refinement_passes{4};
};

enum class QpStatus { Optimal, IterationLimit, Factorization };

struct QpResult {
  QpStatus status{QpStatus::IterationLimit};
  Eigen::VectorXd z;
  Eigen::VectorXd eq_multipliers;
  Eigen::VectorXd in_multipliers;   // >= 0 at the solution
  Eigen::VectorXd reduced_costs;    // gradient of the Lagrangian per variable
  int rounds{0};
  int factorizations{0};
};

/// Active-set solver on a single KKT matrix with a fixed sparsity pattern.
/// Rows and bounds enter and leave the system by masking entries, so the
/// symbolic factorization is computed once per structure. When every
/// inequality row carries an exclusive penalized slack column the solver
/// runs a feasible-start primal active-set walk with ratio tests; otherwise
/// it flips constraints on primal-dual signals. The working set persists
/// across solves with the same structure, which is what makes consecutive
/// SQP iterations cheap.
class QpSolver {
 public:
  QpResult solve(const QpProblem& qp, const QpOptions& options);

  /// Forgets the persistent working set and symbolic factorization.
  void reset();

 private:
  struct Slot {
    int row;
    int col;
    int index;
  };

  void setup(const QpProblem& qp);
  bool structure_matches(const QpProblem& qp) const;

  // Structure captured at setup time.
  int n_{0}, me_{0}, mi_{0};
  Eigen::SparseMatrix<double> kkt_;
  std::vector<Slot> h_slots_;
  std::vector<Slot> eq_slots_, eq_slots_t_;
  std::vector<Slot> in_slots_, in_slots_t_;
  std::vector<int> primal_diag_, dual_diag_;
  std::vector<std::pair<int, int>> h_entries_, eq_entries_, in_entries_;
  bool analyzed_{false};
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt_;

  // Working set: 0 free, 1 at lower bound, 2 at upper bound per variable;
  // one flag per inequality row.
  std::vector<std::uint8_t> var_state_;
  std::vector<std::uint8_t> row_active_;
  bool have_working_set_{false};

  // Variables whose sparsity allows them to act as the exclusive elastic
  // column of a single inequality row (no equality entries, no Hessian
  // off-diagonals). Confirmed against bounds and gradient per solve.
  std::vector<std::uint8_t> elastic_pattern_;
  std::vector<int> elastic_var_of_row_;
};

}  // namespace dock::nlp
