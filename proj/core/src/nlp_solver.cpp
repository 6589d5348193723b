#include "dock/nlp_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace dock::nlp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const SparsityPattern& empty_pattern() {
  static const SparsityPattern p{};
  return p;
}

/// Sparse matrix with a frozen structure; pattern entry k maps to a fixed
/// slot in the compressed value array. Pattern entries must be unique.
template <int Major>
struct PatternMatrix {
  Eigen::SparseMatrix<double, Major> m;
  std::vector<int> slot;

  void build(const SparsityPattern& p, int rows, int cols) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(p.entries.size());
    for (const auto& [r, c] : p.entries) trips.emplace_back(r, c, 0.0);
    m.resize(rows, cols);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    slot.resize(p.entries.size());
    for (size_t k = 0; k < p.entries.size(); ++k) {
      const auto [r, c] = p.entries[k];
      const int outer = Major == Eigen::RowMajor ? r : c;
      const int inner = Major == Eigen::RowMajor ? c : r;
      int idx = -1;
      for (int q = m.outerIndexPtr()[outer]; q < m.outerIndexPtr()[outer + 1];
           ++q) {
        if (m.innerIndexPtr()[q] == inner) {
          idx = q;
          break;
        }
      }
      slot[k] = idx;
    }
  }

  void set_values(const std::vector<double>& v) {
    double* p = m.valuePtr();
    const Eigen::Index nnz = m.nonZeros();
    for (Eigen::Index i = 0; i < nnz; ++i) p[i] = 0.0;
    for (size_t k = 0; k < slot.size(); ++k) p[slot[k]] = v[k];
  }
};

/// Symmetric Hessian storage fed from a lower-triangle pattern, with a
/// damping term on the full diagonal.
struct HessianMatrix {
  Eigen::SparseMatrix<double> m;
  std::vector<int> slot_lower, slot_upper;
  std::vector<int> diag;

  void build(const SparsityPattern& p, int n) {
    std::vector<Eigen::Triplet<double>> trips;
    for (const auto& [r, c] : p.entries) {
      trips.emplace_back(r, c, 0.0);
      if (r != c) trips.emplace_back(c, r, 0.0);
    }
    for (int i = 0; i < n; ++i) trips.emplace_back(i, i, 0.0);
    m.resize(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();

    auto find = [&](int r, int c) {
      for (int q = m.outerIndexPtr()[c]; q < m.outerIndexPtr()[c + 1]; ++q) {
        if (m.innerIndexPtr()[q] == r) return q;
      }
      return -1;
    };
    slot_lower.resize(p.entries.size());
    slot_upper.resize(p.entries.size());
    for (size_t k = 0; k < p.entries.size(); ++k) {
      const auto [r, c] = p.entries[k];
      slot_lower[k] = find(r, c);
      slot_upper[k] = r == c ? -1 : find(c, r);
    }
    diag.resize(n);
    for (int i = 0; i < n; ++i) diag[i] = find(i, i);
  }

  void set_values(const std::vector<double>& v, double damping) {
    double* p = m.valuePtr();
    const Eigen::Index nnz = m.nonZeros();
    for (Eigen::Index i = 0; i < nnz; ++i) p[i] = 0.0;
    for (size_t k = 0; k < slot_lower.size(); ++k) {
      p[slot_lower[k]] += v[k];
      if (slot_upper[k] >= 0) p[slot_upper[k]] += v[k];
    }
    for (int i : diag) p[i] += damping;
  }

  void set_dense(const Eigen::MatrixXd& b, double damping) {
    // Dense quasi-Newton matrix; structure is rebuilt only if needed.
    const int n = static_cast<int>(b.rows());
    if (m.rows() != n || m.nonZeros() != static_cast<Eigen::Index>(n) * n) {
      std::vector<Eigen::Triplet<double>> trips;
      trips.reserve(static_cast<size_t>(n) * n);
      for (int c = 0; c < n; ++c) {
        for (int r = 0; r < n; ++r) trips.emplace_back(r, c, 0.0);
      }
      m.resize(n, n);
      m.setFromTriplets(trips.begin(), trips.end());
      m.makeCompressed();
    }
    double* p = m.valuePtr();
    for (int c = 0; c < n; ++c) {
      for (int r = 0; r < n; ++r) {
        p[static_cast<Eigen::Index>(c) * n + r] =
            b(r, c) + (r == c ? damping : 0.0);
      }
    }
  }
};

double inf_norm(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
}

}  // namespace

Eigen::VectorXd NlpProblem::lower_bounds() const {
  return Eigen::VectorXd::Constant(num_variables(), -kInf);
}

Eigen::VectorXd NlpProblem::upper_bounds() const {
  return Eigen::VectorXd::Constant(num_variables(), kInf);
}

void NlpProblem::equalities(const Eigen::VectorXd&,
                            Eigen::VectorXd& residual) const {
  residual.setZero(num_equalities());
}

void NlpProblem::inequalities(const Eigen::VectorXd&,
                              Eigen::VectorXd& residual) const {
  residual.setZero(num_inequalities());
}

const SparsityPattern& NlpProblem::equality_jacobian_pattern() const {
  return empty_pattern();
}

const SparsityPattern& NlpProblem::inequality_jacobian_pattern() const {
  return empty_pattern();
}

void NlpProblem::equality_jacobian(const Eigen::VectorXd&,
                                   std::vector<double>& values) const {
  values.clear();
}

void NlpProblem::inequality_jacobian(const Eigen::VectorXd&,
                                     std::vector<double>& values) const {
  values.clear();
}

const SparsityPattern& NlpProblem::objective_hessian_pattern() const {
  return empty_pattern();
}

void NlpProblem::objective_hessian(const Eigen::VectorXd&,
                                   std::vector<double>& values) const {
  values.clear();
}

void NlpProblem::lagrangian_hessian(const Eigen::VectorXd& x,
                                    const Eigen::VectorXd&,
                                    const Eigen::VectorXd&,
                                    std::vector<double>& values) const {
  objective_hessian(x, values);
}

double DerivativeCheckReport::max_error() const {
  return std::max({objective_gradient_error, equality_jacobian_error,
                   inequality_jacobian_error, directional_error});
}

SolveResult solve(const NlpProblem& problem, const Eigen::VectorXd& x0,
                  const SolveOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();

  const int n = problem.num_variables();
  const int me = problem.num_equalities();
  const int mi = problem.num_inequalities();

  if (options.hessian_mode == HessianMode::GaussNewton &&
      !problem.has_objective_hessian()) {
    throw std::invalid_argument(
        "GaussNewton mode requires an objective_hessian callback");
  }

  const Eigen::VectorXd lb = problem.lower_bounds();
  const Eigen::VectorXd ub = problem.upper_bounds();
  Eigen::VectorXd x = x0.cwiseMax(lb).cwiseMin(ub);

  PatternMatrix<Eigen::RowMajor> jeq, jin;
  jeq.build(problem.equality_jacobian_pattern(), me, n);
  jin.build(problem.inequality_jacobian_pattern(), mi, n);
  HessianMatrix hess;
  if (options.hessian_mode == HessianMode::GaussNewton) {
    hess.build(problem.objective_hessian_pattern(), n);
  }

  Eigen::MatrixXd bfgs;
  if (options.hessian_mode == HessianMode::DampedBfgs) {
    bfgs = Eigen::MatrixXd::Identity(n, n);
  }

  double f = 0.0;
  Eigen::VectorXd grad(n), ceq(me), cin(mi);
  std::vector<double> jv;

  auto require_finite = [](bool ok, const char* what) {
    if (!ok) {
      throw std::runtime_error(std::string("nlp solve: non-finite ") + what +
                               " returned by problem callback");
    }
  };
  auto evaluate = [&](const Eigen::VectorXd& at) {
    f = problem.objective(at);
    problem.objective_gradient(at, grad);
    problem.equalities(at, ceq);
    problem.inequalities(at, cin);
    problem.equality_jacobian(at, jv);
    jeq.set_values(jv);
    problem.inequality_jacobian(at, jv);
    jin.set_values(jv);
    require_finite(std::isfinite(f), "objective");
    require_finite(grad.allFinite(), "objective gradient");
    require_finite(ceq.allFinite(), "equality residual");
    require_finite(cin.allFinite(), "inequality residual");
    require_finite(jeq.m.coeffs().allFinite(), "equality Jacobian");
    require_finite(jin.m.coeffs().allFinite(), "inequality Jacobian");
  };
  evaluate(x);

  Eigen::VectorXd lam = Eigen::VectorXd::Zero(me);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(mi);

  auto violation = [&](const Eigen::VectorXd& e, const Eigen::VectorXd& i) {
    double v = 0.0;
    if (e.size() > 0) v = std::max(v, e.lpNorm<Eigen::Infinity>());
    if (i.size() > 0) v = std::max(v, i.cwiseMax(0.0).maxCoeff());
    return v;
  };
  auto violation_l1 = [&](const Eigen::VectorXd& e, const Eigen::VectorXd& i) {
    double v = 0.0;
    if (e.size() > 0) v += e.lpNorm<1>();
    if (i.size() > 0) v += i.cwiseMax(0.0).sum();
    return v;
  };

  auto kkt_residual = [&]() {
    Eigen::VectorXd gl = grad;
    if (me > 0) gl += jeq.m.transpose() * lam;
    if (mi > 0) gl += jin.m.transpose() * mu;
    // Projected-gradient criticality: distance from x to the box projection
    // of x - grad_L. Unlike an at-bound window test this stays small for
    // variables parked epsilon above an active bound with the gradient
    // pushing into it.
    double stat = 0.0;
    int stat_i = -1;
    for (int i = 0; i < n; ++i) {
      double target = x[i] - gl[i];
      if (std::isfinite(lb[i])) target = std::max(target, lb[i]);
      if (std::isfinite(ub[i])) target = std::min(target, ub[i]);
      const double r = std::abs(x[i] - target);
      if (r > stat) stat_i = i;
      stat = std::max(stat, r);
    }
    double comp = 0.0;
    int comp_i = -1;
    for (int i = 0; i < mi; ++i) {
      if (std::abs(mu[i] * cin[i]) > comp) comp_i = i;
      comp = std::max(comp, std::abs(mu[i] * cin[i]));
    }
    if (std::getenv("DOCK_NLP_TRACE")) {
      fprintf(stderr, "    kkt stat=%.3g at var %d  comp=%.3g at row %d\n",
              stat, stat_i, comp, comp_i);
    }
    return std::max(stat, comp);
  };

  SolveResult result;
  result.status = SolveStatus::MaxIterations;

  QpSolver qp_solver;
  QpProblem qp;
  qp.A_eq = jeq.m;
  qp.A_in = jin.m;

  double penalty = options.initial_penalty;
  std::vector<double> hv;
  bool prev_step_tiny = false;
  // Levenberg damping, raised when the merit line search rejects most of
  // the step and lowered again once full steps are accepted. The dynamics
  // products give the constraints enough curvature that a fixed value
  // either crawls far from the solution or damps convergence near it.
  double damping = options.hessian_damping;

  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    const double viol = violation(ceq, cin);
    const double kkt = kkt_residual();

    if (options.record_iterations) {
      IterationRecord rec;
      rec.iteration = iter;
      rec.objective = f;
      rec.constraint_violation = viol;
      rec.kkt_residual = kkt;
      rec.penalty = penalty;
      rec.merit = f + penalty * violation_l1(ceq, cin);
      result.history.push_back(rec);
    }

    if (viol <= options.constraint_tolerance &&
        kkt <= options.kkt_tolerance) {
      result.status = SolveStatus::Converged;
      break;
    }

    if (options.hessian_mode == HessianMode::GaussNewton) {
      if (problem.has_lagrangian_hessian()) {
        problem.lagrangian_hessian(x, lam, mu, hv);
      } else {
        problem.objective_hessian(x, hv);
      }
      hess.set_values(hv, damping);
    } else {
      hess.set_dense(bfgs, damping);
    }

    qp.H = hess.m;
    qp.g = grad;
    qp.A_eq = jeq.m;
    qp.b_eq = -ceq;
    qp.A_in = jin.m;
    qp.b_in = -cin;
    qp.lb = lb - x;
    qp.ub = ub - x;

    const QpResult qr = qp_solver.solve(qp, options.qp);
    if (options.record_iterations && !result.history.empty()) {
      result.history.back().qp_rounds = qr.rounds;
    }
    if (qr.status != QpStatus::Optimal) {
      if (std::getenv("DOCK_NLP_TRACE")) {
        fprintf(stderr, "  it %3d qp status=%d rounds=%d facts=%d\n", iter,
                static_cast<int>(qr.status), qr.rounds, qr.factorizations);
      }
      // An indefinite Lagrangian Hessian can leave the subproblem
      // unbounded or its factorizations singular; convexify and retry.
      if (damping < 1e7) {
        damping = std::max(damping * 100.0, 1e-4);
        continue;
      }
      result.status = SolveStatus::QpFailure;
      break;
    }

    const Eigen::VectorXd dz = qr.z;
    const double step_norm = inf_norm(dz);
    if (options.record_iterations && !result.history.empty()) {
      result.history.back().step_norm = step_norm;
    }

    if (step_norm <= 1e-11 * (1.0 + inf_norm(x))) {
      lam = qr.eq_multipliers;
      mu = qr.in_multipliers;
      if (viol <= options.constraint_tolerance &&
          kkt_residual() <= options.kkt_tolerance) {
        result.status = SolveStatus::Converged;
        ++iter;
        break;
      }
      if (prev_step_tiny) {
        result.status = SolveStatus::LineSearchFailure;
        break;
      }
      prev_step_tiny = true;
      continue;
    }
    prev_step_tiny = false;

    double mult_inf = std::max(inf_norm(qr.eq_multipliers),
                               inf_norm(qr.in_multipliers));
    mult_inf = std::max(mult_inf, inf_norm(qr.reduced_costs));
    // Track the multiplier estimate both ways. A penalty stuck at a stale
    // high-water mark amplifies the linear-solve residual of the step into
    // merit noise larger than the available descent.
    penalty = std::max(1.2 * mult_inf + 1e-4, 0.7 * penalty);

    const double viol1 = violation_l1(ceq, cin);
    const double merit0 = f + penalty * viol1;
    const double descent = grad.dot(dz) - penalty * viol1;

    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd x_trial, ceq_trial(me), cin_trial(mi);
    double f_trial = 0.0;
    for (int bt = 0; bt <= options.max_backtracks; ++bt) {
      x_trial = (x + alpha * dz).cwiseMax(lb).cwiseMin(ub);
      f_trial = problem.objective(x_trial);
      problem.equalities(x_trial, ceq_trial);
      problem.inequalities(x_trial, cin_trial);
      const double merit_t =
          f_trial + penalty * violation_l1(ceq_trial, cin_trial);
      if (std::getenv("DOCK_NLP_TRACE")) {
        fprintf(stderr,
                "  it %3d bt %2d alpha=%.4g  dmerit=%+.6g  df=%+.6g  "
                "dpen=%+.6g  gdot=%+.6g descent=%+.6g\n",
                iter, bt, alpha, merit_t - merit0, f_trial - f,
                penalty * (violation_l1(ceq_trial, cin_trial) - viol1),
                grad.dot(dz), descent);
      }
      if (merit_t <=
          merit0 + options.armijo_coefficient * alpha * descent + 1e-14) {
        accepted = true;
        break;
      }
      if (bt == 0 && me + mi > 0) {
        // Second-order correction. The full step often tracks the objective
        // model closely while the constraint residual it leaves behind grows
        // quadratically; retry it with that residual projected out along a
        // minimum-norm direction before conceding step length. Violated
        // inequality rows are corrected to their boundary.
        std::vector<int> viol_rows;
        for (int i = 0; i < mi; ++i) {
          if (cin_trial[i] > 0.0) viol_rows.push_back(i);
        }
        const int mc = me + static_cast<int>(viol_rows.size());
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(jeq.m.nonZeros() + jin.m.nonZeros());
        for (int k = 0; k < jeq.m.outerSize(); ++k) {
          for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator
                   it(jeq.m, k);
               it; ++it) {
            trips.emplace_back(it.row(), it.col(), it.value());
          }
        }
        Eigen::VectorXd rhs(mc);
        rhs.head(me) = -ceq_trial;
        for (std::size_t k = 0; k < viol_rows.size(); ++k) {
          const int r = viol_rows[k];
          for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator
                   it(jin.m, r);
               it; ++it) {
            trips.emplace_back(me + static_cast<int>(k), it.col(), it.value());
          }
          rhs[me + static_cast<int>(k)] = -cin_trial[r];
        }
        Eigen::SparseMatrix<double> jc(mc, n);
        jc.setFromTriplets(trips.begin(), trips.end());
        Eigen::SparseMatrix<double> jjt =
            jc * Eigen::SparseMatrix<double>(jc.transpose());
        for (int i = 0; i < mc; ++i) jjt.coeffRef(i, i) += 1e-10;
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(jjt);
        if (chol.info() == Eigen::Success) {
          const Eigen::VectorXd corr = jc.transpose() * chol.solve(rhs);
          const Eigen::VectorXd x_soc =
              (x + dz + corr).cwiseMax(lb).cwiseMin(ub);
          const double f_soc = problem.objective(x_soc);
          problem.equalities(x_soc, ceq_trial);
          problem.inequalities(x_soc, cin_trial);
          const double merit_soc =
              f_soc + penalty * violation_l1(ceq_trial, cin_trial);
          if (std::getenv("DOCK_NLP_TRACE")) {
            double vin = 0.0;
            for (int i = 0; i < mi; ++i) vin += std::max(0.0, cin_trial[i]);
            fprintf(stderr,
                    "  it %3d soc  dmerit=%+.6g  df=%+.6g  veq=%.3g vin=%.3g "
                    "corr=%.3g nviol=%zu\n",
                    iter, merit_soc - merit0, f_soc - f,
                    ceq_trial.lpNorm<1>(), vin, corr.lpNorm<Eigen::Infinity>(),
                    viol_rows.size());
          }
          if (merit_soc <=
              merit0 + options.armijo_coefficient * descent + 1e-14) {
            x_trial = x_soc;
            f_trial = f_soc;
            accepted = true;
            break;
          }
        }
      }
      alpha *= options.backtrack_factor;
    }
    if (!accepted) {
      if (damping < 1e7) {
        damping = std::max(damping * 100.0, 1e-4);
        continue;
      }
      result.status = SolveStatus::LineSearchFailure;
      break;
    }
    if (options.record_iterations && !result.history.empty()) {
      result.history.back().step_length = alpha;
    }
    if (alpha >= 0.99) {
      damping = std::max(options.hessian_damping, damping / 3.0);
    } else if (alpha < 0.1) {
      damping = std::min(damping * 10.0, 1e7);
    }

    Eigen::VectorXd grad_l_old;
    if (options.hessian_mode == HessianMode::DampedBfgs) {
      grad_l_old = grad;
      if (me > 0) grad_l_old += jeq.m.transpose() * qr.eq_multipliers;
      if (mi > 0) grad_l_old += jin.m.transpose() * qr.in_multipliers;
    }

    const Eigen::VectorXd step_taken = x_trial - x;
    x = x_trial;
    lam = qr.eq_multipliers;
    mu = qr.in_multipliers;
    evaluate(x);

    if (options.hessian_mode == HessianMode::DampedBfgs) {
      Eigen::VectorXd grad_l_new = grad;
      if (me > 0) grad_l_new += jeq.m.transpose() * lam;
      if (mi > 0) grad_l_new += jin.m.transpose() * mu;
      const Eigen::VectorXd& s = step_taken;
      Eigen::VectorXd y = grad_l_new - grad_l_old;
      const Eigen::VectorXd bs = bfgs * s;
      const double sbs = s.dot(bs);
      const double sy = s.dot(y);
      if (sbs > 1e-14) {
        // Powell damping keeps the update positive definite.
        if (sy < 0.2 * sbs) {
          const double theta = 0.8 * sbs / (sbs - sy);
          y = theta * y + (1.0 - theta) * bs;
        }
        const double sy_d = s.dot(y);
        if (sy_d > 1e-14) {
          bfgs -= (bs * bs.transpose()) / sbs;
          bfgs += (y * y.transpose()) / sy_d;
        }
      }
    }
  }

  result.x = x;
  result.eq_multipliers = lam;
  result.in_multipliers = mu;
  result.objective = f;
  result.constraint_violation = violation(ceq, cin);
  result.kkt_residual = kkt_residual();
  result.iterations = iter;
  result.solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return result;
}

DerivativeCheckReport check_derivatives(const NlpProblem& problem,
                                        const Eigen::VectorXd& x,
                                        std::uint64_t seed) {
  const int n = problem.num_variables();
  const int me = problem.num_equalities();
  const int mi = problem.num_inequalities();

  const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());

  auto rel = [](double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
  };

  Eigen::VectorXd grad(n);
  problem.objective_gradient(x, grad);

  // Column-indexed views of the declared Jacobians.
  const SparsityPattern& pe = problem.equality_jacobian_pattern();
  const SparsityPattern& pi = problem.inequality_jacobian_pattern();
  std::vector<double> ve, vi;
  problem.equality_jacobian(x, ve);
  problem.inequality_jacobian(x, vi);
  std::vector<std::vector<std::pair<int, double>>> eq_cols(n), in_cols(n);
  for (size_t k = 0; k < pe.entries.size(); ++k) {
    eq_cols[pe.entries[k].second].emplace_back(pe.entries[k].first, ve[k]);
  }
  for (size_t k = 0; k < pi.entries.size(); ++k) {
    in_cols[pi.entries[k].second].emplace_back(pi.entries[k].first, vi[k]);
  }

  DerivativeCheckReport report;
  Eigen::VectorXd xp = x, xm = x;
  Eigen::VectorXd ep(me), em(me), ip(mi), im(mi);

  for (int j = 0; j < n; ++j) {
    const double h = h0 * (1.0 + std::abs(x[j]));
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;

    const double fp = problem.objective(xp);
    const double fm = problem.objective(xm);
    report.objective_gradient_error = std::max(
        report.objective_gradient_error, rel((fp - fm) / (2.0 * h), grad[j]));

    problem.equalities(xp, ep);
    problem.equalities(xm, em);
    problem.inequalities(xp, ip);
    problem.inequalities(xm, im);

    Eigen::VectorXd fd_eq = (ep - em) / (2.0 * h);
    Eigen::VectorXd fd_in = (ip - im) / (2.0 * h);
    for (const auto& [row, val] : eq_cols[j]) {
      report.equality_jacobian_error =
          std::max(report.equality_jacobian_error, rel(fd_eq[row], val));
      fd_eq[row] = 0.0;
    }
    for (const auto& [row, val] : in_cols[j]) {
      report.inequality_jacobian_error =
          std::max(report.inequality_jacobian_error, rel(fd_in[row], val));
      fd_in[row] = 0.0;
    }
    // Whatever is left claims to be structurally zero.
    if (me > 0) {
      report.equality_jacobian_error =
          std::max(report.equality_jacobian_error,
                   fd_eq.cwiseAbs().maxCoeff() > 1.0
                       ? 1.0
                       : fd_eq.cwiseAbs().maxCoeff());
    }
    if (mi > 0) {
      report.inequality_jacobian_error =
          std::max(report.inequality_jacobian_error,
                   fd_in.cwiseAbs().maxCoeff() > 1.0
                       ? 1.0
                       : fd_in.cwiseAbs().maxCoeff());
    }

    xp[j] = x[j];
    xm[j] = x[j];
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d[i] = gauss(rng);
  if (d.norm() > 0) d /= d.norm();
  const double h = h0 * (1.0 + x.lpNorm<Eigen::Infinity>());
  const double fp = problem.objective(x + h * d);
  const double fm = problem.objective(x - h * d);
  report.directional_error = rel((fp - fm) / (2.0 * h), grad.dot(d));

  return report;
}

}  // namespace dock::nlp
