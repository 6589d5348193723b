#include "dock/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <set>
#include <string>

namespace dock::nlp {
namespace {

constexpr double kSeedTol = 1e-12;
// Bounds at or beyond this magnitude are treated as absent.
constexpr double kUnbounded = 1e19;
// Relative residual (after refinement) that marks the working set as
// over-determined rather than merely ill-conditioned.
constexpr double kInconsistentTol = 1e-6;
// Directional derivatives smaller than this cannot block a step.
constexpr double kRatioDen = 1e-11;
// Passes of the phase-1 bound fixing loop.
constexpr int kPhase1Passes = 64;

int find_slot(const Eigen::SparseMatrix<double>& m, int row, int col) {
  for (int idx = m.outerIndexPtr()[col]; idx < m.outerIndexPtr()[col + 1];
       ++idx) {
    if (m.innerIndexPtr()[idx] == row) return idx;
  }
  return -1;
}

}  // namespace

void QpSolver::reset() {
  analyzed_ = false;
  have_working_set_ = false;
}

bool QpSolver::structure_matches(const QpProblem& qp) const {
  if (!analyzed_) return false;
  if (qp.g.size() != n_ || qp.b_eq.size() != me_ || qp.b_in.size() != mi_) {
    return false;
  }
  auto same_pattern = [](const auto& entries, const auto& matrix,
                         bool row_major) {
    size_t k = 0;
    for (int outer = 0; outer < matrix.outerSize(); ++outer) {
      for (typename std::remove_reference_t<decltype(matrix)>::InnerIterator
               it(matrix, outer);
           it; ++it) {
        if (k >= entries.size()) return false;
        const int r = row_major ? static_cast<int>(it.row())
                                : static_cast<int>(it.row());
        const int c = static_cast<int>(it.col());
        if (entries[k].first != r || entries[k].second != c) return false;
        ++k;
      }
    }
    return k == entries.size();
  };
  return same_pattern(h_entries_, qp.H, false) &&
         same_pattern(eq_entries_, qp.A_eq, true) &&
         same_pattern(in_entries_, qp.A_in, true);
}

void QpSolver::setup(const QpProblem& qp) {
  n_ = static_cast<int>(qp.g.size());
  me_ = static_cast<int>(qp.b_eq.size());
  mi_ = static_cast<int>(qp.b_in.size());
  const int dim = n_ + me_ + mi_;

  h_entries_.clear();
  eq_entries_.clear();
  in_entries_.clear();
  for (int c = 0; c < qp.H.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(qp.H, c); it; ++it) {
      h_entries_.emplace_back(static_cast<int>(it.row()), c);
    }
  }
  for (int r = 0; r < qp.A_eq.outerSize(); ++r) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator
             it(qp.A_eq, r);
         it; ++it) {
      eq_entries_.emplace_back(r, static_cast<int>(it.col()));
    }
  }
  for (int r = 0; r < qp.A_in.outerSize(); ++r) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator
             it(qp.A_in, r);
         it; ++it) {
      in_entries_.emplace_back(r, static_cast<int>(it.col()));
    }
  }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(h_entries_.size() + 2 * eq_entries_.size() +
                2 * in_entries_.size() + dim);
  for (const auto& [r, c] : h_entries_) trips.emplace_back(r, c, 0.0);
  for (int i = 0; i < n_; ++i) trips.emplace_back(i, i, 0.0);
  for (const auto& [r, c] : eq_entries_) {
    trips.emplace_back(n_ + r, c, 0.0);
    trips.emplace_back(c, n_ + r, 0.0);
  }
  for (const auto& [r, c] : in_entries_) {
    trips.emplace_back(n_ + me_ + r, c, 0.0);
    trips.emplace_back(c, n_ + me_ + r, 0.0);
  }
  for (int k = 0; k < me_ + mi_; ++k) trips.emplace_back(n_ + k, n_ + k, 0.0);

  kkt_.resize(dim, dim);
  kkt_.setFromTriplets(trips.begin(), trips.end());
  kkt_.makeCompressed();

  auto fill_slots = [&](const std::vector<std::pair<int, int>>& entries,
                        std::vector<Slot>& slots, int row_off, bool transpose) {
    slots.clear();
    slots.reserve(entries.size());
    for (const auto& [r, c] : entries) {
      const int rr = transpose ? c : row_off + r;
      const int cc = transpose ? row_off + r : c;
      slots.push_back({rr, cc, find_slot(kkt_, rr, cc)});
    }
  };
  fill_slots(h_entries_, h_slots_, 0, false);
  fill_slots(eq_entries_, eq_slots_, n_, false);
  fill_slots(eq_entries_, eq_slots_t_, n_, true);
  fill_slots(in_entries_, in_slots_, n_ + me_, false);
  fill_slots(in_entries_, in_slots_t_, n_ + me_, true);
  primal_diag_.resize(n_);
  for (int i = 0; i < n_; ++i) primal_diag_[i] = find_slot(kkt_, i, i);
  dual_diag_.resize(me_ + mi_);
  for (int k = 0; k < me_ + mi_; ++k) {
    dual_diag_[k] = find_slot(kkt_, n_ + k, n_ + k);
  }

  std::vector<int> in_count(n_, 0), eq_count(n_, 0), h_off(n_, 0);
  for (const auto& [r, c] : in_entries_) ++in_count[c];
  for (const auto& [r, c] : eq_entries_) ++eq_count[c];
  for (const auto& [r, c] : h_entries_) {
    if (r != c) {
      ++h_off[r];
      ++h_off[c];
    }
  }
  elastic_pattern_.assign(n_, 0);
  for (int i = 0; i < n_; ++i) {
    elastic_pattern_[i] =
        in_count[i] == 1 && eq_count[i] == 0 && h_off[i] == 0 ? 1 : 0;
  }

  ldlt_.analyzePattern(kkt_);
  analyzed_ = true;
  var_state_.assign(n_, 0);
  row_active_.assign(mi_, 0);
  have_working_set_ = false;
}

QpResult QpSolver::solve(const QpProblem& qp, const QpOptions& options) {
  if (!structure_matches(qp)) setup(qp);

  const int dim = n_ + me_ + mi_;
  const double tol = options.tolerance;
  const double shift = options.kkt_shift;

  auto lower_finite = [&](int i) { return std::isfinite(qp.lb[i]); };
  auto upper_finite = [&](int i) { return std::isfinite(qp.ub[i]); };
  auto pinned = [&](int i) {
    return lower_finite(i) && upper_finite(i) && qp.ub[i] - qp.lb[i] <= tol;
  };

  auto seed_working_set = [&]() {
    for (int i = 0; i < n_; ++i) {
      if (lower_finite(i) && qp.lb[i] >= -kSeedTol) {
        var_state_[i] = 1;
      } else if (upper_finite(i) && qp.ub[i] <= kSeedTol) {
        var_state_[i] = 2;
      } else {
        var_state_[i] = 0;
      }
    }
    for (int r = 0; r < mi_; ++r) {
      row_active_[r] = qp.b_in[r] <= kSeedTol ? 1 : 0;
    }
    have_working_set_ = true;
  };

  if (!have_working_set_) {
    seed_working_set();
  } else {
    // Bounds may change finiteness between solves with the same structure.
    for (int i = 0; i < n_; ++i) {
      if (var_state_[i] == 1 && !lower_finite(i)) var_state_[i] = 0;
      if (var_state_[i] == 2 && !upper_finite(i)) var_state_[i] = 0;
    }
  }

  auto fixed_value = [&](int i) {
    return var_state_[i] == 1 ? qp.lb[i] : qp.ub[i];
  };

  // Columns that act as the exclusive elastic slack of a single inequality
  // row, confirmed against bounds and gradient for this solve.
  elastic_var_of_row_.assign(mi_, -1);
  bool all_rows_elastic = mi_ > 0;
  for (int r = 0; r < mi_; ++r) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator
             it(qp.A_in, r);
         it; ++it) {
      const int c = static_cast<int>(it.col());
      if (elastic_pattern_[c] && it.value() < 0.0 && qp.lb[c] >= -kSeedTol &&
          qp.lb[c] <= kSeedTol && qp.ub[c] >= kUnbounded && qp.g[c] > 0.0) {
        elastic_var_of_row_[r] = c;
      }
    }
    if (elastic_var_of_row_[r] < 0) all_rows_elastic = false;
  }

  std::vector<double> vals(static_cast<size_t>(kkt_.nonZeros()));
  Eigen::VectorXd rhs(dim), sol(dim);

  auto assemble = [&]() {
    std::fill(vals.begin(), vals.end(), 0.0);
    rhs.setZero();

    size_t k = 0;
    for (int c = 0; c < qp.H.outerSize(); ++c) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(qp.H, c); it; ++it) {
        const int r = static_cast<int>(it.row());
        const Slot& s = h_slots_[k++];
        if (var_state_[r] == 0) {
          if (var_state_[c] == 0) {
            vals[s.index] += it.value();
          } else {
            rhs[r] -= it.value() * fixed_value(c);
          }
        }
      }
    }
    for (int i = 0; i < n_; ++i) {
      if (var_state_[i] != 0) {
        vals[primal_diag_[i]] = 1.0;
        rhs[i] = fixed_value(i);
      } else {
        rhs[i] -= qp.g[i];
      }
    }

    k = 0;
    for (int r = 0; r < me_; ++r) {
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator
               it(qp.A_eq, r);
           it; ++it) {
        const int c = static_cast<int>(it.col());
        const Slot& s = eq_slots_[k];
        const Slot& st = eq_slots_t_[k];
        ++k;
        if (var_state_[c] == 0) {
          vals[s.index] += it.value();
          vals[st.index] += it.value();
        } else {
          rhs[n_ + r] -= it.value() * fixed_value(c);
        }
      }
      rhs[n_ + r] += qp.b_eq[r];
      vals[dual_diag_[r]] = -shift;
    }

    k = 0;
    for (int r = 0; r < mi_; ++r) {
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator
               it(qp.A_in, r);
           it; ++it) {
        const int c = static_cast<int>(it.col());
        const Slot& s = in_slots_[k];
        const Slot& st = in_slots_t_[k];
        ++k;
        if (row_active_[r]) {
          if (var_state_[c] == 0) {
            vals[s.index] += it.value();
            vals[st.index] += it.value();
          } else {
            rhs[n_ + me_ + r] -= it.value() * fixed_value(c);
          }
        }
      }
      if (row_active_[r]) {
        rhs[n_ + me_ + r] += qp.b_in[r];
        vals[dual_diag_[me_ + r]] = -shift;
      } else {
        vals[dual_diag_[me_ + r]] = 1.0;
        rhs[n_ + me_ + r] = 0.0;
      }
    }

    std::copy(vals.begin(), vals.end(), kkt_.valuePtr());
  };

  // Residual of the unshifted KKT system for iterative refinement.
  auto true_residual = [&](const Eigen::VectorXd& s) {
    Eigen::VectorXd r = rhs - kkt_ * s;
    for (int e = 0; e < me_; ++e) r[n_ + e] -= shift * s[n_ + e];
    for (int q = 0; q < mi_; ++q) {
      if (row_active_[q]) r[n_ + me_ + q] -= shift * s[n_ + me_ + q];
    }
    return r;
  };

  QpResult res;
  res.z.setZero(n_);
  res.eq_multipliers.setZero(me_);
  res.in_multipliers.setZero(mi_);
  res.reduced_costs.setZero(n_);

  // Equality-constrained solve on the current working set. Returns false
  // when neither factorization reaches a small unshifted residual, which
  // refinement always achieves on a consistent system.
  auto solve_eqp = [&]() -> bool {
    assemble();
    bool factored = false;
    ldlt_.factorize(kkt_);
    ++res.factorizations;
    const double rhs_scale = 1.0 + rhs.lpNorm<Eigen::Infinity>();
    double rel_res = std::numeric_limits<double>::infinity();
    if (ldlt_.info() == Eigen::Success) {
      sol = ldlt_.solve(rhs);
      for (int pass = 0; pass < options.refinement_passes; ++pass) {
        Eigen::VectorXd r = true_residual(sol);
        if (r.lpNorm<Eigen::Infinity>() <= 1e-11 * rhs_scale) break;
        sol += ldlt_.solve(r);
      }
      factored = true;
      rel_res = true_residual(sol).lpNorm<Eigen::Infinity>() / rhs_scale;
    }
    if (!factored || !(rel_res <= 1e-7)) {
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.compute(kkt_);
      if (lu.info() == Eigen::Success) {
        Eigen::VectorXd cand = lu.solve(rhs);
        for (int pass = 0; pass < options.refinement_passes; ++pass) {
          Eigen::VectorXd r = true_residual(cand);
          if (r.lpNorm<Eigen::Infinity>() <= 1e-11 * rhs_scale) break;
          cand += lu.solve(r);
        }
        const double cand_res =
            true_residual(cand).lpNorm<Eigen::Infinity>() / rhs_scale;
        if (!factored || cand_res < rel_res) {
          sol = cand;
          rel_res = cand_res;
          factored = true;
        }
      }
    }
    return factored && sol.allFinite() && rel_res <= kInconsistentTol;
  };

  auto masked_z = [&]() {
    Eigen::VectorXd z(n_);
    for (int i = 0; i < n_; ++i) {
      z[i] = var_state_[i] == 0 ? sol[i] : fixed_value(i);
    }
    return z;
  };

  // Recovery for a working set the factorizations cannot handle: drop the
  // active row with the largest dual magnitude.
  auto drop_worst_row = [&]() {
    int worst = -1;
    double mag = -1.0;
    for (int r = 0; r < mi_; ++r) {
      if (!row_active_[r]) continue;
      const double m = std::abs(sol[n_ + me_ + r]);
      if (m > mag) {
        mag = m;
        worst = r;
      }
    }
    if (worst >= 0) row_active_[worst] = 0;
    return worst >= 0;
  };

  if (all_rows_elastic) {
    // Feasible-start primal active set. Every inequality row carries its
    // own penalized slack, so a strictly feasible point is always one slack
    // lift away and the ratio-tested walk below only ever adds constraints
    // that hold with equality at the current point. Working sets stay
    // consistent by construction, which the flipping loop further down
    // cannot guarantee when rows cluster on few degrees of freedom.
    auto bound_gap = [&](int i) { return tol * 10.0 * (1.0 + std::abs(qp.lb[i])); };
    auto row_gap = [&](int r) { return tol * 10.0 * (1.0 + std::abs(qp.b_in[r])); };

    Eigen::VectorXd z_cur;
    bool fresh = false;
    bool have_point = false;

    // A warm working set is usually optimal or nearly so; when its
    // equality-constrained minimizer is feasible it is a valid start and
    // the walk below typically exits after the multiplier check.
    if (solve_eqp()) {
      z_cur = masked_z();
      bool ok = true;
      for (int i = 0; i < n_ && ok; ++i) {
        if (var_state_[i] != 0) continue;
        if (lower_finite(i) && z_cur[i] < qp.lb[i] - bound_gap(i)) ok = false;
        if (upper_finite(i) &&
            z_cur[i] > qp.ub[i] + tol * 10.0 * (1.0 + std::abs(qp.ub[i]))) {
          ok = false;
        }
      }
      if (ok) {
        const Eigen::VectorXd cin = qp.A_in * z_cur - qp.b_in;
        for (int r = 0; r < mi_ && ok; ++r) {
          if (cin[r] > row_gap(r)) ok = false;
        }
      }
      if (ok) {
        have_point = true;
        fresh = true;
      }
    }

    bool viable = true;
    if (!have_point) {
      // Phase 1. Minimize over the equalities alone, fixing any variable
      // the minimizer pushes past its bound; fixing variables never makes
      // the equality system inconsistent when, as in the collocation
      // transcriptions this branch exists for, the equality rows keep full
      // row rank in the never-bounded variables.
      std::fill(row_active_.begin(), row_active_.end(), 0);
      for (int pass = 0; pass < kPhase1Passes; ++pass) {
        if (!solve_eqp()) {
          viable = false;
          break;
        }
        z_cur = masked_z();
        int moved = 0;
        for (int i = 0; i < n_; ++i) {
          if (var_state_[i] != 0) continue;
          if (lower_finite(i) && z_cur[i] < qp.lb[i] - bound_gap(i)) {
            var_state_[i] = 1;
            ++moved;
          } else if (upper_finite(i) &&
                     z_cur[i] >
                         qp.ub[i] + tol * 10.0 * (1.0 + std::abs(qp.ub[i]))) {
            var_state_[i] = 2;
            ++moved;
          }
        }
        if (moved == 0) break;
      }
      if (viable) {
        for (int i = 0; i < n_; ++i) {
          if (var_state_[i] != 0) continue;
          if (lower_finite(i)) z_cur[i] = std::max(z_cur[i], qp.lb[i]);
          if (upper_finite(i)) z_cur[i] = std::min(z_cur[i], qp.ub[i]);
        }

        // Lift every violated row onto its slack. The lifted row holds
        // with equality afterwards and enters the working set together
        // with its freed column.
        const Eigen::VectorXd cin = qp.A_in * z_cur - qp.b_in;
        for (int r = 0; r < mi_; ++r) {
          if (cin[r] <= row_gap(r)) continue;
          const int s = elastic_var_of_row_[r];
          double coeff = 0.0;
          double rest = 0.0;
          for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator
                   it(qp.A_in, r);
               it; ++it) {
            if (static_cast<int>(it.col()) == s) {
              coeff = it.value();
            } else {
              rest += it.value() * z_cur[it.col()];
            }
          }
          var_state_[s] = 0;
          z_cur[s] = (qp.b_in[r] - rest) / coeff;
          row_active_[r] = 1;
        }
        have_point = true;
        fresh = false;
      }
    }

    for (int round = 1; viable && round <= options.max_rounds; ++round) {
      res.rounds = round;
      if (!fresh && !solve_eqp()) {
        if (!drop_worst_row()) {
          res.status = QpStatus::Factorization;
          return res;
        }
        continue;
      }
      fresh = false;

      const Eigen::VectorXd z_star = masked_z();
      const Eigen::VectorXd p = z_star - z_cur;

      // Ratio test: longest step toward the working-set minimizer that
      // keeps every inactive row and free bound satisfied.
      double alpha = 1.0;
      int blk_kind = -1;
      int blk_idx = -1;
      if (p.lpNorm<Eigen::Infinity>() > 0.0) {
        const Eigen::VectorXd ap = qp.A_in * p;
        const Eigen::VectorXd az = qp.A_in * z_cur;
        for (int r = 0; r < mi_; ++r) {
          if (row_active_[r] || ap[r] <= kRatioDen) continue;
          const double room = std::max(0.0, qp.b_in[r] - az[r]);
          const double ratio = room / ap[r];
          if (ratio < alpha) {
            alpha = ratio;
            blk_kind = 0;
            blk_idx = r;
          }
        }
        for (int i = 0; i < n_; ++i) {
          if (var_state_[i] != 0) continue;
          if (p[i] > kRatioDen && upper_finite(i)) {
            const double room = std::max(0.0, qp.ub[i] - z_cur[i]);
            const double ratio = room / p[i];
            if (ratio < alpha) {
              alpha = ratio;
              blk_kind = 2;
              blk_idx = i;
            }
          } else if (p[i] < -kRatioDen && lower_finite(i)) {
            const double room = std::max(0.0, z_cur[i] - qp.lb[i]);
            const double ratio = room / (-p[i]);
            if (ratio < alpha) {
              alpha = ratio;
              blk_kind = 1;
              blk_idx = i;
            }
          }
        }
      }

      if (blk_idx >= 0) {
        if (std::getenv("DOCK_QP_TRACE")) {
          fprintf(stderr, "    round %3d add kind=%d idx=%d alpha=%.3g\n",
                  round, blk_kind, blk_idx, alpha);
        }
        z_cur += alpha * p;
        if (blk_kind == 0) {
          row_active_[blk_idx] = 1;
        } else if (blk_kind == 1) {
          var_state_[blk_idx] = 1;
          z_cur[blk_idx] = qp.lb[blk_idx];
        } else {
          var_state_[blk_idx] = 2;
          z_cur[blk_idx] = qp.ub[blk_idx];
        }
        continue;
      }

      // Unblocked step reaches the working-set minimizer; check duals.
      z_cur = z_star;
      const Eigen::VectorXd lambda = sol.segment(n_, me_);
      Eigen::VectorXd mu(mi_);
      for (int r = 0; r < mi_; ++r) {
        mu[r] = row_active_[r] ? sol[n_ + me_ + r] : 0.0;
      }
      Eigen::VectorXd w = qp.H * z_star + qp.g;
      if (me_ > 0) w += qp.A_eq.transpose() * lambda;
      w += qp.A_in.transpose() * mu;

      double worst_score = tol;
      int drop_kind = -1;
      int drop_idx = -1;
      for (int r = 0; r < mi_; ++r) {
        if (row_active_[r] && -mu[r] > worst_score) {
          worst_score = -mu[r];
          drop_kind = 0;
          drop_idx = r;
        }
      }
      for (int i = 0; i < n_; ++i) {
        if (var_state_[i] == 0 || pinned(i)) continue;
        const double s = var_state_[i] == 1 ? -w[i] : w[i];
        if (s > worst_score) {
          worst_score = s;
          drop_kind = 1;
          drop_idx = i;
        }
      }

      res.z = z_star;
      res.eq_multipliers = lambda;
      res.in_multipliers = mu;
      res.reduced_costs = w;
      if (drop_idx < 0) {
        res.status = QpStatus::Optimal;
        return res;
      }
      if (std::getenv("DOCK_QP_TRACE")) {
        fprintf(stderr, "    round %3d drop kind=%d idx=%d score=%.3g\n",
                round, drop_kind, drop_idx, worst_score);
      }
      if (drop_kind == 0) {
        row_active_[drop_idx] = 0;
      } else {
        var_state_[drop_idx] = 0;
      }
    }

    if (viable) {
      res.status = QpStatus::IterationLimit;
      res.z = z_cur;
      return res;
    }
    // The equality system alone defeated the factorization, so this is not
    // the structured problem the walk assumes. Restart the flipping loop
    // from a fresh seed.
    seed_working_set();
  }

  // Generic problems: dual-signal flipping. Solve on the working set, flip
  // every constraint whose primal or dual signal disagrees with it, and
  // fall back to one flip per round once a working set repeats.
  std::set<size_t> seen_states;
  bool single_change = false;

  auto state_hash = [&]() {
    std::string sig(var_state_.begin(), var_state_.end());
    sig.append(row_active_.begin(), row_active_.end());
    return std::hash<std::string>{}(sig);
  };

  struct Change {
    double score;
    int kind;
    int idx;
  };
  auto change_order = [](const Change& a, const Change& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.idx < b.idx;
  };

  for (int round = 1; round <= options.max_rounds; ++round) {
    res.rounds = round;
    const size_t h = state_hash();
    if (seen_states.count(h)) single_change = true;
    seen_states.insert(h);

    if (!solve_eqp()) {
      // Refinement cannot shrink the residual of an unsolvable system, so
      // a persistent residual means the working rows over-determine the
      // step; signals computed from such a solve carry no information.
      if (!drop_worst_row()) {
        res.status = QpStatus::Factorization;
        return res;
      }
      continue;
    }

    const Eigen::VectorXd z = masked_z();
    const Eigen::VectorXd lambda = sol.segment(n_, me_);
    Eigen::VectorXd mu(mi_);
    for (int r = 0; r < mi_; ++r) {
      mu[r] = row_active_[r] ? sol[n_ + me_ + r] : 0.0;
    }

    Eigen::VectorXd w = qp.H * z + qp.g;
    if (me_ > 0) w += qp.A_eq.transpose() * lambda;
    if (mi_ > 0) w += qp.A_in.transpose() * mu;

    const Eigen::VectorXd cin =
        mi_ > 0 ? Eigen::VectorXd(qp.A_in * z - qp.b_in) : Eigen::VectorXd();

    // kind 0: activate row, 1: deactivate row, 2: fix var low, 3: fix var
    // high, 4: release var.
    std::vector<Change> changes;
    for (int r = 0; r < mi_; ++r) {
      if (!row_active_[r] && cin[r] > tol) changes.push_back({cin[r], 0, r});
      if (row_active_[r] && mu[r] < -tol) changes.push_back({-mu[r], 1, r});
    }
    for (int i = 0; i < n_; ++i) {
      if (var_state_[i] == 0) {
        if (lower_finite(i) && z[i] < qp.lb[i] - tol) {
          changes.push_back({qp.lb[i] - z[i], 2, i});
        } else if (upper_finite(i) && z[i] > qp.ub[i] + tol) {
          changes.push_back({z[i] - qp.ub[i], 3, i});
        }
      } else if (!pinned(i)) {
        if (var_state_[i] == 1 && w[i] < -tol) {
          changes.push_back({-w[i], 4, i});
        } else if (var_state_[i] == 2 && w[i] > tol) {
          changes.push_back({w[i], 4, i});
        }
      }
    }

    if (changes.empty()) {
      res.status = QpStatus::Optimal;
      res.z = z;
      res.eq_multipliers = lambda;
      res.in_multipliers = mu;
      res.reduced_costs = w;
      return res;
    }

    std::sort(changes.begin(), changes.end(), change_order);
    const size_t apply = single_change ? 1 : changes.size();
    for (size_t k = 0; k < apply; ++k) {
      const Change& c = changes[k];
      switch (c.kind) {
        case 0:
          row_active_[c.idx] = 1;
          break;
        case 1:
          row_active_[c.idx] = 0;
          break;
        case 2:
          var_state_[c.idx] = 1;
          break;
        case 3:
          var_state_[c.idx] = 2;
          break;
        case 4:
          var_state_[c.idx] = 0;
          break;
      }
    }

    res.z = z;
    res.eq_multipliers = lambda;
    res.in_multipliers = mu;
    res.reduced_costs = w;
  }

  res.status = QpStatus::IterationLimit;
  return res;
}

}  // namespace dock::nlp
