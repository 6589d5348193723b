#include "dock/ocp_planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dock/vessel_model.hpp"

namespace dock::plan {
namespace {

constexpr double kSampleDt = 0.1;

using model::Vector6d;

double sq(double v) { return v * v; }

// Lagrange basis over the interval-local nodes {0, tau_1, tau_2, tau_3},
// where tau_j are the degree-3 Gauss points on (0, 1). Coefficients are
// evaluated in extended precision once and cached.
struct CollocationBasis {
  long double nodes[4];
  double weights[3];   // quadrature weights at the interior nodes
  double deriv[4][3];  // d l_i / d tau at tau_j
  double end[4];       // l_i(1)

  CollocationBasis() {
    const long double r = sqrtl(15.0L) / 10.0L;
    nodes[0] = 0.0L;
    nodes[1] = 0.5L - r;
    nodes[2] = 0.5L;
    nodes[3] = 0.5L + r;
    weights[0] = static_cast<double>(5.0L / 18.0L);
    weights[1] = static_cast<double>(4.0L / 9.0L);
    weights[2] = static_cast<double>(5.0L / 18.0L);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 3; ++j)
        deriv[i][j] = static_cast<double>(derivative(i, nodes[j + 1]));
      end[i] = static_cast<double>(value(i, 1.0L));
    }
  }

  long double value(int i, long double tau) const {
    long double out = 1.0L;
    for (int m = 0; m < 4; ++m) {
      if (m == i) continue;
      out *= (tau - nodes[m]) / (nodes[i] - nodes[m]);
    }
    return out;
  }

  long double derivative(int i, long double tau) const {
    long double den = 1.0L;
    for (int m = 0; m < 4; ++m)
      if (m != i) den *= nodes[i] - nodes[m];
    long double sum = 0.0L;
    for (int s = 0; s < 4; ++s) {
      if (s == i) continue;
      long double prod = 1.0L;
      for (int m = 0; m < 4; ++m) {
        if (m == i || m == s) continue;
        prod *= tau - nodes[m];
      }
      sum += prod;
    }
    return sum / den;
  }

  void values_at(double tau, double out[4]) const {
    for (int i = 0; i < 4; ++i)
      out[i] = static_cast<double>(value(i, static_cast<long double>(tau)));
  }
};

const CollocationBasis& basis() {
  static const CollocationBasis b;
  return b;
}

}  // namespace

void DockingSpec::validate() const {
  if (!(horizon > 0.0)) throw std::invalid_argument("docking spec: horizon must be positive");
  if (intervals < 1) throw std::invalid_argument("docking spec: intervals must be at least 1");
  if (!(surge_speed_max > 0.0) || !(sway_speed_max > 0.0) || !(yaw_rate_max > 0.0))
    throw std::invalid_argument("docking spec: speed limits must be positive");
  if (!(f_max > 0.0)) throw std::invalid_argument("docking spec: f_max must be positive");
  if (!(slack_weight > 0.0)) throw std::invalid_argument("docking spec: slack_weight must be positive");
  if (!(huber_delta > 0.0)) throw std::invalid_argument("docking spec: huber_delta must be positive");
  if (heading_weight < 0.0 || sway_weight < 0.0 || yaw_rate_weight < 0.0)
    throw std::invalid_argument("docking spec: cost weights must be nonnegative");
}

double pseudo_huber(const Eigen::Vector2d& a, double delta) {
  const double d2 = delta * delta;
  return d2 * (std::sqrt(1.0 + a.squaredNorm() / d2) - 1.0);
}

double cost_to_go(const model::VesselState& state,
                  const model::ThrusterForces& input, const DockingSpec& spec,
                  const model::ModelParams& params) {
  const Eigen::Vector2d a = state.pose.position() - spec.docking_pose.position();
  double cost = pseudo_huber(a, spec.huber_delta);
  const double e = model::wrap_angle(state.pose.heading - spec.docking_pose.heading);
  cost += spec.heading_weight * (1.0 - std::cos(e));
  cost += spec.sway_weight * sq(state.velocity.sway);
  cost += spec.yaw_rate_weight * sq(state.velocity.yaw_rate);
  cost += input.vec().squaredNorm() / sq(params.m11);
  return cost;
}

double SlackSummary::max() const {
  return std::max(collision, std::max(velocity, thrust));
}

TrajectorySample PlannedTrajectory::sample_at(double t) const {
  if (samples.empty()) return {};
  if (samples.size() == 1) {
    TrajectorySample s = samples.front();
    s.t = t;
    return s;
  }
  const double tc = std::clamp(t, samples.front().t, samples.back().t);
  const double dt = samples[1].t - samples[0].t;
  const double rel = (tc - samples.front().t) / dt;
  const int idx = std::clamp(static_cast<int>(std::floor(rel)), 0,
                             static_cast<int>(samples.size()) - 2);
  const double alpha = std::clamp(rel - idx, 0.0, 1.0);
  const TrajectorySample& lo = samples[idx];
  const TrajectorySample& hi = samples[idx + 1];
  TrajectorySample out;
  out.t = tc;
  out.pose.north = lo.pose.north + alpha * (hi.pose.north - lo.pose.north);
  out.pose.east = lo.pose.east + alpha * (hi.pose.east - lo.pose.east);
  out.pose.heading =
      lo.pose.heading + alpha * model::wrap_angle(hi.pose.heading - lo.pose.heading);
  out.velocity.surge = lo.velocity.surge + alpha * (hi.velocity.surge - lo.velocity.surge);
  out.velocity.sway = lo.velocity.sway + alpha * (hi.velocity.sway - lo.velocity.sway);
  out.velocity.yaw_rate =
      lo.velocity.yaw_rate + alpha * (hi.velocity.yaw_rate - lo.velocity.yaw_rate);
  out.acceleration = lo.acceleration + alpha * (hi.acceleration - lo.acceleration);
  out.input = lo.input;
  return out;
}

struct OcpTranscription::Impl {
  model::VesselState measured;
  geom::ConvexRegion region;
  DockingSpec spec;
  model::ModelParams params;
  geom::Footprint footprint;
  int N{0};
  double h{0.0};
  int R{0};       // region rows
  int V{0};       // footprint vertices
  int S{0};       // soft rows (and slack variables) per boundary node
  int stride{0};  // decision variables per interval block
  int nvar{0};
  int neq{0};
  int nin{0};
  nlp::SparsityPattern eq_pattern;
  nlp::SparsityPattern in_pattern;
  nlp::SparsityPattern hess_pattern;
  std::vector<int> slack_of_row;  // slack column for each inequality row

  static constexpr double kScale = OcpTranscription::kInputScale;

  int state_index(int node) const { return node * stride; }
  int node_slack_index(int node) const { return node * stride + 6; }
  int collocation_index(int k, int j) const { return k * stride + 6 + S + 6 * j; }
  int input_index(int k) const { return k * stride + 6 + S + 18; }
  int thrust_slack_index(int k) const { return k * stride + 6 + S + 22; }

  int defect_row(int k, int j) const { return 6 + 24 * k + 6 * j; }
  int continuity_row(int k) const { return 6 + 24 * k + 18; }
  int node_row_base(int n) const { return n * S; }
  int thrust_row_base(int k) const { return (N + 1) * S + 2 * k; }

  model::ThrusterForces forces_at(const Eigen::VectorXd& x, int k) const {
    return model::ThrusterForces::from_vec(kScale * x.segment<4>(input_index(k)));
  }

  void eq_residual(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    const CollocationBasis& bs = basis();
    r.resize(neq);
    r.head<6>() = x.segment<6>(state_index(0)) - measured.vec();
    for (int k = 0; k < N; ++k) {
      Vector6d z[4];
      z[0] = x.segment<6>(state_index(k));
      for (int j = 0; j < 3; ++j) z[j + 1] = x.segment<6>(collocation_index(k, j));
      const model::ThrusterForces force = forces_at(x, k);
      for (int j = 0; j < 3; ++j) {
        Vector6d acc = Vector6d::Zero();
        for (int i = 0; i < 4; ++i) acc += bs.deriv[i][j] * z[i];
        const auto state = model::VesselState::from_vec(z[j + 1]);
        acc -= h * model::planning_dynamics(state, force, params);
        r.segment<6>(defect_row(k, j)) = acc;
      }
      Vector6d end = Vector6d::Zero();
      for (int i = 0; i < 4; ++i) end += bs.end[i] * z[i];
      r.segment<6>(continuity_row(k)) = end - x.segment<6>(state_index(k + 1));
    }
  }

  template <class F>
  void eq_jacobian_walk(const Eigen::VectorXd& x, F&& emit) const {
    const CollocationBasis& bs = basis();
    for (int i = 0; i < 6; ++i) emit(i, state_index(0) + i, 1.0);
    for (int k = 0; k < N; ++k) {
      const int zcol[4] = {state_index(k), collocation_index(k, 0),
                           collocation_index(k, 1), collocation_index(k, 2)};
      const int ucol = input_index(k);
      const model::ThrusterForces force = forces_at(x, k);
      for (int j = 0; j < 3; ++j) {
        const int row = defect_row(k, j);
        const auto state = model::VesselState::from_vec(x.segment<6>(zcol[j + 1]));
        const auto jac = model::planning_dynamics_jacobians(state, force, params);
        for (int i = 0; i < 4; ++i) {
          const double d = bs.deriv[i][j];
          if (i == j + 1) {
            const Eigen::Matrix<double, 6, 6> local =
                d * Eigen::Matrix<double, 6, 6>::Identity() - h * jac.x;
            for (int m = 0; m < 6; ++m)
              for (int c = 0; c < 6; ++c) emit(row + m, zcol[i] + c, local(m, c));
          } else {
            for (int m = 0; m < 6; ++m) emit(row + m, zcol[i] + m, d);
          }
        }
        const Eigen::Matrix<double, 3, 4> ju = jac.u.bottomRows<3>();
        for (int m = 0; m < 3; ++m)
          for (int c = 0; c < 4; ++c)
            emit(row + 3 + m, ucol + c, -h * kScale * ju(m, c));
      }
      const int row = continuity_row(k);
      for (int i = 0; i < 4; ++i)
        for (int m = 0; m < 6; ++m) emit(row + m, zcol[i] + m, bs.end[i]);
      for (int m = 0; m < 6; ++m) emit(row + m, state_index(k + 1) + m, -1.0);
    }
  }

  void in_residual(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    r.resize(nin);
    for (int n = 0; n <= N; ++n) {
      const int sx = state_index(n);
      const int sl = node_slack_index(n);
      const Eigen::Vector2d pos(x[sx], x[sx + 1]);
      const Eigen::Matrix2d rot = model::rotation_matrix2(x[sx + 2]);
      int row = node_row_base(n);
      for (int v = 0; v < V; ++v) {
        const Eigen::Vector2d w = rot * footprint.vertices[v] + pos;
        for (int q = 0; q < R; ++q) {
          r[row] = region.A.row(q).dot(w) - region.b[q] - x[sl + v * R + q];
          ++row;
        }
      }
      const double limit[3] = {spec.surge_speed_max, spec.sway_speed_max,
                               spec.yaw_rate_max};
      for (int m = 0; m < 6; ++m) {
        const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
        r[row] = sgn * x[sx + 3 + m / 2] - limit[m / 2] - x[sl + V * R + m];
        ++row;
      }
    }
    for (int k = 0; k < N; ++k) {
      const int uc = input_index(k);
      const int ts = thrust_slack_index(k);
      int row = thrust_row_base(k);
      for (int i = 0; i < 2; ++i) {
        const double fx = kScale * x[uc + 2 * i];
        const double fy = kScale * x[uc + 2 * i + 1];
        r[row] = (fx * fx + fy * fy - sq(spec.f_max)) / (2.0 * spec.f_max) - x[ts + i];
        ++row;
      }
    }
  }

  template <class F>
  void in_jacobian_walk(const Eigen::VectorXd& x, F&& emit) const {
    for (int n = 0; n <= N; ++n) {
      const int sx = state_index(n);
      const int sl = node_slack_index(n);
      const double psi = x[sx + 2];
      Eigen::Matrix2d drot;
      drot << -std::sin(psi), -std::cos(psi), std::cos(psi), -std::sin(psi);
      int row = node_row_base(n);
      for (int v = 0; v < V; ++v) {
        const Eigen::Vector2d dv = drot * footprint.vertices[v];
        for (int q = 0; q < R; ++q) {
          emit(row, sx + 0, region.A(q, 0));
          emit(row, sx + 1, region.A(q, 1));
          emit(row, sx + 2, region.A.row(q).dot(dv));
          emit(row, sl + v * R + q, -1.0);
          ++row;
        }
      }
      for (int m = 0; m < 6; ++m) {
        emit(row, sx + 3 + m / 2, (m % 2 == 0) ? 1.0 : -1.0);
        emit(row, sl + V * R + m, -1.0);
        ++row;
      }
    }
    for (int k = 0; k < N; ++k) {
      const int uc = input_index(k);
      const int ts = thrust_slack_index(k);
      int row = thrust_row_base(k);
      for (int i = 0; i < 2; ++i) {
        emit(row, uc + 2 * i, kScale * kScale * x[uc + 2 * i] / spec.f_max);
        emit(row, uc + 2 * i + 1, kScale * kScale * x[uc + 2 * i + 1] / spec.f_max);
        emit(row, ts + i, -1.0);
        ++row;
      }
    }
  }

  double objective_value(const Eigen::VectorXd& x) const {
    const CollocationBasis& bs = basis();
    double cost = 0.0;
    for (int k = 0; k < N; ++k) {
      const model::ThrusterForces force = forces_at(x, k);
      for (int j = 0; j < 3; ++j) {
        const auto state =
            model::VesselState::from_vec(x.segment<6>(collocation_index(k, j)));
        cost += h * bs.weights[j] * cost_to_go(state, force, spec, params);
      }
    }
    for (int col : slack_of_row) cost += spec.slack_weight * x[col];
    return cost;
  }

  void gradient(const Eigen::VectorXd& x, Eigen::VectorXd& g) const {
    const CollocationBasis& bs = basis();
    g.setZero(nvar);
    const double m11sq = sq(params.m11);
    const double d2 = sq(spec.huber_delta);
    for (int k = 0; k < N; ++k) {
      const int uc = input_index(k);
      for (int j = 0; j < 3; ++j) {
        const double c = h * bs.weights[j];
        const int xc = collocation_index(k, j);
        const Eigen::Vector2d a(x[xc] - spec.docking_pose.north,
                                x[xc + 1] - spec.docking_pose.east);
        const double s = std::sqrt(1.0 + a.squaredNorm() / d2);
        g[xc + 0] += c * a[0] / s;
        g[xc + 1] += c * a[1] / s;
        const double e = x[xc + 2] - spec.docking_pose.heading;
        g[xc + 2] += c * spec.heading_weight * std::sin(e);
        g[xc + 4] += c * 2.0 * spec.sway_weight * x[xc + 4];
        g[xc + 5] += c * 2.0 * spec.yaw_rate_weight * x[xc + 5];
        for (int i = 0; i < 4; ++i)
          g[uc + i] += c * 2.0 * sq(kScale) * x[uc + i] / m11sq;
      }
    }
    for (int col : slack_of_row) g[col] += spec.slack_weight;
  }

  // Hessian of the Lagrangian, lower triangle. The objective part is
  // Gauss-Newton: the position block is the exact pseudo-Huber Hessian
  // (positive definite) and the heading term is replaced by
  // w (1 + cos e) / 2 which matches at the target and stays nonnegative.
  // Null multiplier pointers emit the same structure with the constraint
  // curvature weighted to zero.
  template <class F>
  void hessian_walk(const Eigen::VectorXd& x, const Eigen::VectorXd* lam,
                    const Eigen::VectorXd* mu, F&& emit) const {
    const CollocationBasis& bs = basis();
    const double m11sq = sq(params.m11);
    const double d2 = sq(spec.huber_delta);
    const Eigen::Vector3d minv{1.0 / (params.inertia_scaling[0] * params.m11),
                               1.0 / (params.inertia_scaling[1] * params.m22),
                               1.0 / (params.inertia_scaling[2] * params.m33)};
    const auto sgn = [](double a) {
      return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
    };
    for (int k = 0; k < N; ++k) {
      const int uc = input_index(k);
      for (int j = 0; j < 3; ++j) {
        const double c = h * bs.weights[j];
        const int xc = collocation_index(k, j);
        const Eigen::Vector2d a(x[xc] - spec.docking_pose.north,
                                x[xc + 1] - spec.docking_pose.east);
        const double s = std::sqrt(1.0 + a.squaredNorm() / d2);
        const double s3 = s * s * s;
        emit(xc + 0, xc + 0, c * (1.0 / s - a[0] * a[0] / (d2 * s3)));
        emit(xc + 1, xc + 0, c * (-a[0] * a[1] / (d2 * s3)));
        emit(xc + 1, xc + 1, c * (1.0 / s - a[1] * a[1] / (d2 * s3)));
        const double e = x[xc + 2] - spec.docking_pose.heading;
        emit(xc + 2, xc + 2, c * spec.heading_weight * 0.5 * (1.0 + std::cos(e)));
        emit(xc + 4, xc + 4, c * 2.0 * spec.sway_weight);
        emit(xc + 5, xc + 5, c * 2.0 * spec.yaw_rate_weight);
        for (int i = 0; i < 4; ++i)
          emit(uc + i, uc + i, c * 2.0 * sq(kScale) / m11sq);

        // Curvature of the collocation defects: the rows enter the
        // Lagrangian as lam' (D z - h f), so each stage adds -h lam_m
        // times the second derivatives of the dynamics.
        const int row = defect_row(k, j);
        const double l0 = lam ? (*lam)[row + 0] : 0.0;
        const double l1 = lam ? (*lam)[row + 1] : 0.0;
        const double l3 = lam ? (*lam)[row + 3] : 0.0;
        const double l4 = lam ? (*lam)[row + 4] : 0.0;
        const double l5 = lam ? (*lam)[row + 5] : 0.0;
        const double sn = std::sin(x[xc + 2]);
        const double cs = std::cos(x[xc + 2]);
        const double u = x[xc + 3];
        const double v = x[xc + 4];
        const double r = x[xc + 5];
        emit(xc + 2, xc + 2,
             h * (l0 * (cs * u - sn * v) + l1 * (sn * u + cs * v)));
        emit(xc + 3, xc + 2, h * (l0 * sn - l1 * cs));
        emit(xc + 4, xc + 2, h * (l0 * cs + l1 * sn));
        const double ddu = -2.0 * params.X_uu * sgn(u) - 6.0 * params.X_uuu * u;
        const double ddv = -2.0 * params.Y_vv * sgn(v) - 6.0 * params.Y_vvv * v;
        const double ddr = -2.0 * params.N_rr * sgn(r);
        emit(xc + 3, xc + 3, h * l3 * minv[0] * ddu);
        emit(xc + 4, xc + 4, h * l4 * minv[1] * ddv);
        emit(xc + 5, xc + 5, h * l5 * minv[2] * ddr);
        emit(xc + 5, xc + 4, -h * l3 * minv[0] * params.m22);
        emit(xc + 5, xc + 3, h * l4 * minv[1] * params.m11);
        emit(xc + 4, xc + 3, h * l5 * minv[2] * (params.m22 - params.m11));
      }
    }
    // Hull corner rows curve only in the heading; thrust magnitude rows
    // have a constant diagonal in the force variables. Negative corner
    // curvature is dropped: the node states carry no objective curvature
    // that could absorb it, and an indefinite model sends the subproblem
    // chasing saddle points.
    for (int n = 0; n <= N; ++n) {
      const int sx = state_index(n);
      double hpsi = 0.0;
      if (mu) {
        const Eigen::Matrix2d rot = model::rotation_matrix2(x[sx + 2]);
        int row = node_row_base(n);
        for (int v = 0; v < V; ++v) {
          const Eigen::Vector2d w = rot * footprint.vertices[v];
          for (int q = 0; q < R; ++q) {
            hpsi += std::max(0.0, -(*mu)[row] * region.A.row(q).dot(w));
            ++row;
          }
        }
      }
      emit(sx + 2, sx + 2, hpsi);
    }
    for (int k = 0; k < N; ++k) {
      const int uc = input_index(k);
      int row = thrust_row_base(k);
      for (int i = 0; i < 2; ++i) {
        const double w = mu ? (*mu)[row] * sq(kScale) / spec.f_max : 0.0;
        emit(uc + 2 * i, uc + 2 * i, w);
        emit(uc + 2 * i + 1, uc + 2 * i + 1, w);
        ++row;
      }
    }
  }

  void build_patterns() {
    const Eigen::VectorXd xref = Eigen::VectorXd::Zero(nvar);
    eq_pattern.rows = neq;
    eq_pattern.cols = nvar;
    eq_jacobian_walk(xref, [this](int r, int c, double) {
      eq_pattern.entries.emplace_back(r, c);
    });
    in_pattern.rows = nin;
    in_pattern.cols = nvar;
    in_jacobian_walk(xref, [this](int r, int c, double) {
      in_pattern.entries.emplace_back(r, c);
    });
    hess_pattern.rows = nvar;
    hess_pattern.cols = nvar;
    hessian_walk(xref, nullptr, nullptr, [this](int r, int c, double) {
      hess_pattern.entries.emplace_back(r, c);
    });
    slack_of_row.assign(nin, -1);
    for (int n = 0; n <= N; ++n) {
      const int sl = node_slack_index(n);
      for (int m = 0; m < S; ++m) slack_of_row[node_row_base(n) + m] = sl + m;
    }
    for (int k = 0; k < N; ++k)
      for (int i = 0; i < 2; ++i)
        slack_of_row[thrust_row_base(k) + i] = thrust_slack_index(k) + i;
  }

  // Sets every slack to the violation of its row so the seed starts
  // feasible in the soft constraints.
  void seed_slacks(Eigen::VectorXd& x) const {
    for (int col : slack_of_row) x[col] = 0.0;
    Eigen::VectorXd r;
    in_residual(x, r);
    for (int row = 0; row < nin; ++row)
      x[slack_of_row[row]] = std::max(0.0, r[row]);
  }

  Eigen::VectorXd cold_start_impl() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(nvar);
    const Eigen::Vector2d p0 = measured.pose.position();
    const Eigen::Vector2d dp = spec.docking_pose.position() - p0;
    const double dist = dp.norm();
    const double psi0 = measured.pose.heading;
    const double dpsi = model::wrap_angle(spec.docking_pose.heading - psi0);
    double cruise = 0.8 * std::min(spec.surge_speed_max, spec.sway_speed_max);
    const double accel = 0.05;
    double t_ramp = 0.0;
    double t_pos = 0.0;
    if (dist > 1e-9) {
      if (dist >= cruise * cruise / accel) {
        t_ramp = cruise / accel;
        t_pos = 2.0 * t_ramp + (dist - cruise * cruise / accel) / cruise;
      } else {
        cruise = std::sqrt(accel * dist);
        t_ramp = cruise / accel;
        t_pos = 2.0 * t_ramp;
      }
    }
    const double t_head = std::abs(dpsi) / std::max(0.5 * spec.yaw_rate_max, 1e-6);
    const double total = std::max(t_pos, t_head);
    const double course = dist > 1e-9 ? std::atan2(dp[1], dp[0]) : psi0;

    const auto profile = [&](double t) {
      double s = dist;
      double sdot = 0.0;
      if (dist > 1e-9 && t < t_pos) {
        if (t < t_ramp) {
          s = 0.5 * accel * t * t;
          sdot = accel * t;
        } else if (t < t_pos - t_ramp) {
          s = 0.5 * accel * t_ramp * t_ramp + cruise * (t - t_ramp);
          sdot = cruise;
        } else {
          const double tr = t_pos - t;
          s = dist - 0.5 * accel * tr * tr;
          sdot = accel * tr;
        }
      } else if (dist <= 1e-9) {
        s = 0.0;
      }
      const double frac = total > 1e-9 ? std::clamp(t / total, 0.0, 1.0) : 1.0;
      const double psi = psi0 + dpsi * frac;
      Vector6d out;
      out[0] = p0[0] + (dist > 1e-9 ? dp[0] / dist * s : 0.0);
      out[1] = p0[1] + (dist > 1e-9 ? dp[1] / dist * s : 0.0);
      out[2] = psi;
      out[3] = sdot * std::cos(course - psi);
      out[4] = sdot * std::sin(course - psi);
      out[5] = (total > 1e-9 && t < total) ? dpsi / total : 0.0;
      return out;
    };

    for (int k = 0; k <= N; ++k) x.segment<6>(state_index(k)) = profile(k * h);
    for (int k = 0; k < N; ++k)
      for (int j = 0; j < 3; ++j)
        x.segment<6>(collocation_index(k, j)) =
            profile((k + static_cast<double>(basis().nodes[j + 1])) * h);
    x.segment<6>(state_index(0)) = measured.vec();
    seed_slacks(x);
    return x;
  }

  Eigen::VectorXd warm_start_impl(const PlannedTrajectory& prev, double t0) const {
    if (prev.samples.empty()) return cold_start_impl();
    const double tail = prev.samples.back().pose.heading;
    const double pad_heading =
        tail + model::wrap_angle(spec.docking_pose.heading - tail);
    const auto state_at = [&](double t) {
      Vector6d out;
      if (t <= prev.end_time()) {
        const TrajectorySample s = prev.sample_at(t);
        out << s.pose.north, s.pose.east, s.pose.heading, s.velocity.surge,
            s.velocity.sway, s.velocity.yaw_rate;
      } else {
        out << spec.docking_pose.north, spec.docking_pose.east, pad_heading,
            0.0, 0.0, 0.0;
      }
      return out;
    };
    Eigen::VectorXd x = Eigen::VectorXd::Zero(nvar);
    for (int k = 0; k <= N; ++k)
      x.segment<6>(state_index(k)) = state_at(t0 + k * h);
    for (int k = 0; k < N; ++k) {
      for (int j = 0; j < 3; ++j)
        x.segment<6>(collocation_index(k, j)) =
            state_at(t0 + (k + static_cast<double>(basis().nodes[j + 1])) * h);
      const double tm = t0 + (k + 0.5) * h;
      if (tm <= prev.end_time())
        x.segment<4>(input_index(k)) = prev.sample_at(tm).input.vec() / kScale;
    }
    x.segment<6>(state_index(0)) = measured.vec();
    seed_slacks(x);
    return x;
  }

  PlannedTrajectory extract_impl(const Eigen::VectorXd& x, double t0) const {
    PlannedTrajectory out;
    out.t0 = t0;
    out.horizon = spec.horizon;
    const int steps = static_cast<int>(std::llround(spec.horizon / kSampleDt));
    out.samples.reserve(steps + 1);
    for (int i = 0; i <= steps; ++i) {
      const double trel = std::min(i * kSampleDt, spec.horizon);
      const int k = std::min(static_cast<int>(trel / h), N - 1);
      const double tau = std::clamp((trel - k * h) / h, 0.0, 1.0);
      double lv[4];
      basis().values_at(tau, lv);
      Vector6d xs = lv[0] * x.segment<6>(state_index(k));
      for (int j = 0; j < 3; ++j)
        xs += lv[j + 1] * x.segment<6>(collocation_index(k, j));
      TrajectorySample s;
      s.t = t0 + trel;
      s.pose = model::Pose::from_vec(xs.head<3>());
      s.velocity = model::BodyVelocity::from_vec(xs.tail<3>());
      s.input = forces_at(x, k);
      s.acceleration =
          model::planning_dynamics(model::VesselState::from_vec(xs), s.input, params)
              .tail<3>();
      out.samples.push_back(s);
    }
    return out;
  }

  SlackSummary summary_impl(const Eigen::VectorXd& x) const {
    SlackSummary out;
    for (int n = 0; n <= N; ++n) {
      const int sl = node_slack_index(n);
      for (int m = 0; m < V * R; ++m)
        out.collision = std::max(out.collision, x[sl + m]);
      for (int m = 0; m < 6; ++m)
        out.velocity = std::max(out.velocity, x[sl + V * R + m]);
    }
    for (int k = 0; k < N; ++k)
      for (int i = 0; i < 2; ++i)
        out.thrust = std::max(out.thrust, x[thrust_slack_index(k) + i]);
    return out;
  }
};

OcpTranscription::OcpTranscription(const model::VesselState& measured,
                                   const geom::ConvexRegion& region,
                                   const DockingSpec& spec,
                                   const model::ModelParams& params)
    : impl_(std::make_unique<Impl>()) {
  spec.validate();
  params.validate();
  impl_->measured = measured;
  impl_->region = region;
  impl_->spec = spec;
  impl_->params = params;
  impl_->footprint =
      geom::Footprint::rectangle(params.footprint_length, params.footprint_width);
  impl_->N = spec.intervals;
  impl_->h = spec.horizon / spec.intervals;
  impl_->R = region.rows();
  impl_->V = static_cast<int>(impl_->footprint.vertices.size());
  impl_->S = impl_->V * impl_->R + 6;
  impl_->stride = 30 + impl_->S;
  impl_->nvar = impl_->N * impl_->stride + 6 + impl_->S;
  impl_->neq = 6 + 24 * impl_->N;
  impl_->nin = (impl_->N + 1) * impl_->S + 2 * impl_->N;
  impl_->build_patterns();
}

OcpTranscription::~OcpTranscription() = default;

int OcpTranscription::num_variables() const { return impl_->nvar; }
int OcpTranscription::num_equalities() const { return impl_->neq; }
int OcpTranscription::num_inequalities() const { return impl_->nin; }

Eigen::VectorXd OcpTranscription::lower_bounds() const {
  Eigen::VectorXd lb = Eigen::VectorXd::Constant(
      impl_->nvar, -std::numeric_limits<double>::infinity());
  for (int col : impl_->slack_of_row) lb[col] = 0.0;
  return lb;
}

Eigen::VectorXd OcpTranscription::upper_bounds() const {
  return Eigen::VectorXd::Constant(impl_->nvar,
                                   std::numeric_limits<double>::infinity());
}

double OcpTranscription::objective(const Eigen::VectorXd& x) const {
  return impl_->objective_value(x);
}

void OcpTranscription::objective_gradient(const Eigen::VectorXd& x,
                                          Eigen::VectorXd& grad) const {
  impl_->gradient(x, grad);
}

void OcpTranscription::equalities(const Eigen::VectorXd& x,
                                  Eigen::VectorXd& residual) const {
  impl_->eq_residual(x, residual);
}

void OcpTranscription::inequalities(const Eigen::VectorXd& x,
                                    Eigen::VectorXd& residual) const {
  impl_->in_residual(x, residual);
}

const nlp::SparsityPattern& OcpTranscription::equality_jacobian_pattern() const {
  return impl_->eq_pattern;
}

const nlp::SparsityPattern& OcpTranscription::inequality_jacobian_pattern() const {
  return impl_->in_pattern;
}

void OcpTranscription::equality_jacobian(const Eigen::VectorXd& x,
                                         std::vector<double>& values) const {
  values.resize(impl_->eq_pattern.entries.size());
  int idx = 0;
  impl_->eq_jacobian_walk(x, [&](int, int, double v) { values[idx++] = v; });
}

void OcpTranscription::inequality_jacobian(const Eigen::VectorXd& x,
                                           std::vector<double>& values) const {
  values.resize(impl_->in_pattern.entries.size());
  int idx = 0;
  impl_->in_jacobian_walk(x, [&](int, int, double v) { values[idx++] = v; });
}

const nlp::SparsityPattern& OcpTranscription::objective_hessian_pattern() const {
  return impl_->hess_pattern;
}

void OcpTranscription::objective_hessian(const Eigen::VectorXd& x,
                                         std::vector<double>& values) const {
  values.resize(impl_->hess_pattern.entries.size());
  int idx = 0;
  impl_->hessian_walk(x, nullptr, nullptr,
                      [&](int, int, double v) { values[idx++] = v; });
}

void OcpTranscription::lagrangian_hessian(const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& lam,
                                          const Eigen::VectorXd& mu,
                                          std::vector<double>& values) const {
  values.resize(impl_->hess_pattern.entries.size());
  int idx = 0;
  impl_->hessian_walk(x, &lam, &mu,
                      [&](int, int, double v) { values[idx++] = v; });
}

int OcpTranscription::state_index(int node) const { return impl_->state_index(node); }
int OcpTranscription::collocation_index(int k, int j) const {
  return impl_->collocation_index(k, j);
}
int OcpTranscription::input_index(int k) const { return impl_->input_index(k); }
int OcpTranscription::node_slack_index(int node) const {
  return impl_->node_slack_index(node);
}
int OcpTranscription::thrust_slack_index(int k) const {
  return impl_->thrust_slack_index(k);
}
int OcpTranscription::collision_rows_per_node() const { return impl_->V * impl_->R; }
int OcpTranscription::node_slack_count() const { return impl_->S; }

Eigen::VectorXd OcpTranscription::cold_start() const { return impl_->cold_start_impl(); }

Eigen::VectorXd OcpTranscription::warm_start(const PlannedTrajectory& previous,
                                             double new_t0) const {
  return impl_->warm_start_impl(previous, new_t0);
}

PlannedTrajectory OcpTranscription::extract(const Eigen::VectorXd& x, double t0) const {
  return impl_->extract_impl(x, t0);
}

SlackSummary OcpTranscription::slack_summary(const Eigen::VectorXd& x) const {
  return impl_->summary_impl(x);
}

std::unique_ptr<OcpTranscription> build_ocp(const model::VesselState& measured,
                                            const geom::ConvexRegion& region,
                                            const DockingSpec& spec,
                                            const model::ModelParams& params) {
  spec.validate();
  constexpr double kBig = 1e6;
  std::vector<geom::Point> cell = {
      {-kBig, -kBig}, {kBig, -kBig}, {kBig, kBig}, {-kBig, kBig}};
  for (int q = 0; q < region.rows(); ++q) {
    cell = geom::clip_polygon_halfplane(cell, region.A.row(q).transpose(),
                                        region.b[q]);
    if (cell.size() < 3) throw InvalidRegionError("docking region is empty");
  }
  if (std::abs(geom::polygon_signed_area(cell)) < 1e-7)
    throw InvalidRegionError("docking region has no interior");
  return std::make_unique<OcpTranscription>(measured, region, spec, params);
}

nlp::SolveOptions planner_solve_options() {
  nlp::SolveOptions opts;
  opts.hessian_mode = nlp::HessianMode::GaussNewton;
  opts.max_iterations = 120;
  opts.kkt_tolerance = 1e-4;
  opts.constraint_tolerance = 1e-7;
  // The tracking cost puts no curvature on surge speed, the stage states
  // or the constraint slacks, so the Gauss-Newton Hessian is singular on a
  // large subspace. Levenberg-style damping keeps the QP subproblems
  // strongly convex; it shortens individual steps but does not move the
  // converged solution.
  opts.hessian_damping = 1e-4;
  if (const char* d = std::getenv("DOCK_DAMP")) opts.hessian_damping = std::atof(d);
  // The first subproblem of a cold start assembles its active set one
  // constraint per factorization.
  opts.qp.max_rounds = 600;
  return opts;
}

PlannedTrajectory plan(const model::VesselState& measured,
                       const geom::ConvexRegion& region, const DockingSpec& spec,
                       const model::ModelParams& params,
                       const PlannedTrajectory* warm_start, double t0,
                       std::vector<nlp::IterationRecord>* iteration_log) {
  const std::unique_ptr<OcpTranscription> ocp =
      build_ocp(measured, region, spec, params);
  const Eigen::VectorXd x0 =
      warm_start ? ocp->warm_start(*warm_start, t0) : ocp->cold_start();
  const nlp::SolveResult result = nlp::solve(*ocp, x0, planner_solve_options());
  if (iteration_log) *iteration_log = result.history;
  PlannedTrajectory traj = ocp->extract(result.x, t0);
  traj.slack_summary = ocp->slack_summary(result.x);
  traj.solve_stats.converged = result.converged();
  traj.solve_stats.iterations = result.iterations;
  traj.solve_stats.solve_seconds = result.solve_seconds;
  traj.solve_stats.kkt_residual = result.kkt_residual;
  traj.solve_stats.constraint_violation = result.constraint_violation;
  traj.solve_stats.objective = result.objective;
  return traj;
}

}  // namespace dock::plan
