#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "pfc/common.hpp"

namespace pfc {

/// Axis-aligned open box in parameter space.
struct ParamBox {
  std::vector<std::array<double, 2>> edges;  // {lo, hi} per axis, lo < hi

  int dim() const { return static_cast<int>(edges.size()); }

  bool contains(const Eigen::VectorXd& mu) const {
    if (mu.size() != dim()) return false;
    for (int i = 0; i < dim(); ++i) {
      if (!(mu[i] > edges[i][0] && mu[i] < edges[i][1])) return false;
    }
    return true;
  }

  /// Max-norm diameter (longest edge).
  double diameter() const {
    double d = 0.0;
    for (const auto& e : edges) d = std::max(d, e[1] - e[0]);
    return d;
  }

  void validate() const;
};

/// Optional state-space box; integration aborts with DomainEscape outside it.
struct StateBox {
  Eigen::VectorXd lo, hi;
};

/// Parameter-dependent Cauchy problem dx/dt = f(t, x, mu), x(t0) = x0 on [a, b].
struct ParamCauchyProblem {
  using Rhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&,
                                            const Eigen::VectorXd&)>;

  Rhs rhs;
  double t0 = 0.0;
  Eigen::VectorXd x0;
  double a = 0.0, b = 1.0;
  ParamBox param_box;
  /// Lipschitz-in-x constant, supplied by the caller (not estimated).
  double lipschitz_L = 0.0;
  /// sup of the dominating function m(t) on [a, b].
  double dominating_m_bound = 0.0;
  /// Declared t-discontinuities; integration restarts at each.
  std::vector<double> breakpoints;
  std::optional<StateBox> state_box;

  void validate() const;
};

namespace detail {
/// One accepted integrator step together with its quartic interpolation data.
struct DenseSegment {
  double t_anchor;     // step start (in integration direction)
  double h;            // signed step size
  double lo, hi;       // time span covered, lo < hi
  Eigen::VectorXd y;   // state at t_anchor
  Eigen::MatrixXd q;   // n x 4 interpolation coefficients

  Eigen::VectorXd eval(double t) const {
    const double th = (t - t_anchor) / h;
    const double th2 = th * th;
    Eigen::Vector4d p(th, th2, th2 * th, th2 * th2);
    return y + h * (q * p);
  }
};
}  // namespace detail

/// Dense-output numerical solution over [t_begin, t_end] with t0 inside.
/// Immutable after construction and safe to share across threads.
class Trajectory {
 public:
  Trajectory(double t0, std::vector<double> nodes,
             std::vector<Eigen::VectorXd> states,
             std::vector<detail::DenseSegment> segments, double accuracy);

  double t0() const { return t0_; }
  double t_begin() const { return nodes_.front(); }
  double t_end() const { return nodes_.back(); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<Eigen::VectorXd>& states() const { return states_; }
  /// Estimated max local error bound accumulated over accepted steps.
  double accuracy() const { return accuracy_; }
  /// Max-norm supremum of the stored states.
  double sup_norm() const { return sup_norm_; }
  int dim() const { return static_cast<int>(states_.front().size()); }

  /// Dense-output evaluation; exact at nodes. Throws OutOfSpan outside the span.
  Eigen::VectorXd eval(double t) const;

 private:
  double t0_;
  std::vector<double> nodes_;
  std::vector<Eigen::VectorXd> states_;
  std::vector<detail::DenseSegment> segments_;  // sorted by lo
  double accuracy_;
  double sup_norm_;
};

/// Adaptive Dormand-Prince 5(4) solve with PI step control and quartic dense
/// output, covering [a, b] in both directions from t0.
Trajectory solve_ivp(const ParamCauchyProblem& problem, const Eigen::VectorXd& mu,
                     double tol = 1e-9);

inline Eigen::VectorXd eval_trajectory(const Trajectory& traj, double t) {
  return traj.eval(t);
}

/// Sensitivity bound eps * (b - a) * exp(L * (b - a)).
double gronwall_bound(double eps, double L, double a, double b);

/// Equicontinuity delta eps / M for a Lipschitz-in-parameter right-hand side.
double lipschitz_delta(double eps, double M);

namespace detail {
/// Direction-free single sweep used by both solve_ivp and the linear flows.
struct SweepResult {
  std::vector<double> nodes;
  std::vector<Eigen::VectorXd> states;
  std::vector<DenseSegment> segments;
  double accuracy = 0.0;
};

SweepResult rk45_sweep(const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& f,
                       double t_from, double t_to, const Eigen::VectorXd& y_from,
                       double tol, double step_floor,
                       const std::vector<double>& breakpoints,
                       const std::optional<StateBox>& state_box);

Trajectory integrate_bidirectional(
    const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& f,
    double t0, const Eigen::VectorXd& y0, double a, double b, double tol,
    const std::vector<double>& breakpoints, const std::optional<StateBox>& state_box);
}  // namespace detail

}  // namespace pfc
