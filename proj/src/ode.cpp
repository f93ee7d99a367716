#include "pfc/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pfc/linalg.hpp"

namespace pfc {

void ParamBox::validate() const {
  if (edges.empty()) throw Error("param_box: must have at least one axis");
  for (const auto& e : edges) {
    if (!(e[0] < e[1])) throw Error("param_box: every edge needs positive length");
  }
}

void ParamCauchyProblem::validate() const {
  if (!rhs) throw Error("problem: rhs not set");
  if (!(a < b)) throw InvalidInterval("problem: requires a < b");
  if (!(t0 >= a && t0 <= b)) throw InvalidInterval("problem: t0 must lie in [a, b]");
  param_box.validate();
  if (lipschitz_L < 0) throw Error("problem: lipschitz_L must be >= 0");
  if (dominating_m_bound < 0) throw Error("problem: dominating_m_bound must be >= 0");
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
// 5th-order minus embedded 4th-order weights.
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

// Quartic dense-output coefficients (Shampine's interpolant for this pair;
// row sums reproduce the 5th-order weights, so the interpolant matches the
// step endpoint).
constexpr double kP[7][4] = {
    {1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0,
     -12715105075.0 / 11282082432.0},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0,
     87487479700.0 / 32700410799.0},
    {0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0,
     -10690763975.0 / 1880347072.0},
    {0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0,
     701980252875.0 / 199316789632.0},
    {0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0,
     -1453857185.0 / 822651844.0},
    {0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0,
     69997945.0 / 29380423.0}};

// PI controller constants (Hairer's dopri5 defaults).
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo1 = 0.2 - kBeta * 0.75;
constexpr double kMaxGrow = 10.0;
constexpr double kMaxShrink = 0.2;
constexpr long kMaxSteps = 20'000'000;

double scaled_rms(const Eigen::VectorXd& v, const Eigen::VectorXd& scale) {
  const auto n = v.size();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = v[i] / scale[i];
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(n));
}

using RhsFn = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

double initial_step(const RhsFn& f, double t0, const Eigen::VectorXd& y0,
                    const Eigen::VectorXd& f0, double dir, double tol,
                    double span) {
  const Eigen::VectorXd scale =
      (tol + tol * y0.cwiseAbs().array()).matrix();
  const double d0 = scaled_rms(y0, scale);
  const double d1 = scaled_rms(f0, scale);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);

  const Eigen::VectorXd y1 = y0 + h0 * dir * f0;
  const Eigen::VectorXd f1 = f(t0 + h0 * dir, y1);
  const double d2 = scaled_rms(f1 - f0, scale) / h0;

  double h1;
  if (std::max(d1, d2) <= 1e-15) {
    h1 = std::max(1e-6, h0 * 1e-3);
  } else {
    h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
  }
  return std::min({100.0 * h0, h1, span});
}

void check_state_box(const std::optional<StateBox>& box, double t,
                     const Eigen::VectorXd& y) {
  if (!box) return;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] < box->lo[i] || y[i] > box->hi[i]) {
      throw DomainEscape("state left the configured box at t = " + std::to_string(t));
    }
  }
}

// Integrate one smooth segment [t_from, t_to] (either direction), appending
// nodes, states and dense segments to out. The right-hand side is assumed
// continuous on the closed segment; breakpoint restarts happen in the caller.
void sweep_segment(const RhsFn& f, double t_from, double t_to,
                   const Eigen::VectorXd& y_from, double tol, double step_floor,
                   const std::optional<StateBox>& state_box,
                   detail::SweepResult& out) {
  const double dir = t_to > t_from ? 1.0 : -1.0;
  const double span = std::abs(t_to - t_from);
  const auto n = y_from.size();

  double t = t_from;
  Eigen::VectorXd y = y_from;
  Eigen::VectorXd k1 = f(t, y);
  double h_abs = initial_step(f, t, y, k1, dir, tol, span);
  double facold = 1e-4;

  Eigen::VectorXd k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y_new(n), err_vec(n);

  long steps = 0;
  while (dir * (t_to - t) > 0.0) {
    if (++steps > kMaxSteps) {
      throw StepFailure("step budget exhausted at t = " + std::to_string(t));
    }
    h_abs = std::min(h_abs, std::abs(t_to - t));
    if (h_abs < step_floor) {
      throw StepFailure("step size underflow at t = " + std::to_string(t));
    }
    const double h = dir * h_abs;

    k2 = f(t + kC2 * h, y + h * (kA21 * k1));
    k3 = f(t + kC3 * h, y + h * (kA31 * k1 + kA32 * k2));
    k4 = f(t + kC4 * h, y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3));
    k5 = f(t + kC5 * h, y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
    k6 = f(t + h, y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
    y_new = y + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    k7 = f(t + h, y_new);

    err_vec = h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
    Eigen::VectorXd scale(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      scale[i] = tol + tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
    }
    const double err = scaled_rms(err_vec, scale);

    const double fac11 = err > 0.0 ? std::pow(err, kExpo1) : 0.0;
    if (err <= 1.0) {
      // Accept.
      check_state_box(state_box, t + h, y_new);

      detail::DenseSegment seg;
      seg.t_anchor = t;
      seg.h = h;
      seg.lo = std::min(t, t + h);
      seg.hi = std::max(t, t + h);
      seg.y = y;
      seg.q = Eigen::MatrixXd::Zero(n, 4);
      const Eigen::VectorXd* ks[7] = {&k1, &k2, &k3, &k4, &k5, &k6, &k7};
      for (int s = 0; s < 7; ++s) {
        for (int j = 0; j < 4; ++j) {
          if (kP[s][j] != 0.0) seg.q.col(j) += kP[s][j] * (*ks[s]);
        }
      }
      out.segments.push_back(std::move(seg));
      out.accuracy = std::max(out.accuracy, inf_norm(err_vec));

      t += h;
      y = y_new;
      k1 = k7;  // FSAL
      out.nodes.push_back(t);
      out.states.push_back(y);

      const double facold_used = std::max(err, 1e-4);
      double fac = err > 0.0 ? fac11 / std::pow(facold, kBeta) : 1.0 / kMaxGrow;
      fac = std::max(1.0 / kMaxGrow, std::min(1.0 / kMaxShrink, fac / kSafety));
      h_abs = h_abs / fac;
      facold = facold_used;
    } else {
      // Reject: shrink and retry.
      const double fac = std::min(1.0 / kMaxShrink, fac11 / kSafety);
      h_abs = h_abs / fac;
    }
  }
}

}  // namespace

namespace detail {

SweepResult rk45_sweep(const RhsFn& f, double t_from, double t_to,
                       const Eigen::VectorXd& y_from, double tol, double step_floor,
                       const std::vector<double>& breakpoints,
                       const std::optional<StateBox>& state_box) {
  SweepResult out;
  if (t_from == t_to) return out;

  // Split at declared discontinuities and restart the integrator there.
  std::vector<double> cuts;
  for (double bp : breakpoints) {
    if (bp > std::min(t_from, t_to) && bp < std::max(t_from, t_to)) cuts.push_back(bp);
  }
  std::sort(cuts.begin(), cuts.end());
  if (t_to < t_from) std::reverse(cuts.begin(), cuts.end());
  cuts.push_back(t_to);

  double t = t_from;
  Eigen::VectorXd y = y_from;
  for (double target : cuts) {
    if (target == t) continue;
    sweep_segment(f, t, target, y, tol, step_floor, state_box, out);
    t = target;
    y = out.states.back();
  }
  return out;
}

Trajectory integrate_bidirectional(const RhsFn& f, double t0,
                                   const Eigen::VectorXd& y0, double a, double b,
                                   double tol, const std::vector<double>& breakpoints,
                                   const std::optional<StateBox>& state_box) {
  const double step_floor = 1e-13 * (b - a);
  SweepResult back, fwd;
  if (t0 > a) back = rk45_sweep(f, t0, a, y0, tol, step_floor, breakpoints, state_box);
  if (t0 < b) fwd = rk45_sweep(f, t0, b, y0, tol, step_floor, breakpoints, state_box);

  std::vector<double> nodes;
  std::vector<Eigen::VectorXd> states;
  nodes.reserve(back.nodes.size() + fwd.nodes.size() + 1);
  states.reserve(nodes.capacity());
  for (auto it = back.nodes.rbegin(); it != back.nodes.rend(); ++it) nodes.push_back(*it);
  for (auto it = back.states.rbegin(); it != back.states.rend(); ++it) states.push_back(*it);
  nodes.push_back(t0);
  states.push_back(y0);
  nodes.insert(nodes.end(), fwd.nodes.begin(), fwd.nodes.end());
  states.insert(states.end(), fwd.states.begin(), fwd.states.end());

  std::vector<DenseSegment> segments;
  segments.reserve(back.segments.size() + fwd.segments.size());
  for (auto it = back.segments.rbegin(); it != back.segments.rend(); ++it)
    segments.push_back(*it);
  segments.insert(segments.end(), fwd.segments.begin(), fwd.segments.end());

  double acc = std::max(back.accuracy, fwd.accuracy);
  double sup = 0.0;
  for (const auto& s : states) sup = std::max(sup, inf_norm(s));
  acc = std::max(acc, std::numeric_limits<double>::epsilon() * (1.0 + sup));

  return Trajectory(t0, std::move(nodes), std::move(states), std::move(segments), acc);
}

}  // namespace detail

Trajectory::Trajectory(double t0, std::vector<double> nodes,
                       std::vector<Eigen::VectorXd> states,
                       std::vector<detail::DenseSegment> segments, double accuracy)
    : t0_(t0),
      nodes_(std::move(nodes)),
      states_(std::move(states)),
      segments_(std::move(segments)),
      accuracy_(accuracy) {
  sup_norm_ = 0.0;
  for (const auto& s : states_) sup_norm_ = std::max(sup_norm_, inf_norm(s));
}

Eigen::VectorXd Trajectory::eval(double t) const {
  if (t < nodes_.front() || t > nodes_.back()) {
    throw OutOfSpan("t = " + std::to_string(t) + " outside trajectory span [" +
                    std::to_string(nodes_.front()) + ", " +
                    std::to_string(nodes_.back()) + "]");
  }
  // Node hits reproduce the stored state exactly.
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t);
  if (it != nodes_.end() && *it == t) {
    return states_[static_cast<std::size_t>(it - nodes_.begin())];
  }
  // Locate the dense segment whose [lo, hi] contains t.
  const auto seg = std::upper_bound(
      segments_.begin(), segments_.end(), t,
      [](double value, const detail::DenseSegment& s) { return value < s.lo; });
  const auto idx = seg == segments_.begin() ? 0 : (seg - segments_.begin() - 1);
  return segments_[static_cast<std::size_t>(idx)].eval(t);
}

Trajectory solve_ivp(const ParamCauchyProblem& problem, const Eigen::VectorXd& mu,
                     double tol) {
  problem.validate();
  if (!(tol > 0)) throw Error("solve_ivp: tol must be positive");
  if (!problem.param_box.contains(mu)) {
    throw Error("solve_ivp: mu outside param_box");
  }
  auto f = [&problem, mu](double t, const Eigen::VectorXd& y) {
    return problem.rhs(t, y, mu);
  };
  return detail::integrate_bidirectional(f, problem.t0, problem.x0, problem.a,
                                         problem.b, tol, problem.breakpoints,
                                         problem.state_box);
}

double gronwall_bound(double eps, double L, double a, double b) {
  if (!(a < b)) throw InvalidInterval("gronwall_bound: requires a < b");
  if (!(eps > 0)) throw Error("gronwall_bound: eps must be positive");
  if (L < 0) throw Error("gronwall_bound: L must be >= 0");
  return eps * (b - a) * std::exp(L * (b - a));
}

double lipschitz_delta(double eps, double M) {
  if (M <= 0) throw NonpositiveM("lipschitz_delta: M must be positive");
  if (!(eps > 0)) throw Error("lipschitz_delta: eps must be positive");
  return eps / M;
}

}  // namespace pfc
