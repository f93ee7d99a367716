#include "pfc/families.hpp"

#include <algorithm>
#include <cmath>

#include "pfc/quadrature.hpp"
#include "pfc/rng.hpp"

namespace pfc {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

Eigen::VectorXd scalar_mu(double v) {
  Eigen::VectorXd mu(1);
  mu[0] = v;
  return mu;
}

Eigen::MatrixXd scalar_mat(double v) {
  Eigen::MatrixXd m(1, 1);
  m(0, 0) = v;
  return m;
}

double sin_inv(double mu) { return std::sin(1.0 / mu); }
double mu_sin_inv(double mu) { return mu * std::sin(1.0 / mu); }
double mu_sin_pi(double mu) { return mu * std::sin(kPi / mu); }

ParamBox unit_box() { return ParamBox{{{0.0, 1.0}}}; }

/// Scalar problem dx/dt = g(mu), x(0) = 0 on [0, 1].
ParamCauchyProblem scalar_rate_problem(double (*g)(double), double m_bound) {
  ParamCauchyProblem p;
  p.rhs = [g](double, const Eigen::VectorXd&, const Eigen::VectorXd& mu) {
    Eigen::VectorXd out(1);
    out[0] = g(mu[0]);
    return out;
  };
  p.t0 = 0.0;
  p.x0 = Eigen::VectorXd::Zero(1);
  p.a = 0.0;
  p.b = 1.0;
  p.param_box = unit_box();
  p.lipschitz_L = 0.0;  // right-hand side does not depend on x
  p.dominating_m_bound = m_bound;
  return p;
}

/// Linear view of the same scalar problem: A = 0, phi = g(mu), x0 = 0.
LinearFamily scalar_rate_linear(double (*g)(double)) {
  LinearFamily fam;
  fam.n = 1;
  fam.A = [](double, const Eigen::VectorXd&) { return scalar_mat(0.0); };
  fam.Phi = [g](double, const Eigen::VectorXd& mu) { return scalar_mat(g(mu[0])); };
  fam.X0 = [](const Eigen::VectorXd&) { return scalar_mat(0.0); };
  fam.a = 0.0;
  fam.b = 1.0;
  fam.t0 = 0.0;
  fam.param_box = unit_box();
  return fam;
}

ScanMap scalar_scan(double (*g)(double)) {
  return [g](double, const Eigen::VectorXd&, const Eigen::VectorXd& mu) {
    return scalar_mat(g(mu[0]));
  };
}

Family make_sin_inv() {
  Family f;
  f.name = "sin-inv";
  f.summary = "dx/dt = sin(1/mu) on (0,1); solution map is not uniformly continuous";
  f.problem = scalar_rate_problem(&sin_inv, 1.0);
  LinearFamily lin;
  lin.n = 1;
  lin.A = [](double, const Eigen::VectorXd& mu) { return scalar_mat(sin_inv(mu[0])); };
  lin.a = 0.0;
  lin.b = 1.0;
  lin.t0 = 0.0;
  lin.param_box = unit_box();
  f.linear = lin;
  f.scan_map = scalar_scan(&sin_inv);
  // mu1 = 1/(pi n), mu2 = 1/(pi n + pi/2): the right-hand sides differ by 1
  // while the separation 1/(pi n (2n+1)) shrinks to zero.
  for (int n = 1; n <= 64; ++n) {
    f.witness_pairs.push_back(
        {scalar_mu(1.0 / (kPi * n)), scalar_mu(1.0 / (kPi * n + kPi / 2.0))});
  }
  return f;
}

Family make_mu_sin_inv() {
  Family f;
  f.name = "mu-sin-inv";
  f.summary = "dx/dt = mu sin(1/mu); equicontinuous but not Lipschitz in mu";
  f.problem = scalar_rate_problem(&mu_sin_inv, 1.0);
  f.linear = scalar_rate_linear(&mu_sin_inv);
  f.scan_map = scalar_scan(&mu_sin_inv);
  // Difference quotients along (1/(pi k), 2/(pi (2k+1))) grow like 2k.
  for (int k = 1; k <= 200; ++k) {
    f.lipschitz_pairs.push_back(
        {scalar_mu(1.0 / (kPi * k)), scalar_mu(2.0 / (kPi * (2 * k + 1)))});
  }
  return f;
}

Family make_mu_sin_pi() {
  Family f;
  f.name = "mu-sin-pi";
  f.summary = "factor family F = g(t,x) h(mu), h = mu sin(pi/mu); uniformly continuous h";
  f.problem = scalar_rate_problem(&mu_sin_pi, 1.0);
  f.linear = scalar_rate_linear(&mu_sin_pi);
  f.scan_map = scalar_scan(&mu_sin_pi);
  for (int k = 2; k <= 200; ++k) {
    // h(1/k) = 0 at integer k, h(2/(2k+1)) = +-2/(2k+1); quotient 2k.
    f.lipschitz_pairs.push_back(
        {scalar_mu(1.0 / k), scalar_mu(2.0 / (2 * k + 1))});
    f.lipschitz_pairs.push_back({scalar_mu(1.0 / k), scalar_mu(1.0 / (k + 2))});
  }
  return f;
}

Family make_mu_sin_inv_x() {
  Family f;
  f.name = "mu-sin-inv-x";
  f.summary = "dx/dt = mu sin(1/mu) x; Lipschitz in x with L = 1 on (0,1)";
  ParamCauchyProblem p;
  p.rhs = [](double, const Eigen::VectorXd& x, const Eigen::VectorXd& mu) {
    return Eigen::VectorXd(mu_sin_inv(mu[0]) * x);
  };
  p.t0 = 0.0;
  p.x0 = Eigen::VectorXd::Ones(1);
  p.a = 0.0;
  p.b = 1.0;
  p.param_box = unit_box();
  p.lipschitz_L = 1.0;                        // sup |mu sin(1/mu)| <= 1
  p.dominating_m_bound = std::exp(1.0);       // |x'| <= e along solutions
  f.problem = p;
  LinearFamily lin;
  lin.n = 1;
  lin.A = [](double, const Eigen::VectorXd& mu) { return scalar_mat(mu_sin_inv(mu[0])); };
  lin.X0 = [](const Eigen::VectorXd&) { return scalar_mat(1.0); };
  lin.a = 0.0;
  lin.b = 1.0;
  lin.t0 = 0.0;
  lin.param_box = unit_box();
  f.linear = lin;
  f.scan_map = [](double, const Eigen::VectorXd& x, const Eigen::VectorXd& mu) {
    return Eigen::MatrixXd(mu_sin_inv(mu[0]) * x);
  };
  return f;
}

Family make_scalar_exp() {
  Family f;
  f.name = "scalar-exp";
  f.summary = "A(t, mu) = mu (n = 1); flows are exact exponentials";
  LinearFamily lin;
  lin.n = 1;
  lin.A = [](double, const Eigen::VectorXd& mu) { return scalar_mat(mu[0]); };
  lin.a = 0.0;
  lin.b = 1.0;
  lin.t0 = 0.0;
  lin.param_box = ParamBox{{{0.0, 2.0}}};
  f.linear = lin;
  ParamCauchyProblem p;
  p.rhs = [](double, const Eigen::VectorXd& x, const Eigen::VectorXd& mu) {
    return Eigen::VectorXd(mu[0] * x);
  };
  p.t0 = 0.0;
  p.x0 = Eigen::VectorXd::Ones(1);
  p.a = 0.0;
  p.b = 1.0;
  p.param_box = ParamBox{{{0.0, 2.0}}};
  p.lipschitz_L = 2.0;
  p.dominating_m_bound = 2.0 * std::exp(2.0);
  f.problem = p;
  f.scan_map = [](double, const Eigen::VectorXd&, const Eigen::VectorXd& mu) {
    return scalar_mat(mu[0]);
  };
  return f;
}

Family make_nilpotent() {
  Family f;
  f.name = "nilpotent";
  f.summary = "constant A = [[0,1],[0,0]]; X(t) = [[1,t],[0,1]] exactly";
  LinearFamily lin;
  lin.n = 2;
  lin.A = [](double, const Eigen::VectorXd&) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
  };
  lin.a = 0.0;
  lin.b = 1.0;
  lin.t0 = 0.0;
  lin.param_box = unit_box();
  f.linear = lin;
  f.scan_map = [](double, const Eigen::VectorXd&, const Eigen::VectorXd&) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
  };
  return f;
}

PiecewiseMatrixPoly random_ppoly(Rng& rng, int n, const std::vector<double>& breaks,
                                 int degree) {
  PiecewiseMatrixPoly p;
  p.a = 0.0;
  p.b = 1.0;
  p.breaks = breaks;
  const std::size_t nsegs = breaks.size() + 1;
  p.segments.resize(nsegs);
  for (auto& seg : p.segments) {
    seg.c.resize(degree + 1);
    for (int k = 0; k <= degree; ++k) {
      Eigen::MatrixXd ck(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          ck(i, j) = rng.range(-1.0, 1.0) / (k + 1.0);
        }
      }
      seg.c[k] = ck;
    }
  }
  return p;
}

double integrated_norm(const PiecewiseMatrixPoly& p) {
  return integrate_segmented([&p](double t) { return matrix_norm(p.eval(t)); }, p.a,
                             p.b, p.breaks);
}

}  // namespace

Eigen::MatrixXd PiecewiseMatrixPoly::eval(double t) const {
  const auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
  const std::size_t seg = static_cast<std::size_t>(it - breaks.begin());
  return segments[seg].eval(t);
}

void PiecewiseMatrixPoly::scale(double factor) {
  for (auto& seg : segments) {
    for (auto& ck : seg.c) ck *= factor;
  }
}

Family make_random_linear(std::uint64_t seed, int n, int smoothness, double a_budget,
                          double phi_budget) {
  if (n < 1) throw Error("random-linear: n must be >= 1");
  if (a_budget <= 0) throw Error("random-linear: a_budget must be positive");
  Rng rng(seed ^ 0x70fcull);

  const int degree = std::clamp(1 + smoothness, 1, 4);
  const int n_breaks = std::max(0, 3 - smoothness);
  std::vector<double> breaks;
  for (int i = 0; i < n_breaks; ++i) breaks.push_back(rng.range(0.1, 0.9));
  std::sort(breaks.begin(), breaks.end());

  // Modulation amplitude 0.04 keeps every integrated norm within 5% of budget.
  constexpr double kAmp = 0.04;
  const double w_a = rng.range(0.5, 1.5), ph_a = rng.range(0.0, 1.0);
  const double w_f = rng.range(0.5, 1.5), ph_f = rng.range(0.0, 1.0);
  const double w_x = rng.range(0.5, 1.5), ph_x = rng.range(0.0, 1.0);

  auto make_coef = [&](double budget, double w, double ph) {
    PiecewiseMatrixPoly base = random_ppoly(rng, n, breaks, degree);
    PiecewiseMatrixPoly dir = random_ppoly(rng, n, breaks, degree);
    base.scale(budget / integrated_norm(base));
    dir.scale(kAmp * budget / integrated_norm(dir));
    auto coef = std::make_shared<ModulatedCoef>();
    coef->base = std::move(base);
    coef->terms.push_back({std::move(dir), [w, ph](const Eigen::VectorXd& mu) {
                             return std::sin(2.0 * kPi * (w * mu[0] + ph));
                           }});
    return coef;
  };

  auto a_coef = make_coef(a_budget, w_a, ph_a);
  std::shared_ptr<ModulatedCoef> phi_coef;
  if (phi_budget > 0) phi_coef = make_coef(phi_budget, w_f, ph_f);

  // Initial value: bounded matrix with mild smooth mu-dependence.
  Eigen::MatrixXd b0(n, n), b1(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      b0(i, j) = rng.range(-1.0, 1.0);
      b1(i, j) = rng.range(-1.0, 1.0);
    }
  }
  b0 *= rng.range(0.5, 1.5) / matrix_norm(b0);
  b1 *= 0.1 / matrix_norm(b1);

  const double t0 = rng.unit() < 0.3 ? 0.5 : 0.0;

  Family f;
  f.name = "random-linear";
  f.summary = "seeded piecewise-polynomial family with budgeted coefficient norms";
  LinearFamily lin;
  lin.n = n;
  lin.A = [a_coef](double t, const Eigen::VectorXd& mu) { return a_coef->eval(t, mu); };
  if (phi_coef) {
    lin.Phi = [phi_coef](double t, const Eigen::VectorXd& mu) {
      return phi_coef->eval(t, mu);
    };
  }
  lin.X0 = [b0, b1, w_x, ph_x](const Eigen::VectorXd& mu) {
    return Eigen::MatrixXd(b0 + std::sin(2.0 * kPi * (w_x * mu[0] + ph_x)) * b1);
  };
  lin.a = 0.0;
  lin.b = 1.0;
  lin.t0 = t0;
  lin.param_box = unit_box();
  lin.breakpoints = breaks;
  f.linear = std::move(lin);
  f.scan_map = [a_coef](double t, const Eigen::VectorXd&, const Eigen::VectorXd& mu) {
    return a_coef->eval(t, mu);
  };
  return f;
}

std::vector<std::pair<std::string, std::string>> builtin_families() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const char* name :
       {"sin-inv", "mu-sin-inv", "mu-sin-pi", "mu-sin-inv-x", "scalar-exp",
        "nilpotent", "random-linear"}) {
    out.emplace_back(name, make_family(name).summary);
  }
  return out;
}

Family make_family(const std::string& name) {
  if (name == "sin-inv") return make_sin_inv();
  if (name == "mu-sin-inv") return make_mu_sin_inv();
  if (name == "mu-sin-pi") return make_mu_sin_pi();
  if (name == "mu-sin-inv-x") return make_mu_sin_inv_x();
  if (name == "scalar-exp") return make_scalar_exp();
  if (name == "nilpotent") return make_nilpotent();
  if (name == "random-linear") return make_random_linear(42, 3, 2);
  throw UnknownFamily("no bundled family named '" + name + "'");
}

}  // namespace pfc
