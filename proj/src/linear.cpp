#include "pfc/linear.hpp"

#include <algorithm>
#include <cmath>

#include "pfc/quadrature.hpp"

namespace pfc {

void LinearFamily::validate() const {
  if (n < 1) throw Error("family: dimension must be >= 1");
  if (!A) throw Error("family: A not set");
  if (!(a < b)) throw InvalidInterval("family: requires a < b");
  if (!(t0 >= a && t0 <= b)) throw InvalidInterval("family: t0 must lie in [a, b]");
  param_box.validate();
}

namespace {

Eigen::VectorXd require_in_box(const LinearFamily& fam, const Eigen::VectorXd& mu,
                               const char* who) {
  if (!fam.param_box.contains(mu)) {
    throw Error(std::string(who) + ": mu outside param_box");
  }
  return mu;
}

std::vector<double> merge_sorted(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

struct MatrixTrajectory::ProductCarrier {
  std::shared_ptr<const MatrixTrajectory> fundamental;
  std::shared_ptr<const MatrixTrajectory> inverse;
  Eigen::MatrixXd x0;
  std::function<Eigen::MatrixXd(double)> phi;
  std::vector<double> mesh;            // union of both factors' nodes
  std::vector<Eigen::MatrixXd> prefix; // INT_{t0}^{mesh[i]} Z(s) Phi(s) ds
  std::size_t t0_index = 0;

  Eigen::MatrixXd weighted(double t) const {
    const int n = x0.rows();
    auto integrand = [this](double s) { return inverse->eval(s) * phi(s); };
    // Largest mesh index with mesh[k] <= t.
    const auto it = std::upper_bound(mesh.begin(), mesh.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - mesh.begin()) - 1;
    Eigen::MatrixXd w = prefix[k];
    if (t != mesh[k]) {
      w += gk15_panel_matrix(integrand, mesh[k], t, n, n);
    }
    return w;
  }
};

MatrixTrajectory::MatrixTrajectory(FlowKind kind, int n, Trajectory traj)
    : kind_(kind), n_(n), flat_(std::move(traj)) {
  nodes_ = flat_->nodes();
}

MatrixTrajectory MatrixTrajectory::product_form(
    std::shared_ptr<const MatrixTrajectory> fundamental,
    std::shared_ptr<const MatrixTrajectory> inverse, Eigen::MatrixXd x0,
    std::function<Eigen::MatrixXd(double)> phi) {
  const int n = fundamental->n();
  auto carrier = std::make_shared<ProductCarrier>();
  carrier->fundamental = fundamental;
  carrier->inverse = inverse;
  carrier->x0 = std::move(x0);
  carrier->phi = std::move(phi);
  carrier->mesh = merge_sorted(fundamental->nodes(), inverse->nodes());

  const double t0 = fundamental->t0();
  const auto& mesh = carrier->mesh;
  const auto it = std::lower_bound(mesh.begin(), mesh.end(), t0);
  carrier->t0_index = static_cast<std::size_t>(it - mesh.begin());

  auto integrand = [&carrier](double s) {
    return carrier->inverse->eval(s) * carrier->phi(s);
  };
  carrier->prefix.assign(mesh.size(), Eigen::MatrixXd::Zero(n, n));
  for (std::size_t i = carrier->t0_index; i + 1 < mesh.size(); ++i) {
    carrier->prefix[i + 1] =
        carrier->prefix[i] + gk15_panel_matrix(integrand, mesh[i], mesh[i + 1], n, n);
  }
  for (std::size_t i = carrier->t0_index; i > 0; --i) {
    carrier->prefix[i - 1] =
        carrier->prefix[i] - gk15_panel_matrix(integrand, mesh[i - 1], mesh[i], n, n);
  }

  MatrixTrajectory out(FlowKind::Nonhomogeneous, n);
  out.product_ = std::move(carrier);
  out.nodes_ = out.product_->mesh;
  return out;
}

double MatrixTrajectory::t0() const {
  return flat_ ? flat_->t0() : product_->fundamental->t0();
}

double MatrixTrajectory::accuracy() const {
  if (flat_) return flat_->accuracy();
  return std::max(product_->fundamental->accuracy(), product_->inverse->accuracy());
}

Eigen::MatrixXd MatrixTrajectory::eval(double t) const {
  if (flat_) return unflatten(flat_->eval(t), n_, n_);
  if (t < nodes_.front() || t > nodes_.back()) {
    throw OutOfSpan("t = " + std::to_string(t) + " outside trajectory span");
  }
  return product_->fundamental->eval(t) * (product_->x0 + product_->weighted(t));
}

Eigen::MatrixXd MatrixTrajectory::state(std::size_t node_index) const {
  if (flat_) return unflatten(flat_->states()[node_index], n_, n_);
  return eval(nodes_[node_index]);
}

namespace {

MatrixTrajectory integrate_matrix(const LinearFamily& fam, const Eigen::VectorXd& mu,
                                  double tol, FlowKind kind,
                                  const Eigen::MatrixXd& init) {
  const int n = fam.n;
  auto rhs = [&fam, &mu, n, kind](double t, const Eigen::VectorXd& v) {
    const Eigen::MatrixXd m = unflatten(v, n, n);
    Eigen::MatrixXd dm;
    switch (kind) {
      case FlowKind::Homogeneous:
        dm = fam.eval_A(t, mu) * m;
        break;
      case FlowKind::Adjoint:
        dm = -m * fam.eval_A(t, mu);
        break;
      case FlowKind::Nonhomogeneous:
        dm = fam.eval_A(t, mu) * m + fam.eval_Phi(t, mu);
        break;
    }
    return flatten(dm);
  };
  Trajectory traj = detail::integrate_bidirectional(rhs, fam.t0, flatten(init), fam.a,
                                                    fam.b, tol, fam.breakpoints, {});
  return MatrixTrajectory(kind, n, std::move(traj));
}

}  // namespace

MatrixTrajectory fundamental_matrix(const LinearFamily& fam, const Eigen::VectorXd& mu,
                                    double tol) {
  fam.validate();
  require_in_box(fam, mu, "fundamental_matrix");
  MatrixTrajectory x = integrate_matrix(fam, mu, tol, FlowKind::Homogeneous,
                                        Eigen::MatrixXd::Identity(fam.n, fam.n));
  // True flows are invertible; a singular node state means the integration went wrong.
  for (std::size_t i = 0; i < x.nodes().size(); ++i) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(x.state(i));
    if (!lu.isInvertible()) {
      throw SingularFlow("fundamental matrix singular at t = " +
                         std::to_string(x.nodes()[i]));
    }
  }
  return x;
}

MatrixTrajectory inverse_flow(const LinearFamily& fam, const Eigen::VectorXd& mu,
                              double tol) {
  fam.validate();
  require_in_box(fam, mu, "inverse_flow");
  return integrate_matrix(fam, mu, tol, FlowKind::Adjoint,
                          Eigen::MatrixXd::Identity(fam.n, fam.n));
}

Eigen::MatrixXd cauchy_matrix(const MatrixTrajectory& fundamental,
                              const MatrixTrajectory& inverse, double t, double s) {
  return fundamental.eval(t) * inverse.eval(s);
}

MatrixTrajectory variation_of_constants(const LinearFamily& fam,
                                        const Eigen::VectorXd& mu, double tol) {
  fam.validate();
  require_in_box(fam, mu, "variation_of_constants");
  auto x = std::make_shared<MatrixTrajectory>(fundamental_matrix(fam, mu, tol));
  auto z = std::make_shared<MatrixTrajectory>(inverse_flow(fam, mu, tol));
  // Capture coefficient closures by value; the result must not dangle on fam.
  const Eigen::VectorXd mu_copy = mu;
  const LinearFamily::CoefFn phi_fn = fam.Phi;
  const int n = fam.n;
  auto phi = [phi_fn, mu_copy, n](double t) {
    return phi_fn ? phi_fn(t, mu_copy) : Eigen::MatrixXd::Zero(n, n);
  };
  return MatrixTrajectory::product_form(std::move(x), std::move(z), fam.eval_X0(mu),
                                        phi);
}

MatrixTrajectory solve_linear_direct(const LinearFamily& fam, const Eigen::VectorXd& mu,
                                     double tol) {
  fam.validate();
  require_in_box(fam, mu, "solve_linear_direct");
  return integrate_matrix(fam, mu, tol, FlowKind::Nonhomogeneous, fam.eval_X0(mu));
}

SeminormSet seminorms(const LinearFamily& fam, const Eigen::VectorXd& mu) {
  fam.validate();
  require_in_box(fam, mu, "seminorms");
  SeminormSet sn;
  sn.n_hat = integrate_segmented(
      [&](double t) { return matrix_norm(fam.eval_A(t, mu)); }, fam.a, fam.b,
      fam.breakpoints);
  sn.phi = fam.has_phi()
               ? integrate_segmented(
                     [&](double t) { return matrix_norm(fam.eval_Phi(t, mu)); },
                     fam.a, fam.b, fam.breakpoints)
               : 0.0;
  sn.eta = matrix_norm(fam.eval_X0(mu));
  sn.xi = 1.0;
  return sn;
}

ParamDistances param_distances(const LinearFamily& fam, const Eigen::VectorXd& mu1,
                               const Eigen::VectorXd& mu2) {
  fam.validate();
  require_in_box(fam, mu1, "param_distances");
  require_in_box(fam, mu2, "param_distances");
  ParamDistances d;
  d.a_dist = integrate_segmented(
      [&](double t) { return matrix_norm(fam.eval_A(t, mu1) - fam.eval_A(t, mu2)); },
      fam.a, fam.b, fam.breakpoints);
  d.f_dist =
      fam.has_phi()
          ? integrate_segmented(
                [&](double t) {
                  return matrix_norm(fam.eval_Phi(t, mu1) - fam.eval_Phi(t, mu2));
                },
                fam.a, fam.b, fam.breakpoints)
          : 0.0;
  d.x_dist = matrix_norm(fam.eval_X0(mu1) - fam.eval_X0(mu2));
  return d;
}

namespace {

Eigen::MatrixXd dense_derivative(const MatrixTrajectory& y, const LinearFamily& fam,
                                 const Eigen::VectorXd& mu, double t) {
  switch (y.kind()) {
    case FlowKind::Homogeneous:
      return fam.eval_A(t, mu) * y.eval(t);
    case FlowKind::Adjoint:
      return -y.eval(t) * fam.eval_A(t, mu);
    case FlowKind::Nonhomogeneous:
      return fam.eval_A(t, mu) * y.eval(t) + fam.eval_Phi(t, mu);
  }
  throw Error("unreachable");
}

}  // namespace

double rho_metric(const MatrixTrajectory& y1, const MatrixTrajectory& y2,
                  const LinearFamily& fam, const Eigen::VectorXd& mu1,
                  const Eigen::VectorXd& mu2) {
  const double head = matrix_norm(y1.eval(y1.t0()) - y2.eval(y2.t0()));
  std::vector<double> mesh = merge_sorted(y1.nodes(), y2.nodes());
  const double tail = integrate_on_mesh(
      [&](double t) {
        return matrix_norm(dense_derivative(y1, fam, mu1, t) -
                           dense_derivative(y2, fam, mu2, t));
      },
      mesh);
  return head + tail;
}

LpSeminorms lp_seminorms(const LinearFamily& fam, const Eigen::VectorXd& mu1,
                         const Eigen::VectorXd& mu2, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw InvalidExponent("lp_seminorms: requires 1 < p < infinity");
  }
  fam.validate();
  require_in_box(fam, mu1, "lp_seminorms");
  require_in_box(fam, mu2, "lp_seminorms");
  const double q = p / (p - 1.0);

  auto lp_of = [&](const ScalarFn& f, double expo) {
    const double raw = integrate_segmented(
        [&](double t) { return std::pow(f(t), expo); }, fam.a, fam.b, fam.breakpoints);
    return std::pow(std::max(raw, 0.0), 1.0 / expo);
  };

  LpSeminorms out;
  out.n_q = lp_of([&](double t) { return matrix_norm(fam.eval_A(t, mu1)); }, q);
  out.phi_q = fam.has_phi()
                  ? lp_of([&](double t) { return matrix_norm(fam.eval_Phi(t, mu1)); }, q)
                  : 0.0;
  out.a_p = lp_of(
      [&](double t) { return matrix_norm(fam.eval_A(t, mu1) - fam.eval_A(t, mu2)); }, p);
  out.f_p = fam.has_phi()
                ? lp_of(
                      [&](double t) {
                        return matrix_norm(fam.eval_Phi(t, mu1) - fam.eval_Phi(t, mu2));
                      },
                      p)
                : 0.0;
  return out;
}

}  // namespace pfc
