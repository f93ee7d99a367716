#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "pfc/linalg.hpp"
#include "pfc/ode.hpp"

namespace pfc {

/// Linear matrix Cauchy problem dX/dt = A(t, mu) X + Phi(t, mu), X(t0) = X0(mu)
/// on [a, b]. The scalar problem is the n = 1 case; a null Phi means zero and a
/// null X0 means the identity.
struct LinearFamily {
  using CoefFn = std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)>;
  using InitFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

  int n = 1;
  CoefFn A;
  CoefFn Phi;
  InitFn X0;
  double a = 0.0, b = 1.0, t0 = 0.0;
  ParamBox param_box;
  std::vector<double> breakpoints;

  void validate() const;

  Eigen::MatrixXd eval_A(double t, const Eigen::VectorXd& mu) const { return A(t, mu); }
  Eigen::MatrixXd eval_Phi(double t, const Eigen::VectorXd& mu) const {
    return Phi ? Phi(t, mu) : Eigen::MatrixXd::Zero(n, n);
  }
  Eigen::MatrixXd eval_X0(const Eigen::VectorXd& mu) const {
    return X0 ? X0(mu) : Eigen::MatrixXd::Identity(n, n);
  }
  bool has_phi() const { return static_cast<bool>(Phi); }
};

/// Which equation a matrix trajectory solves; rho_metric reconstructs
/// derivatives from the dense output accordingly.
enum class FlowKind { Homogeneous, Adjoint, Nonhomogeneous };

/// Matrix-valued dense-output solution. Carries either a flattened integrator
/// trajectory or the variation-of-constants product form
/// Y(t) = X(t) (X0 + INT_{t0}^{t} X^{-1}(s) Phi(s) ds).
class MatrixTrajectory {
 public:
  MatrixTrajectory(FlowKind kind, int n, Trajectory traj);

  static MatrixTrajectory product_form(std::shared_ptr<const MatrixTrajectory> fundamental,
                                       std::shared_ptr<const MatrixTrajectory> inverse,
                                       Eigen::MatrixXd x0,
                                       std::function<Eigen::MatrixXd(double)> phi);

  FlowKind kind() const { return kind_; }
  int n() const { return n_; }
  double t0() const;
  double t_begin() const { return nodes_.front(); }
  double t_end() const { return nodes_.back(); }
  const std::vector<double>& nodes() const { return nodes_; }
  double accuracy() const;

  Eigen::MatrixXd eval(double t) const;
  Eigen::MatrixXd state(std::size_t node_index) const;

 private:
  struct ProductCarrier;

  MatrixTrajectory(FlowKind kind, int n) : kind_(kind), n_(n) {}

  FlowKind kind_;
  int n_;
  std::optional<Trajectory> flat_;
  std::shared_ptr<const ProductCarrier> product_;
  std::vector<double> nodes_;
};

/// Integrated seminorms of one family member plus the initial-value norm.
struct SeminormSet {
  double n_hat = 0.0;  // INT ||A(t, mu)|| dt
  double phi = 0.0;    // INT ||Phi(t, mu)|| dt
  double eta = 0.0;    // ||X0(mu)||
  double xi = 1.0;     // ||E|| = 1 under the induced max-norm
};

struct ParamDistances {
  double a_dist = 0.0;  // INT ||A(t, mu1) - A(t, mu2)|| dt
  double f_dist = 0.0;  // INT ||Phi(t, mu1) - Phi(t, mu2)|| dt
  double x_dist = 0.0;  // ||X0(mu1) - X0(mu2)||
};

struct LpSeminorms {
  double n_q = 0.0;    // (INT ||A(mu1)||^q dt)^(1/q)
  double phi_q = 0.0;  // (INT ||Phi(mu1)||^q dt)^(1/q)
  double a_p = 0.0;    // (INT ||A(mu1) - A(mu2)||^p dt)^(1/p)
  double f_p = 0.0;    // (INT ||Phi(mu1) - Phi(mu2)||^p dt)^(1/p)
};

/// Solve dX/dt = A(t, mu) X, X(t0) = E. Every node state is checked to be
/// invertible; a singular state signals integration inaccuracy (SingularFlow).
MatrixTrajectory fundamental_matrix(const LinearFamily& fam, const Eigen::VectorXd& mu,
                                    double tol = 1e-9);

/// Solve dZ/dt = -Z A(t, mu), Z(t0) = E, the flow inverse.
MatrixTrajectory inverse_flow(const LinearFamily& fam, const Eigen::VectorXd& mu,
                              double tol = 1e-9);

/// Cauchy matrix C(t, s) = X(t) Z(s) from a matching fundamental/inverse pair.
Eigen::MatrixXd cauchy_matrix(const MatrixTrajectory& fundamental,
                              const MatrixTrajectory& inverse, double t, double s);

/// Cauchy-formula solution of the nonhomogeneous problem in product form.
MatrixTrajectory variation_of_constants(const LinearFamily& fam,
                                        const Eigen::VectorXd& mu, double tol = 1e-9);

/// Direct integration of dX/dt = A X + Phi, X(t0) = X0(mu).
MatrixTrajectory solve_linear_direct(const LinearFamily& fam, const Eigen::VectorXd& mu,
                                     double tol = 1e-9);

SeminormSet seminorms(const LinearFamily& fam, const Eigen::VectorXd& mu);

ParamDistances param_distances(const LinearFamily& fam, const Eigen::VectorXd& mu1,
                               const Eigen::VectorXd& mu2);

/// Metric rho = ||Y1(t0) - Y2(t0)|| + INT ||Y1' - Y2'|| dt with derivatives
/// evaluated from the stored dense output through each trajectory's equation.
double rho_metric(const MatrixTrajectory& y1, const MatrixTrajectory& y2,
                  const LinearFamily& fam, const Eigen::VectorXd& mu1,
                  const Eigen::VectorXd& mu2);

/// L^p distances and conjugate L^q seminorms (q = p / (p - 1)); requires p > 1.
LpSeminorms lp_seminorms(const LinearFamily& fam, const Eigen::VectorXd& mu1,
                         const Eigen::VectorXd& mu2, double p);

}  // namespace pfc
