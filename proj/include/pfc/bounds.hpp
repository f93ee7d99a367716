#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "pfc/linear.hpp"

namespace pfc {

/// Uniform majorant K and the derived constants of the coarse bound forms.
struct BoundConstants {
  double K = 1.0;
  double K1 = 0.0, K2 = 0.0, K3 = 0.0;     // solution-difference constants
  double Kt1 = 0.0, Kt2 = 0.0, Kt3 = 0.0;  // rho-difference constants

  /// K1 = K e^K, K2 = K^4 e^{3K} (1 + K + e^K), K3 = K^2 e^{2K},
  /// Kt1 = 1 + K^2 e^K, Kt2 = K^2 e^K (1 + K e^K + K^3 e^{2K} + 2 K^3 e^{3K}),
  /// Kt3 = 1 + K^3 e^{2K}.
  static BoundConstants from_K(double K);
};

/// K = safety * max(1, sampled n_hat, phi, eta). The box is open, so sampling
/// cannot certify a true sup; safety (default 1.25) pads the estimate.
BoundConstants compute_K(const LinearFamily& fam,
                         std::span<const Eigen::VectorXd> mu_samples,
                         double safety = 1.25);

/// A bound evaluated in both its seminorm-dependent (sharp) and K-only
/// (coarse) forms.
struct SharpCoarse {
  double sharp = 0.0;
  double coarse = 0.0;
};

/// The six estimates of the fundamental-matrix lemma. Single-parameter bounds
/// (flow_norm, inverse_norm, cauchy_norm) are evaluated at sn1.
struct Lemma2Bounds {
  SharpCoarse flow_norm;     // ||X(t, mu)||        <= xi e^{n_hat}            <= K e^K
  SharpCoarse inverse_norm;  // ||X^{-1}(t, mu)||   <= xi e^{n_hat}            <= K e^K
  SharpCoarse flow_diff;     // ||X(mu1) - X(mu2)|| <= xi^3 e^{2n1 + n2} a     <= K^3 e^{3K} a
  SharpCoarse inverse_diff;  // same bound for the inverse flows
  SharpCoarse cauchy_norm;   // ||C(t, s, mu)||     <= xi^2 e^{2 n_hat}        <= K^2 e^{2K}
  SharpCoarse cauchy_diff;   // xi^4 e^{2n1+n2}(e^{n1} + e^{n2}) a             <= 2 K^4 e^{4K} a
};

Lemma2Bounds lemma2_bounds(const BoundConstants& c, const SeminormSet& sn1,
                           const SeminormSet& sn2, double a_dist);

/// rho bound between fundamental matrices:
/// sharp xi e^{n1} (n1 xi^2 e^{n1+n2} + 1) a, coarse (K^4 e^{3K} + K e^K) a.
SharpCoarse lemma3_bound(const BoundConstants& c, const SeminormSet& sn1,
                         const SeminormSet& sn2, double a_dist);

struct Lemma4Bounds {
  SharpCoarse y_norm;      // ||Y(t, mu)|| <= eta xi e^{n} + xi^2 e^{2n} phi <= K^2 e^K + K^3 e^{2K}
  double dy_sharp = 0.0;   // seminorm form of the solution-difference bound
  double dy_coarse = 0.0;  // K1 x + K2 a + K3 f
};

Lemma4Bounds lemma4_bounds(const BoundConstants& c, const SeminormSet& sn1,
                           const SeminormSet& sn2, const ParamDistances& d);

/// rho bound between nonhomogeneous solutions: Kt1 x + Kt2 a + Kt3 f.
double lemma5_bound(const BoundConstants& c, const ParamDistances& d);

/// Thresholds eps / (3 Ki) and eps / (3 Kti); driving x, a, f below all six
/// guarantees both the solution difference and rho stay below eps.
struct DeltaBudget {
  double x_k1 = 0.0, a_k2 = 0.0, f_k3 = 0.0;
  double x_kt1 = 0.0, a_kt2 = 0.0, f_kt3 = 0.0;

  bool qualifies(const ParamDistances& d) const {
    return d.x_dist < x_k1 && d.a_dist < a_k2 && d.f_dist < f_k3 &&
           d.x_dist < x_kt1 && d.a_dist < a_kt2 && d.f_dist < f_kt3;
  }
};

DeltaBudget theorem3_delta_budget(const BoundConstants& c, double eps);

/// Product ||f||_p ||g||_q, the Hoelder majorant of INT |f g|.
double holder_pair_bound(double f_lp, double g_lq);

/// One verified inequality: theorem value vs measured supremum.
struct BoundReport {
  std::string bound_name;
  double theoretical = 0.0;
  double empirical = 0.0;
  double margin = 0.0;  // theoretical - empirical
  Eigen::VectorXd mu1, mu2;
  double slack = 0.0;
  bool passed = false;
};

BoundReport make_bound_report(std::string name, double theoretical, double empirical,
                              Eigen::VectorXd mu1, Eigen::VectorXd mu2, double slack);

}  // namespace pfc
