#include "pfc/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace pfc {

BoundConstants BoundConstants::from_K(double K) {
  if (!(K >= 1.0)) throw Error("BoundConstants: K must be >= 1 (xi = 1 <= K)");
  BoundConstants c;
  const double eK = std::exp(K);
  const double e2K = eK * eK;
  const double e3K = e2K * eK;
  const double K2 = K * K;
  const double K3 = K2 * K;
  c.K = K;
  c.K1 = K * eK;
  c.K2 = K2 * K2 * e3K * (1.0 + K + eK);
  c.K3 = K2 * e2K;
  c.Kt1 = 1.0 + K2 * eK;
  c.Kt2 = K2 * eK * (1.0 + K * eK + K3 * e2K + 2.0 * K3 * e3K);
  c.Kt3 = 1.0 + K3 * e2K;
  return c;
}

BoundConstants compute_K(const LinearFamily& fam,
                         std::span<const Eigen::VectorXd> mu_samples, double safety) {
  if (mu_samples.empty()) throw Error("compute_K: need at least one sample");
  if (!(safety >= 1.0)) throw Error("compute_K: safety must be >= 1");
  double top = 1.0;  // xi = ||E|| = 1 always participates
  for (const auto& mu : mu_samples) {
    const SeminormSet sn = seminorms(fam, mu);
    top = std::max({top, sn.n_hat, sn.phi, sn.eta});
  }
  return BoundConstants::from_K(safety * top);
}

Lemma2Bounds lemma2_bounds(const BoundConstants& c, const SeminormSet& sn1,
                           const SeminormSet& sn2, double a_dist) {
  const double xi = sn1.xi;
  const double e1 = std::exp(sn1.n_hat);
  const double e2 = std::exp(sn2.n_hat);
  const double eK = std::exp(c.K);
  const double KeK = c.K * eK;

  Lemma2Bounds b;
  b.flow_norm = {xi * e1, KeK};
  b.inverse_norm = {xi * e1, KeK};
  const double diff_sharp = xi * xi * xi * e1 * e1 * e2 * a_dist;
  const double diff_coarse = c.K * c.K * c.K * eK * eK * eK * a_dist;
  b.flow_diff = {diff_sharp, diff_coarse};
  b.inverse_diff = {diff_sharp, diff_coarse};
  b.cauchy_norm = {xi * xi * e1 * e1, KeK * KeK};
  b.cauchy_diff = {xi * xi * xi * xi * e1 * e1 * e2 * (e1 + e2) * a_dist,
                   2.0 * std::pow(c.K, 4) * std::pow(eK, 4) * a_dist};
  return b;
}

SharpCoarse lemma3_bound(const BoundConstants& c, const SeminormSet& sn1,
                         const SeminormSet& sn2, double a_dist) {
  const double xi = sn1.xi;
  const double e1 = std::exp(sn1.n_hat);
  const double e2 = std::exp(sn2.n_hat);
  const double eK = std::exp(c.K);
  SharpCoarse out;
  out.sharp = xi * e1 * (sn1.n_hat * xi * xi * e1 * e2 + 1.0) * a_dist;
  out.coarse = (std::pow(c.K, 4) * eK * eK * eK + c.K * eK) * a_dist;
  return out;
}

Lemma4Bounds lemma4_bounds(const BoundConstants& c, const SeminormSet& sn1,
                           const SeminormSet& sn2, const ParamDistances& d) {
  const double xi = sn1.xi;
  const double e1 = std::exp(sn1.n_hat);
  const double e2 = std::exp(sn2.n_hat);
  const double eK = std::exp(c.K);

  Lemma4Bounds b;
  b.y_norm.sharp = sn1.eta * xi * e1 + xi * xi * e1 * e1 * sn1.phi;
  b.y_norm.coarse = c.K * c.K * eK + c.K * c.K * c.K * eK * eK;
  b.dy_sharp = xi * e2 * d.x_dist +
               xi * xi * xi * e1 * e1 * e2 * (sn1.eta + xi * e1 + e2 * sn1.phi) * d.a_dist +
               xi * xi * e2 * e2 * d.f_dist;
  b.dy_coarse = c.K1 * d.x_dist + c.K2 * d.a_dist + c.K3 * d.f_dist;
  return b;
}

double lemma5_bound(const BoundConstants& c, const ParamDistances& d) {
  return c.Kt1 * d.x_dist + c.Kt2 * d.a_dist + c.Kt3 * d.f_dist;
}

DeltaBudget theorem3_delta_budget(const BoundConstants& c, double eps) {
  if (!(eps > 0)) throw Error("theorem3_delta_budget: eps must be positive");
  DeltaBudget t;
  t.x_k1 = eps / (3.0 * c.K1);
  t.a_k2 = eps / (3.0 * c.K2);
  t.f_k3 = eps / (3.0 * c.K3);
  t.x_kt1 = eps / (3.0 * c.Kt1);
  t.a_kt2 = eps / (3.0 * c.Kt2);
  t.f_kt3 = eps / (3.0 * c.Kt3);
  return t;
}

double holder_pair_bound(double f_lp, double g_lq) {
  if (f_lp < 0 || g_lq < 0) throw Error("holder_pair_bound: norms must be >= 0");
  return f_lp * g_lq;
}

BoundReport make_bound_report(std::string name, double theoretical, double empirical,
                              Eigen::VectorXd mu1, Eigen::VectorXd mu2, double slack) {
  BoundReport r;
  r.bound_name = std::move(name);
  r.theoretical = theoretical;
  r.empirical = empirical;
  r.margin = theoretical - empirical;
  r.mu1 = std::move(mu1);
  r.mu2 = std::move(mu2);
  r.slack = slack;
  r.passed = empirical <= theoretical + slack;
  return r;
}

}  // namespace pfc
