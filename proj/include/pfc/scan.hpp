#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pfc/bounds.hpp"
#include "pfc/families.hpp"
#include "pfc/parallel.hpp"

namespace pfc {

/// Strictly decreasing ladder of separation thresholds.
struct DeltaLadder {
  std::vector<double> deltas;

  static DeltaLadder geometric(double delta_max, double delta_min, int rungs);
  /// Default ladder: 10 geometric rungs from 1e-1 to 1e-4 of the box diameter.
  static DeltaLadder default_for(const ParamBox& box);
};

struct PairSamplerSpec {
  std::uint64_t seed = 0;
  int pairs_per_rung = 256;   // uniform + near-boundary strata per rung
  double boundary_fraction = 0.25;
  bool use_witnesses = true;
};

/// Fixed pool of parameter pairs; each rung evaluates the pool pairs whose
/// separation falls under its delta, so suprema are over nested sets.
struct PairSet {
  std::vector<MuPair> pairs;
  std::vector<double> separations;  // max-norm

  std::size_t size() const { return pairs.size(); }
};

/// Stratified sampler: uniform pairs, near-boundary pairs (the counterexamples
/// live near the open box's edge), and any registered witness pairs.
PairSet sample_pairs(const ParamBox& box, const DeltaLadder& ladder,
                     const PairSamplerSpec& spec,
                     std::span<const MuPair> witnesses = {});

/// delta-ladder versus measured modulus of continuity.
struct ModulusTable {
  std::vector<double> delta;
  std::vector<double> omega;
  std::vector<int> pair_counts;
};

enum class Verdict { Violates, ConsistentWithUniform, Inconclusive };

const char* to_string(Verdict v);

/// Verdict heuristic: `violates` when even the smallest rung stays at or above
/// eps_ref; `consistent-with-uniform` when omega decays below eps_ref and to at
/// most decay_fraction of the coarsest rung. Certification on an open box is
/// impossible, hence the third label.
Verdict classify(const ModulusTable& table, double eps_ref = 0.1,
                 double decay_fraction = 0.5);

/// Evaluation grid for the (t, x) quantifier of the equicontinuity scans.
struct TxGrid {
  std::vector<double> ts;
  std::vector<Eigen::VectorXd> xs;
};

TxGrid default_tx_grid(double a, double b, const Eigen::VectorXd& x0);

/// omega(delta) of sup_{(t,x)} ||F(t, x, mu1) - F(t, x, mu2)|| over the pool.
ModulusTable equicontinuity_scan(const ScanMap& F, const TxGrid& grid,
                                 const PairSet& pool, const DeltaLadder& ladder,
                                 const ExecPolicy& exec = {});

/// omega(delta) of sup_t ||x(t, mu1) - x(t, mu2)|| from solved trajectories.
ModulusTable solution_modulus(const ParamCauchyProblem& problem, const PairSet& pool,
                              const DeltaLadder& ladder, double tol = 1e-9,
                              const ExecPolicy& exec = {});

/// Linear-family variant measured on the nonhomogeneous solutions.
ModulusTable solution_modulus(const LinearFamily& fam, const PairSet& pool,
                              const DeltaLadder& ladder, double tol = 1e-9,
                              const ExecPolicy& exec = {});

/// Integral uniform-continuity scan; returns the tables for the coefficient
/// distance a(mu1, mu2) and the forcing distance f(mu1, mu2).
std::pair<ModulusTable, ModulusTable> integral_uc_scan(const LinearFamily& fam,
                                                       const PairSet& pool,
                                                       const DeltaLadder& ladder,
                                                       const ExecPolicy& exec = {});

/// Everything measured for one parameter pair while verifying the bounds.
struct PairMeasurement {
  Eigen::VectorXd mu1, mu2;
  SeminormSet sn1, sn2;
  ParamDistances dists;
  double sup_dy = 0.0;  // sup_t ||Y(mu1) - Y(mu2)||
  double rho_y = 0.0;   // rho between the nonhomogeneous solutions
};

struct DominationResult {
  std::vector<BoundReport> reports;        // one per inequality per pair
  std::vector<PairMeasurement> pairs;      // inputs to the delta-budget check
  BoundConstants constants;
};

/// Measure empirical suprema (flow and inverse norms and differences, Cauchy
/// grid suprema, solution differences, rho metrics) for each pair and compare
/// against the corresponding bounds. Every report must pass; a violation
/// signals an implementation bug, because the inequalities are theorems.
DominationResult verify_domination(const LinearFamily& fam,
                                   std::span<const MuPair> pairs, double tol = 1e-9,
                                   const ExecPolicy& exec = {},
                                   std::optional<double> slack = std::nullopt,
                                   double safety = 1.25);

/// Gronwall sensitivity check: sup_t ||x(mu1) - x(mu2)|| against
/// eps (b - a) e^{L (b - a)}. When eps is absent each pair uses its measured
/// right-hand-side gap; when present, a pair whose measured gap reaches eps
/// trips PreconditionUnmet.
std::vector<BoundReport> verify_theorem2(const ParamCauchyProblem& problem,
                                         std::optional<double> eps,
                                         std::span<const MuPair> pairs,
                                         double tol = 1e-9,
                                         const ExecPolicy& exec = {},
                                         std::optional<double> slack = std::nullopt);

/// Counterexample witness: mu1 = 1/(pi n), mu2 = 1/(pi n + pi/2).
/// separation carries the closed form 1/(pi n (2n + 1)); gap is measured by
/// solving both instances of dx/dt = sin(1/mu).
struct WitnessPair {
  Eigen::VectorXd mu1, mu2;
  double separation = 0.0;
  double gap = 0.0;
};

WitnessPair counterexample_witness(int n, double tol = 1e-9);

/// Empirical lower estimate of the best Lipschitz-in-mu constant (diagnostic).
double lipschitz_scan(const ScanMap& F, const TxGrid& grid,
                      std::span<const MuPair> pairs, const ExecPolicy& exec = {});

/// Union of two node sets plus a uniform grid over [lo, hi].
std::vector<double> sup_grid(const std::vector<double>& nodes1,
                             const std::vector<double>& nodes2, double lo, double hi,
                             int uniform_points = 1024);

}  // namespace pfc
