#include "pfc/scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "pfc/rng.hpp"

namespace pfc {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

DeltaLadder DeltaLadder::geometric(double delta_max, double delta_min, int rungs) {
  if (!(delta_max > delta_min && delta_min > 0)) {
    throw Error("ladder: requires delta_max > delta_min > 0");
  }
  if (rungs < 2) throw Error("ladder: needs at least two rungs");
  DeltaLadder l;
  const double ratio = std::pow(delta_min / delta_max, 1.0 / (rungs - 1));
  double d = delta_max;
  for (int i = 0; i < rungs; ++i) {
    l.deltas.push_back(d);
    d *= ratio;
  }
  l.deltas.back() = delta_min;
  return l;
}

DeltaLadder DeltaLadder::default_for(const ParamBox& box) {
  const double diam = box.diameter();
  return geometric(1e-1 * diam, 1e-4 * diam, 10);
}

PairSet sample_pairs(const ParamBox& box, const DeltaLadder& ladder,
                     const PairSamplerSpec& spec, std::span<const MuPair> witnesses) {
  box.validate();
  const int m = box.dim();
  Rng rng(spec.seed ^ 0x5caull);

  auto sample_point = [&](bool near_boundary) {
    Eigen::VectorXd mu(m);
    for (int i = 0; i < m; ++i) {
      const double lo = box.edges[i][0], hi = box.edges[i][1];
      mu[i] = lo + (1e-9 + rng.unit() * (1.0 - 2e-9)) * (hi - lo);
    }
    if (near_boundary) {
      const int axis = static_cast<int>(rng.below(m));
      const double lo = box.edges[axis][0], hi = box.edges[axis][1];
      const double off = (1e-9 + rng.unit() * 1e-3) * (hi - lo);
      mu[axis] = rng.unit() < 0.5 ? lo + off : hi - off;
    }
    return mu;
  };

  PairSet pool;
  auto push_pair = [&pool](Eigen::VectorXd mu1, Eigen::VectorXd mu2) {
    pool.separations.push_back(inf_norm(mu1 - mu2));
    pool.pairs.push_back({std::move(mu1), std::move(mu2)});
  };

  for (double delta : ladder.deltas) {
    const int boundary = static_cast<int>(spec.pairs_per_rung * spec.boundary_fraction);
    const int uniform = spec.pairs_per_rung - boundary;
    for (int j = 0; j < spec.pairs_per_rung; ++j) {
      const bool near_boundary = j >= uniform;
      for (int attempt = 0; attempt < 64; ++attempt) {
        Eigen::VectorXd mu1 = sample_point(near_boundary);
        const double sep = delta * (0.5 + 0.5 * rng.unit()) * (1.0 - 1e-12);
        Eigen::VectorXd mu2 = mu1;
        const int main_axis = static_cast<int>(rng.below(m));
        bool ok = true;
        for (int i = 0; i < m; ++i) {
          const double lo = box.edges[i][0], hi = box.edges[i][1];
          double off = i == main_axis ? sep : rng.range(-sep, sep);
          if (mu1[i] + off >= hi || mu1[i] + off <= lo) off = -off;
          if (mu1[i] + off >= hi || mu1[i] + off <= lo) {
            ok = false;
            break;
          }
          mu2[i] = mu1[i] + off;
        }
        if (!ok) continue;
        push_pair(std::move(mu1), std::move(mu2));
        break;
      }
    }
  }

  if (spec.use_witnesses) {
    for (const auto& w : witnesses) {
      if (box.contains(w[0]) && box.contains(w[1])) push_pair(w[0], w[1]);
    }
  }
  return pool;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Violates:
      return "violates";
    case Verdict::ConsistentWithUniform:
      return "consistent-with-uniform";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

Verdict classify(const ModulusTable& table, double eps_ref, double decay_fraction) {
  if (table.omega.empty()) return Verdict::Inconclusive;
  const double tightest = table.omega.back();
  const double coarsest = table.omega.front();
  if (tightest >= eps_ref) return Verdict::Violates;
  if (tightest <= decay_fraction * coarsest) return Verdict::ConsistentWithUniform;
  return Verdict::Inconclusive;
}

TxGrid default_tx_grid(double a, double b, const Eigen::VectorXd& x0) {
  TxGrid g;
  const int nt = 21;
  for (int i = 0; i < nt; ++i) {
    g.ts.push_back(a + (b - a) * i / (nt - 1));
  }
  g.xs.push_back(x0);
  g.xs.push_back(x0 + Eigen::VectorXd::Ones(x0.size()));
  g.xs.push_back(x0 - Eigen::VectorXd::Ones(x0.size()));
  return g;
}

namespace {

/// Shared scan skeleton: evaluate gap(pair) for every pool pair (parallel,
/// slot-per-pair), then reduce per rung in index order.
template <typename GapFn>
ModulusTable scan_table(const PairSet& pool, const DeltaLadder& ladder,
                        const ExecPolicy& exec, GapFn&& gap) {
  std::vector<double> gaps(pool.size());
  for_each_index(pool.size(), exec,
                 [&](std::size_t i) { gaps[i] = gap(pool.pairs[i]); });

  ModulusTable table;
  for (double delta : ladder.deltas) {
    double omega = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool.separations[i] < delta) {
        omega = std::max(omega, gaps[i]);
        ++count;
      }
    }
    table.delta.push_back(delta);
    table.omega.push_back(omega);
    table.pair_counts.push_back(count);
  }
  return table;
}

double sup_over_grid(const std::vector<double>& grid,
                     const std::function<double(double)>& value) {
  double sup = 0.0;
  for (double t : grid) sup = std::max(sup, value(t));
  return sup;
}

}  // namespace

std::vector<double> sup_grid(const std::vector<double>& nodes1,
                             const std::vector<double>& nodes2, double lo, double hi,
                             int uniform_points) {
  std::vector<double> grid;
  grid.reserve(nodes1.size() + nodes2.size() + uniform_points);
  for (double t : nodes1)
    if (t >= lo && t <= hi) grid.push_back(t);
  for (double t : nodes2)
    if (t >= lo && t <= hi) grid.push_back(t);
  for (int i = 0; i < uniform_points; ++i) {
    grid.push_back(lo + (hi - lo) * i / (uniform_points - 1.0));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

ModulusTable equicontinuity_scan(const ScanMap& F, const TxGrid& grid,
                                 const PairSet& pool, const DeltaLadder& ladder,
                                 const ExecPolicy& exec) {
  if (grid.ts.empty() || grid.xs.empty()) throw Error("equicontinuity_scan: empty grid");
  return scan_table(pool, ladder, exec, [&](const MuPair& pair) {
    double gap = 0.0;
    for (double t : grid.ts) {
      for (const auto& x : grid.xs) {
        gap = std::max(gap, matrix_norm(F(t, x, pair[0]) - F(t, x, pair[1])));
      }
    }
    return gap;
  });
}

ModulusTable solution_modulus(const ParamCauchyProblem& problem, const PairSet& pool,
                              const DeltaLadder& ladder, double tol,
                              const ExecPolicy& exec) {
  return scan_table(pool, ladder, exec, [&](const MuPair& pair) {
    const Trajectory x1 = solve_ivp(problem, pair[0], tol);
    const Trajectory x2 = solve_ivp(problem, pair[1], tol);
    const auto grid = sup_grid(x1.nodes(), x2.nodes(), problem.a, problem.b);
    return sup_over_grid(grid,
                         [&](double t) { return inf_norm(x1.eval(t) - x2.eval(t)); });
  });
}

ModulusTable solution_modulus(const LinearFamily& fam, const PairSet& pool,
                              const DeltaLadder& ladder, double tol,
                              const ExecPolicy& exec) {
  return scan_table(pool, ladder, exec, [&](const MuPair& pair) {
    const MatrixTrajectory y1 = solve_linear_direct(fam, pair[0], tol);
    const MatrixTrajectory y2 = solve_linear_direct(fam, pair[1], tol);
    const auto grid = sup_grid(y1.nodes(), y2.nodes(), fam.a, fam.b);
    return sup_over_grid(
        grid, [&](double t) { return matrix_norm(y1.eval(t) - y2.eval(t)); });
  });
}

std::pair<ModulusTable, ModulusTable> integral_uc_scan(const LinearFamily& fam,
                                                       const PairSet& pool,
                                                       const DeltaLadder& ladder,
                                                       const ExecPolicy& exec) {
  // One pass computes both distances; split into per-table gap arrays.
  std::vector<double> a_gaps(pool.size()), f_gaps(pool.size());
  for_each_index(pool.size(), exec, [&](std::size_t i) {
    const ParamDistances d = param_distances(fam, pool.pairs[i][0], pool.pairs[i][1]);
    a_gaps[i] = d.a_dist;
    f_gaps[i] = d.f_dist;
  });

  auto reduce = [&](const std::vector<double>& gaps) {
    ModulusTable table;
    for (double delta : ladder.deltas) {
      double omega = 0.0;
      int count = 0;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (pool.separations[i] < delta) {
          omega = std::max(omega, gaps[i]);
          ++count;
        }
      }
      table.delta.push_back(delta);
      table.omega.push_back(omega);
      table.pair_counts.push_back(count);
    }
    return table;
  };
  return {reduce(a_gaps), reduce(f_gaps)};
}

namespace {

struct PairBundle {
  PairMeasurement m;
  double sup_x1 = 0, sup_x2 = 0, sup_z1 = 0, sup_z2 = 0;
  double sup_dx = 0, sup_dz = 0;
  double sup_c1 = 0, sup_c2 = 0, sup_dc = 0;
  double sup_y1 = 0, sup_y2 = 0;
  double rho_x = 0;
};

PairBundle measure_pair(const LinearFamily& fam, const MuPair& pair, double tol) {
  PairBundle b;
  b.m.mu1 = pair[0];
  b.m.mu2 = pair[1];
  b.m.sn1 = seminorms(fam, pair[0]);
  b.m.sn2 = seminorms(fam, pair[1]);
  b.m.dists = param_distances(fam, pair[0], pair[1]);

  auto x1 = std::make_shared<MatrixTrajectory>(fundamental_matrix(fam, pair[0], tol));
  auto z1 = std::make_shared<MatrixTrajectory>(inverse_flow(fam, pair[0], tol));
  auto x2 = std::make_shared<MatrixTrajectory>(fundamental_matrix(fam, pair[1], tol));
  auto z2 = std::make_shared<MatrixTrajectory>(inverse_flow(fam, pair[1], tol));

  const auto grid_x = sup_grid(x1->nodes(), x2->nodes(), fam.a, fam.b);
  for (double t : grid_x) {
    const Eigen::MatrixXd m1 = x1->eval(t), m2 = x2->eval(t);
    b.sup_x1 = std::max(b.sup_x1, matrix_norm(m1));
    b.sup_x2 = std::max(b.sup_x2, matrix_norm(m2));
    b.sup_dx = std::max(b.sup_dx, matrix_norm(m1 - m2));
  }
  const auto grid_z = sup_grid(z1->nodes(), z2->nodes(), fam.a, fam.b);
  for (double t : grid_z) {
    const Eigen::MatrixXd m1 = z1->eval(t), m2 = z2->eval(t);
    b.sup_z1 = std::max(b.sup_z1, matrix_norm(m1));
    b.sup_z2 = std::max(b.sup_z2, matrix_norm(m2));
    b.sup_dz = std::max(b.sup_dz, matrix_norm(m1 - m2));
  }

  // Cauchy-matrix suprema on a 33 x 33 (t, s) grid (grid supremum, not a true sup).
  constexpr int kc = 33;
  std::vector<Eigen::MatrixXd> x1g(kc), x2g(kc), z1g(kc), z2g(kc);
  for (int i = 0; i < kc; ++i) {
    const double t = fam.a + (fam.b - fam.a) * i / (kc - 1.0);
    x1g[i] = x1->eval(t);
    x2g[i] = x2->eval(t);
    z1g[i] = z1->eval(t);
    z2g[i] = z2->eval(t);
  }
  for (int i = 0; i < kc; ++i) {
    for (int j = 0; j < kc; ++j) {
      const Eigen::MatrixXd c1 = x1g[i] * z1g[j];
      const Eigen::MatrixXd c2 = x2g[i] * z2g[j];
      b.sup_c1 = std::max(b.sup_c1, matrix_norm(c1));
      b.sup_c2 = std::max(b.sup_c2, matrix_norm(c2));
      b.sup_dc = std::max(b.sup_dc, matrix_norm(c1 - c2));
    }
  }

  b.rho_x = rho_metric(*x1, *x2, fam, pair[0], pair[1]);

  // Nonhomogeneous solutions via the Cauchy formula, reusing the flows.
  auto phi_at = [&fam](const Eigen::VectorXd& mu) {
    const LinearFamily::CoefFn phi_fn = fam.Phi;
    const int n = fam.n;
    const Eigen::VectorXd mu_copy = mu;
    return std::function<Eigen::MatrixXd(double)>([phi_fn, mu_copy, n](double t) {
      return phi_fn ? phi_fn(t, mu_copy) : Eigen::MatrixXd::Zero(n, n);
    });
  };
  const MatrixTrajectory y1 =
      MatrixTrajectory::product_form(x1, z1, fam.eval_X0(pair[0]), phi_at(pair[0]));
  const MatrixTrajectory y2 =
      MatrixTrajectory::product_form(x2, z2, fam.eval_X0(pair[1]), phi_at(pair[1]));

  const auto grid_y = sup_grid(y1.nodes(), y2.nodes(), fam.a, fam.b);
  for (double t : grid_y) {
    const Eigen::MatrixXd m1 = y1.eval(t), m2 = y2.eval(t);
    b.sup_y1 = std::max(b.sup_y1, matrix_norm(m1));
    b.sup_y2 = std::max(b.sup_y2, matrix_norm(m2));
    b.m.sup_dy = std::max(b.m.sup_dy, matrix_norm(m1 - m2));
  }
  b.m.rho_y = rho_metric(y1, y2, fam, pair[0], pair[1]);
  return b;
}

}  // namespace

DominationResult verify_domination(const LinearFamily& fam,
                                   std::span<const MuPair> pairs, double tol,
                                   const ExecPolicy& exec, std::optional<double> slack,
                                   double safety) {
  fam.validate();
  const double eps_slack = slack.value_or(100.0 * tol);

  std::vector<PairBundle> bundles(pairs.size());
  for_each_index(pairs.size(), exec,
                 [&](std::size_t i) { bundles[i] = measure_pair(fam, pairs[i], tol); });

  // Uniform majorant over every sampled parameter (open box: padded by safety).
  double top = 1.0;
  for (const auto& b : bundles) {
    top = std::max({top, b.m.sn1.n_hat, b.m.sn1.phi, b.m.sn1.eta, b.m.sn2.n_hat,
                    b.m.sn2.phi, b.m.sn2.eta});
  }
  const BoundConstants c = BoundConstants::from_K(safety * top);

  DominationResult out;
  out.constants = c;
  for (const auto& b : bundles) {
    const auto& sn1 = b.m.sn1;
    const auto& sn2 = b.m.sn2;
    const Lemma2Bounds l2 = lemma2_bounds(c, sn1, sn2, b.m.dists.a_dist);
    const Lemma2Bounds l2r = lemma2_bounds(c, sn2, sn1, b.m.dists.a_dist);
    const SharpCoarse l3 = lemma3_bound(c, sn1, sn2, b.m.dists.a_dist);
    const Lemma4Bounds l4 = lemma4_bounds(c, sn1, sn2, b.m.dists);
    const Lemma4Bounds l4r = lemma4_bounds(c, sn2, sn1, b.m.dists);
    const double l5 = lemma5_bound(c, b.m.dists);

    auto push = [&](const char* name, double theo, double emp) {
      out.reports.push_back(
          make_bound_report(name, theo, emp, b.m.mu1, b.m.mu2, eps_slack));
    };
    push("eq9-flow-norm", std::max(l2.flow_norm.sharp, l2r.flow_norm.sharp),
         std::max(b.sup_x1, b.sup_x2));
    push("eq10-inverse-norm", std::max(l2.inverse_norm.sharp, l2r.inverse_norm.sharp),
         std::max(b.sup_z1, b.sup_z2));
    push("eq11-flow-diff", l2.flow_diff.sharp, b.sup_dx);
    push("eq12-inverse-diff", l2.inverse_diff.sharp, b.sup_dz);
    push("eq13-cauchy-norm", std::max(l2.cauchy_norm.sharp, l2r.cauchy_norm.sharp),
         std::max(b.sup_c1, b.sup_c2));
    push("eq14-cauchy-diff", l2.cauchy_diff.sharp, b.sup_dc);
    push("lemma3-rho", l3.sharp, b.rho_x);
    push("eq18-y-norm", std::max(l4.y_norm.sharp, l4r.y_norm.sharp),
         std::max(b.sup_y1, b.sup_y2));
    push("eq19-y-diff", l4.dy_coarse, b.m.sup_dy);
    push("eq19-y-diff-sharp", l4.dy_sharp, b.m.sup_dy);
    push("eq20-rho", l5, b.m.rho_y);
    out.pairs.push_back(b.m);
  }
  return out;
}

std::vector<BoundReport> verify_theorem2(const ParamCauchyProblem& problem,
                                         std::optional<double> eps,
                                         std::span<const MuPair> pairs, double tol,
                                         const ExecPolicy& exec,
                                         std::optional<double> slack) {
  problem.validate();
  const double eps_slack = slack.value_or(100.0 * tol);

  struct Row {
    double gap_rhs = 0.0, sup_dx = 0.0;
  };
  std::vector<Row> rows(pairs.size());
  for_each_index(pairs.size(), exec, [&](std::size_t i) {
    const auto& pair = pairs[i];
    const Trajectory x1 = solve_ivp(problem, pair[0], tol);
    const Trajectory x2 = solve_ivp(problem, pair[1], tol);
    const auto grid = sup_grid(x1.nodes(), x2.nodes(), problem.a, problem.b);
    Row r;
    for (double t : grid) {
      const Eigen::VectorXd s1 = x1.eval(t), s2 = x2.eval(t);
      r.sup_dx = std::max(r.sup_dx, inf_norm(s1 - s2));
      // Equicontinuity gap along the realized states of both solutions.
      r.gap_rhs = std::max(
          r.gap_rhs, inf_norm(problem.rhs(t, s1, pair[0]) - problem.rhs(t, s1, pair[1])));
      r.gap_rhs = std::max(
          r.gap_rhs, inf_norm(problem.rhs(t, s2, pair[0]) - problem.rhs(t, s2, pair[1])));
    }
    rows[i] = r;
  });

  std::vector<BoundReport> reports;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    double eps_used;
    if (eps) {
      if (rows[i].gap_rhs >= *eps) {
        throw PreconditionUnmet("theorem2: measured right-hand-side gap " +
                                std::to_string(rows[i].gap_rhs) +
                                " reaches eps for pair " + std::to_string(i));
      }
      eps_used = *eps;
    } else {
      eps_used = std::max(rows[i].gap_rhs * (1.0 + 1e-9),
                          std::numeric_limits<double>::min());
    }
    const double bound = gronwall_bound(eps_used, problem.lipschitz_L, problem.a,
                                        problem.b);
    reports.push_back(make_bound_report("theorem2", bound, rows[i].sup_dx,
                                        pairs[i][0], pairs[i][1], eps_slack));
  }
  return reports;
}

WitnessPair counterexample_witness(int n, double tol) {
  if (n < 1) throw Error("counterexample_witness: n must be >= 1");
  const Family fam = make_family("sin-inv");
  WitnessPair w;
  Eigen::VectorXd mu1(1), mu2(1);
  mu1[0] = 1.0 / (kPi * n);
  mu2[0] = 1.0 / (kPi * n + kPi / 2.0);
  w.mu1 = mu1;
  w.mu2 = mu2;
  w.separation = 1.0 / (kPi * n * (2 * n + 1));

  const Trajectory x1 = solve_ivp(*fam.problem, mu1, tol);
  const Trajectory x2 = solve_ivp(*fam.problem, mu2, tol);
  const auto grid = sup_grid(x1.nodes(), x2.nodes(), fam.problem->a, fam.problem->b);
  double gap = 0.0;
  for (double t : grid) gap = std::max(gap, inf_norm(x1.eval(t) - x2.eval(t)));
  w.gap = gap;
  return w;
}

double lipschitz_scan(const ScanMap& F, const TxGrid& grid,
                      std::span<const MuPair> pairs, const ExecPolicy& exec) {
  std::vector<double> ratios(pairs.size(), 0.0);
  for_each_index(pairs.size(), exec, [&](std::size_t i) {
    const double sep = inf_norm(pairs[i][0] - pairs[i][1]);
    if (sep <= 0.0) return;
    double gap = 0.0;
    for (double t : grid.ts) {
      for (const auto& x : grid.xs) {
        gap = std::max(gap, matrix_norm(F(t, x, pairs[i][0]) - F(t, x, pairs[i][1])));
      }
    }
    ratios[i] = gap / sep;
  });
  double best = 0.0;
  for (double r : ratios) best = std::max(best, r);
  return best;
}

}  // namespace pfc
