#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pfc/linear.hpp"
#include "pfc/ode.hpp"

namespace pfc {

/// Matrix polynomial sum_k C_k t^k.
struct MatrixPoly {
  std::vector<Eigen::MatrixXd> c;

  Eigen::MatrixXd eval(double t) const {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(c.front().rows(), c.front().cols());
    double tk = 1.0;
    for (const auto& ck : c) {
      acc += tk * ck;
      tk *= t;
    }
    return acc;
  }
};

/// Piecewise matrix polynomial on [a, b] with sorted interior breakpoints.
struct PiecewiseMatrixPoly {
  double a = 0.0, b = 1.0;
  std::vector<double> breaks;          // interior, sorted
  std::vector<MatrixPoly> segments;    // breaks.size() + 1 entries

  Eigen::MatrixXd eval(double t) const;
  void scale(double factor);
};

/// Coefficient map of the form base(t) + sum_j h_j(mu) * dir_j(t).
struct ModulatedCoef {
  PiecewiseMatrixPoly base;
  struct Term {
    PiecewiseMatrixPoly dir;
    std::function<double(const Eigen::VectorXd&)> h;
  };
  std::vector<Term> terms;

  Eigen::MatrixXd eval(double t, const Eigen::VectorXd& mu) const {
    Eigen::MatrixXd acc = base.eval(t);
    for (const auto& term : terms) acc += term.h(mu) * term.dir.eval(t);
    return acc;
  }
};

using ScanMap =
    std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&, const Eigen::VectorXd&)>;
using MuPair = std::array<Eigen::VectorXd, 2>;

/// A bundled problem family: a nonlinear Cauchy-problem view, a linear view,
/// a parameter map for the equicontinuity scans, and any registered witness
/// or Lipschitz-probe pairs, whichever of these the family supports.
struct Family {
  std::string name;
  std::string summary;
  std::optional<ParamCauchyProblem> problem;
  std::optional<LinearFamily> linear;
  ScanMap scan_map;
  std::vector<MuPair> witness_pairs;
  std::vector<MuPair> lipschitz_pairs;
};

/// Names and one-line summaries of every bundled family.
std::vector<std::pair<std::string, std::string>> builtin_families();

/// Instantiate a bundled family by name; throws UnknownFamily.
/// "random-linear" gets default parameters (seed 42, n 3, smoothness 2).
Family make_family(const std::string& name);

/// Seeded generator of piecewise-polynomial linear families. The integrated
/// coefficient norms track the requested budgets within 5% over the whole
/// parameter box, and identical seeds reproduce identical coefficients.
Family make_random_linear(std::uint64_t seed, int n, int smoothness,
                          double a_budget = 1.5, double phi_budget = 1.0);

}  // namespace pfc
