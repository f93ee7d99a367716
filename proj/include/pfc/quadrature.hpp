#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

namespace pfc {

using ScalarFn = std::function<double(double)>;
using MatrixFn = std::function<Eigen::MatrixXd(double)>;

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_depth = 48;
  /// Accept-anyway factor: the run fails only if the accumulated error
  /// estimate exceeds fail_factor * abs_tol after full subdivision.
  double fail_factor = 50.0;
};

/// Single Gauss-Kronrod 7-15 panel on [lo, hi]; *err receives the QUADPACK
/// style error estimate when non-null.
double gk15_panel(const ScalarFn& f, double lo, double hi, double* err = nullptr);

/// Matrix-valued panel (entrywise GK15, no error estimate).
Eigen::MatrixXd gk15_panel_matrix(const MatrixFn& f, double lo, double hi, int rows, int cols);

/// Adaptive bisection to absolute tolerance. Throws QuadratureFailure if the
/// tolerance cannot be met within max_depth by more than fail_factor.
double integrate(const ScalarFn& f, double lo, double hi,
                 const QuadratureOptions& opt = {});

/// Adaptive quadrature split at interior breakpoints (integrand may jump there).
/// Breakpoints outside (lo, hi) are ignored; the list need not be sorted.
double integrate_segmented(const ScalarFn& f, double lo, double hi,
                           std::span<const double> breakpoints,
                           const QuadratureOptions& opt = {});

/// Adaptive quadrature over a prescribed mesh: one adaptive pass per cell with
/// the tolerance budget split by cell length. Used for integrands assembled
/// from dense solver output, which are smooth inside mesh cells only.
double integrate_on_mesh(const ScalarFn& f, std::span<const double> mesh,
                         const QuadratureOptions& opt = {});

/// Sorted union of breakpoints restricted to [lo, hi], with lo/hi included.
std::vector<double> make_mesh(double lo, double hi, std::span<const double> breakpoints);

}  // namespace pfc
