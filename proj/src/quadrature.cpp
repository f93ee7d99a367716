#include "pfc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pfc/common.hpp"

namespace pfc {

namespace {

// 15-point Kronrod abscissae (positive half), QUADPACK dqk15.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

// Kronrod weights.
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

// Gauss 7 weights, mapped onto kXgk[1], kXgk[3], kXgk[5], kXgk[7].
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
  double integral;
  double error;
};

PanelResult gk15_core(const ScalarFn& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  double fv[15];
  for (int j = 0; j < 7; ++j) {
    fv[j] = f(c - half * kXgk[j]);
    fv[14 - j] = f(c + half * kXgk[j]);
  }
  fv[7] = f(c);

  double resk = kWgk[7] * fv[7];
  double resg = kWg[3] * fv[7];
  double resabs = kWgk[7] * std::abs(fv[7]);
  for (int j = 0; j < 7; ++j) {
    const double sum = fv[j] + fv[14 - j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }

  const double mean = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fv[7] - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
  }
  resasc *= std::abs(half);
  resabs *= std::abs(half);

  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double eps = std::numeric_limits<double>::epsilon();
  const double underflow = std::numeric_limits<double>::min();
  if (resabs > underflow / (50.0 * eps)) {
    err = std::max(err, 50.0 * eps * resabs);
  }
  return {resk * half, err};
}

void adapt(const ScalarFn& f, double lo, double hi, double tol, int depth,
           const QuadratureOptions& opt, double& integral, double& err_total) {
  const PanelResult r = gk15_core(f, lo, hi);
  if (r.error <= tol || depth >= opt.max_depth) {
    integral += r.integral;
    err_total += r.error;
    return;
  }
  const double mid = 0.5 * (lo + hi);
  adapt(f, lo, mid, 0.5 * tol, depth + 1, opt, integral, err_total);
  adapt(f, mid, hi, 0.5 * tol, depth + 1, opt, integral, err_total);
}

}  // namespace

double gk15_panel(const ScalarFn& f, double lo, double hi, double* err) {
  const PanelResult r = gk15_core(f, lo, hi);
  if (err) *err = r.error;
  return r.integral;
}

Eigen::MatrixXd gk15_panel_matrix(const MatrixFn& f, double lo, double hi, int rows, int cols) {
  const double c = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(rows, cols);
  acc += kWgk[7] * f(c);
  for (int j = 0; j < 7; ++j) {
    acc += kWgk[j] * (f(c - half * kXgk[j]) + f(c + half * kXgk[j]));
  }
  return acc * half;
}

double integrate(const ScalarFn& f, double lo, double hi, const QuadratureOptions& opt) {
  if (lo == hi) return 0.0;
  double sign = 1.0;
  double a = lo, b = hi;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  double integral = 0.0, err = 0.0;
  adapt(f, a, b, opt.abs_tol, 0, opt, integral, err);
  if (err > opt.fail_factor * opt.abs_tol) {
    throw QuadratureFailure("quadrature error estimate " + std::to_string(err) +
                            " exceeds tolerance budget");
  }
  return sign * integral;
}

std::vector<double> make_mesh(double lo, double hi, std::span<const double> breakpoints) {
  std::vector<double> mesh;
  mesh.push_back(lo);
  for (double t : breakpoints) {
    if (t > lo && t < hi) mesh.push_back(t);
  }
  mesh.push_back(hi);
  std::sort(mesh.begin(), mesh.end());
  mesh.erase(std::unique(mesh.begin(), mesh.end()), mesh.end());
  return mesh;
}

double integrate_segmented(const ScalarFn& f, double lo, double hi,
                           std::span<const double> breakpoints,
                           const QuadratureOptions& opt) {
  if (lo == hi) return 0.0;
  double sign = 1.0;
  double a = lo, b = hi;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  const std::vector<double> mesh = make_mesh(a, b, breakpoints);
  return sign * integrate_on_mesh(f, mesh, opt);
}

double integrate_on_mesh(const ScalarFn& f, std::span<const double> mesh,
                         const QuadratureOptions& opt) {
  if (mesh.size() < 2) return 0.0;
  const double total_len = mesh.back() - mesh.front();
  double integral = 0.0, err = 0.0;
  for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
    const double len = mesh[i + 1] - mesh[i];
    if (len <= 0.0) continue;
    const double cell_tol = std::max(opt.abs_tol * (len / total_len),
                                     std::numeric_limits<double>::min());
    adapt(f, mesh[i], mesh[i + 1], cell_tol, 0, opt, integral, err);
  }
  if (err > opt.fail_factor * opt.abs_tol) {
    throw QuadratureFailure("mesh quadrature error estimate " + std::to_string(err) +
                            " exceeds tolerance budget");
  }
  return integral;
}

}  // namespace pfc
