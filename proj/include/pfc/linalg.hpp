#pragma once

#include <Eigen/Dense>

namespace pfc {

/// Max-norm of a vector. All suprema and distances in the library use this norm.
inline double inf_norm(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// Operator norm induced by the max-norm: maximum absolute row sum.
/// Submultiplicative, and matrix_norm(I) == 1 exactly.
inline double matrix_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Column-major flattening used whenever a matrix rides through the vector integrator.
inline Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

inline Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, int rows, int cols) {
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
}

}  // namespace pfc
