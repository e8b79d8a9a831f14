// Test-only reference implementations, independent of the library code
// paths they check.
#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace oracles {

/// Matrix exponential by scaling and squaring with a Taylor series on the
/// scaled matrix. Brute force, for small test matrices only.
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  const Eigen::MatrixXd scaled = a * scale;

  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd term = result;
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

/// Central-difference Jacobian of a vector residual function.
template <typename F>
Eigen::MatrixXd finite_difference_jacobian(const F& residual, const Eigen::VectorXd& theta,
                                           double relative_step = 1e-6) {
  const Eigen::VectorXd r0 = residual(theta);
  Eigen::MatrixXd jac(r0.size(), theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double step = relative_step * std::max(std::abs(theta(j)), 1.0);
    Eigen::VectorXd lo = theta, hi = theta;
    hi(j) += step;
    lo(j) -= step;
    jac.col(j) = (residual(hi) - residual(lo)) / (2.0 * step);
  }
  return jac;
}

/// Least-squares projection of samples onto a dictionary of basis
/// functions; returns the residual norm.
inline double dictionary_residual(const Eigen::MatrixXd& basis, const Eigen::VectorXd& samples) {
  const Eigen::VectorXd coeffs = basis.colPivHouseholderQr().solve(samples);
  return (basis * coeffs - samples).norm();
}

}  // namespace oracles
