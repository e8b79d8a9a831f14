#include "relaxo/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "relaxo/errors.hpp"

namespace relaxo::fit {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kKhzUsToExponent = 1e-3;

// Per-point weights: 1/sigma when sigmas are provided, unit weights when
// the sigma column is entirely zero (treated as absent). Mixed columns
// are rejected.
struct Weighting {
  VectorXd weights;
  bool sigmas_provided;
};

Weighting make_weights(const std::vector<double>& sigma) {
  const std::size_t n = sigma.size();
  const bool any_positive = std::any_of(sigma.begin(), sigma.end(), [](double s) { return s > 0.0; });
  Weighting w{VectorXd::Ones(static_cast<Eigen::Index>(n)), any_positive};
  if (!any_positive) return w;
  for (std::size_t i = 0; i < n; ++i) {
    if (sigma[i] <= 0.0)
      throw InvalidInput("sigma must be > 0 for all points, or zero for all");
    w.weights(static_cast<Eigen::Index>(i)) = 1.0 / sigma[i];
  }
  return w;
}

MatrixXd invert_normal_matrix(const MatrixXd& a) {
  Eigen::FullPivLU<MatrixXd> lu(a);
  if (lu.isInvertible()) return lu.inverse();
  // Rank-deficient problem; the pseudo-inverse keeps downstream code
  // finite while the convergence flag carries the diagnosis.
  return a.completeOrthogonalDecomposition().pseudoInverse();
}

FitResult finish_fit(const LmSolution& sol,
                     std::vector<std::string> names, const VectorXd& natural,
                     const VectorXd& dnatural_dtheta, Eigen::Index n_points,
                     bool sigmas_provided) {
  FitResult result;
  result.names = std::move(names);
  result.params = natural;
  result.iterations = sol.iterations;
  result.converged = sol.converged;

  const Eigen::Index p = natural.size();
  const double dof = std::max<double>(static_cast<double>(n_points - p), 1.0);
  result.chi2_reduced = sol.chi2 / dof;

  MatrixXd cov_theta = sol.covariance;
  if (!sigmas_provided) cov_theta *= result.chi2_reduced;

  result.covariance = dnatural_dtheta.asDiagonal() * cov_theta * dnatural_dtheta.asDiagonal();
  result.sigmas = result.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  return result;
}

}  // namespace

LmSolution levenberg_marquardt(const LmProblem& problem, const LmOptions& options) {
  LmSolution sol;
  sol.theta = problem.theta0;

  VectorXd residual = problem.residual(sol.theta);
  MatrixXd jac = problem.jacobian(sol.theta);
  double chi2 = residual.squaredNorm();
  double lambda = options.lambda0;

  for (sol.iterations = 0; sol.iterations < options.max_iterations; ++sol.iterations) {
    const VectorXd gradient = jac.transpose() * residual;
    if (gradient.cwiseAbs().maxCoeff() < options.gradient_tol) {
      sol.converged = true;
      break;
    }

    const MatrixXd normal = jac.transpose() * jac;
    MatrixXd damped = normal;
    damped.diagonal() += lambda * normal.diagonal().cwiseMax(1e-12);
    const VectorXd step = damped.ldlt().solve(-gradient);

    const VectorXd theta_try = sol.theta + step;
    const VectorXd residual_try = problem.residual(theta_try);
    const double chi2_try = residual_try.squaredNorm();

    if (std::isfinite(chi2_try) && chi2_try <= chi2) {
      const double relative_drop = (chi2 - chi2_try) / std::max(chi2, 1e-300);
      sol.theta = theta_try;
      residual = residual_try;
      chi2 = chi2_try;
      jac = problem.jacobian(sol.theta);
      lambda = std::max(lambda * 0.1, 1e-15);
      if (relative_drop < options.chi2_relative_tol) {
        sol.converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e15) break;  // stuck; report non-convergence
    }
  }

  sol.chi2 = chi2;
  sol.covariance = invert_normal_matrix(jac.transpose() * jac);
  return sol;
}

std::vector<double> default_init(const synth::DecayCurve& curve, DecayModel model) {
  curve.validate();
  if (curve.size() == 0) throw InvalidInput("empty curve");

  const bool with_offset = model == DecayModel::SingleExpOffset;
  const double offset_guess = with_offset ? curve.signal.back() : 0.0;
  const double amplitude_guess = curve.signal.front();
  const double tau_max = curve.tau_us.back();
  const double fallback_rate = tau_max > 0.0 ? 1e3 / tau_max : 1.0;

  // Log-linear regression on the baseline-subtracted positive samples.
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double z = curve.signal[i] - offset_guess;
    if (z <= 0.0) continue;
    xs.push_back(curve.tau_us[i]);
    ys.push_back(std::log(z));
  }

  double rate_khz = fallback_rate;
  if (xs.size() >= 2) {
    // Centered sums: a constant curve yields a slope of exactly zero.
    const auto n = static_cast<double>(xs.size());
    double x_mean = 0, y_mean = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      x_mean += xs[i];
      y_mean += ys[i];
    }
    x_mean /= n;
    y_mean /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - x_mean) * (xs[i] - x_mean);
      sxy += (xs[i] - x_mean) * (ys[i] - y_mean);
    }
    if (sxx > 0.0) {
      const double candidate = -(sxy / sxx) / kKhzUsToExponent;
      if (candidate > 0.0 && std::isfinite(candidate)) rate_khz = candidate;
    }
  }

  std::vector<double> init{amplitude_guess, rate_khz};
  if (with_offset) init.push_back(offset_guess);
  return init;
}

LmProblem make_decay_problem(const synth::DecayCurve& curve, DecayModel model,
                             const std::vector<double>& init) {
  const bool with_offset = model == DecayModel::SingleExpOffset;
  const Eigen::Index n = static_cast<Eigen::Index>(curve.size());
  const Weighting w = make_weights(curve.sigma);

  VectorXd tau(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    tau(i) = curve.tau_us[static_cast<std::size_t>(i)];
    y(i) = curve.signal[static_cast<std::size_t>(i)];
  }

  LmProblem problem;
  // theta = (amplitude, log rate [, offset])
  problem.theta0.resize(with_offset ? 3 : 2);
  problem.theta0(0) = init[0];
  problem.theta0(1) = std::log(init[1]);
  if (with_offset) problem.theta0(2) = init[2];

  const VectorXd weights = w.weights;
  problem.residual = [tau, y, weights, with_offset](const VectorXd& theta) {
    const double amp = theta(0);
    const double rate = std::exp(theta(1));
    const double offset = with_offset ? theta(2) : 0.0;
    VectorXd r(tau.size());
    for (Eigen::Index i = 0; i < tau.size(); ++i) {
      const double model_i = amp * std::exp(-rate * tau(i) * kKhzUsToExponent) + offset;
      r(i) = (model_i - y(i)) * weights(i);
    }
    return r;
  };
  problem.jacobian = [tau, weights, with_offset](const VectorXd& theta) {
    const double amp = theta(0);
    const double rate = std::exp(theta(1));
    MatrixXd jac(tau.size(), theta.size());
    for (Eigen::Index i = 0; i < tau.size(); ++i) {
      const double e = std::exp(-rate * tau(i) * kKhzUsToExponent);
      jac(i, 0) = e * weights(i);
      jac(i, 1) = -amp * e * rate * tau(i) * kKhzUsToExponent * weights(i);
      if (with_offset) jac(i, 2) = weights(i);
    }
    return jac;
  };
  return problem;
}

FitResult fit_decay(const synth::DecayCurve& curve, DecayModel model) {
  curve.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(curve.size());
  const Eigen::Index p = model == DecayModel::SingleExpOffset ? 3 : 2;
  if (n < 3 || n < p) throw InvalidInput("decay fit needs at least 3 points");

  const Weighting w = make_weights(curve.sigma);
  const std::vector<double> init = default_init(curve, model);
  const LmProblem problem = make_decay_problem(curve, model, init);
  const LmSolution sol = levenberg_marquardt(problem);

  VectorXd natural(p), scale(p);
  natural(0) = sol.theta(0);
  natural(1) = std::exp(sol.theta(1));
  scale(0) = 1.0;
  scale(1) = natural(1);
  std::vector<std::string> names{"amplitude", "rate_khz"};
  if (p == 3) {
    natural(2) = sol.theta(2);
    scale(2) = 1.0;
    names.emplace_back("offset");
  }
  return finish_fit(sol, std::move(names), natural, scale, n, w.sigmas_provided);
}

RateEstimate extract_rates(const synth::DecayCurve& f1, const synth::DecayCurve& f2) {
  RateEstimate est;
  est.f1_fit = fit_decay(f1, DecayModel::SingleExp);
  est.f2_fit = fit_decay(f2, DecayModel::SingleExp);

  const double k1 = est.f1_fit.params(1);
  const double k1_sigma = est.f1_fit.sigmas(1);
  const double k2 = est.f2_fit.params(1);
  const double k2_sigma = est.f2_fit.sigmas(1);

  est.omega_khz = k1 / 3.0;
  est.omega_sigma_khz = k1_sigma / 3.0;
  est.gamma_raw_khz = (k2 - est.omega_khz) / 2.0;
  est.gamma_sigma_khz = 0.5 * std::hypot(k2_sigma, est.omega_sigma_khz);
  est.physical = est.gamma_raw_khz >= 0.0;
  est.gamma_khz = est.physical ? est.gamma_raw_khz : 0.0;
  return est;
}

LmProblem make_power_law_problem(const std::vector<PowerLawPoint>& points, double e_mhz,
                                 const Eigen::Vector3d& init_natural) {
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  VectorXd x(n), y(n);
  std::vector<double> sigma(points.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& pt = points[static_cast<std::size_t>(i)];
    x(i) = pt.f_mhz - 2.0 * e_mhz;
    y(i) = pt.gamma_khz;
    sigma[static_cast<std::size_t>(i)] = pt.sigma_khz;
  }
  const VectorXd weights = make_weights(sigma).weights;

  LmProblem problem;
  // theta = (log A, a, log gamma_inf)
  problem.theta0.resize(3);
  problem.theta0 << std::log(init_natural(0)), init_natural(1), std::log(init_natural(2));

  problem.residual = [x, y, weights](const VectorXd& theta) {
    const double amp = std::exp(theta(0));
    const double exponent = theta(1);
    const double gamma_inf = std::exp(theta(2));
    VectorXd r(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double model_i = amp * std::pow(x(i), -exponent) + gamma_inf;
      r(i) = (model_i - y(i)) * weights(i);
    }
    return r;
  };
  problem.jacobian = [x, weights](const VectorXd& theta) {
    const double amp = std::exp(theta(0));
    const double exponent = theta(1);
    const double gamma_inf = std::exp(theta(2));
    MatrixXd jac(x.size(), 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double term = amp * std::pow(x(i), -exponent);
      jac(i, 0) = term * weights(i);
      jac(i, 1) = -term * std::log(x(i)) * weights(i);
      jac(i, 2) = gamma_inf * weights(i);
    }
    return jac;
  };
  return problem;
}

PowerLawFit fit_power_law(const std::vector<PowerLawPoint>& points, double e_mhz) {
  if (points.size() < 4) throw InvalidInput("power-law fit needs at least 4 points");
  for (const auto& pt : points)
    if (!(pt.f_mhz > 2.0 * e_mhz))
      throw InvalidInput("all frequencies must exceed 2E (singular model)");

  const Weighting w = make_weights([&] {
    std::vector<double> s;
    s.reserve(points.size());
    for (const auto& pt : points) s.push_back(pt.sigma_khz);
    return s;
  }());

  // Initial guess: gamma_inf from the smallest gamma, a = 2, amplitude
  // from the excess at the extreme frequencies.
  double gamma_min = points.front().gamma_khz;
  for (const auto& pt : points) gamma_min = std::min(gamma_min, pt.gamma_khz);
  const double gamma_inf0 = std::max(gamma_min, 1e-6);

  double amp_sum = 0.0;
  int amp_count = 0;
  for (const auto* pt : {&points.front(), &points.back()}) {
    const double excess = pt->gamma_khz - gamma_inf0;
    if (excess > 0.0) {
      amp_sum += excess * std::pow(pt->f_mhz - 2.0 * e_mhz, 2.0);
      ++amp_count;
    }
  }
  const double amp0 = amp_count > 0 ? amp_sum / amp_count : 1.0;

  const Eigen::Vector3d init(amp0, 2.0, gamma_inf0);
  const LmProblem problem = make_power_law_problem(points, e_mhz, init);
  const LmSolution sol = levenberg_marquardt(problem);

  VectorXd natural(3), scale(3);
  natural << std::exp(sol.theta(0)), sol.theta(1), std::exp(sol.theta(2));
  scale << natural(0), 1.0, natural(2);

  const FitResult detail =
      finish_fit(sol, {"amplitude", "exponent", "gamma_inf_khz"}, natural, scale,
                 static_cast<Eigen::Index>(points.size()), w.sigmas_provided);

  PowerLawFit result;
  result.amplitude = detail.params(0);
  result.exponent = detail.params(1);
  result.gamma_inf_khz = detail.params(2);
  result.amplitude_sigma = detail.sigmas(0);
  result.exponent_sigma = detail.sigmas(1);
  result.gamma_inf_sigma_khz = detail.sigmas(2);
  result.e_used_mhz = e_mhz;
  result.detail = detail;
  return result;
}

TempLawFit fit_temperature_law(const std::vector<TempPoint>& points) {
  if (points.size() < 2) throw InvalidInput("temperature fit needs at least 2 points");
  for (const auto& pt : points)
    if (!(pt.t_kelvin > 0.0) || !(pt.inv_t1_khz > 0.0))
      throw InvalidInput("temperatures and rates must be > 0");

  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& pt : points) {
    const double x = std::log(pt.t_kelvin);
    const double y = std::log(pt.inv_t1_khz);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw InvalidInput("temperatures must not be all equal");

  TempLawFit result;
  result.exponent = (n * sxy - sx * sy) / denom;
  result.log_prefactor = (sy - result.exponent * sx) / n;

  if (points.size() > 2) {
    double rss = 0.0;
    for (const auto& pt : points) {
      const double r =
          std::log(pt.inv_t1_khz) - (result.log_prefactor + result.exponent * std::log(pt.t_kelvin));
      rss += r * r;
    }
    const double variance = rss / (n - 2.0);
    const double sxx_centered = sxx - sx * sx / n;
    result.exponent_sigma = std::sqrt(variance / sxx_centered);
    result.log_prefactor_sigma = std::sqrt(variance * (1.0 / n + (sx / n) * (sx / n) / sxx_centered));
  }
  return result;
}

}  // namespace relaxo::fit
