#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "relaxo/synth.hpp"

namespace relaxo::fit {

/// Fitted parameters in natural units with one-standard-deviation
/// uncertainties from the inverse weighted normal matrix.
struct FitResult {
  std::vector<std::string> names;
  Eigen::VectorXd params;
  Eigen::VectorXd sigmas;
  Eigen::MatrixXd covariance;
  double chi2_reduced = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// A weighted least-squares problem over internal (transformed)
/// parameters theta. residual returns the weighted residual vector,
/// jacobian its analytic derivative with respect to theta.
struct LmProblem {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> residual;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
  Eigen::VectorXd theta0;
};

struct LmOptions {
  int max_iterations = 200;
  double chi2_relative_tol = 1e-10;
  double gradient_tol = 1e-10;
  double lambda0 = 1e-3;
};

struct LmSolution {
  Eigen::VectorXd theta;
  Eigen::MatrixXd covariance;  ///< (J^T J)^-1 at the solution, theta space
  double chi2 = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Damped least squares: lambda starts at lambda0, x10 on a rejected
/// step, /10 on an accepted one. Stops on relative chi^2 reduction below
/// chi2_relative_tol or gradient max-norm below gradient_tol.
LmSolution levenberg_marquardt(const LmProblem& problem, const LmOptions& options = {});

enum class DecayModel { SingleExp, SingleExpOffset };

/// Weighted fit of amplitude * exp(-rate * tau) [+ offset]. The rate is
/// log-parameterized so it stays positive; sigmas come back through the
/// delta method. Non-convergence is reported in the result, not thrown.
/// Parameter names: amplitude, rate_khz [, offset].
FitResult fit_decay(const synth::DecayCurve& curve, DecayModel model);

/// LM problem behind fit_decay, exposed so tests can check the analytic
/// Jacobian against finite differences.
LmProblem make_decay_problem(const synth::DecayCurve& curve, DecayModel model,
                             const std::vector<double>& init);

/// Initial guess {amplitude, rate_khz [, offset]}: log-linear regression
/// on baseline-subtracted positive samples, first sample as amplitude,
/// last sample as offset. Falls back to rate = 1/tau_max when the
/// regression is unusable.
std::vector<double> default_init(const synth::DecayCurve& curve, DecayModel model);

/// Relaxation rates with uncertainties from a fitted F1/F2 pair.
struct RateEstimate {
  double omega_khz = 0.0;
  double omega_sigma_khz = 0.0;
  double gamma_khz = 0.0;
  double gamma_sigma_khz = 0.0;
  double gamma_raw_khz = 0.0;  ///< before clamping, for diagnostics
  bool physical = true;        ///< false when the raw gamma came out negative
  FitResult f1_fit;
  FitResult f2_fit;
};

/// Sequential extraction: omega = k1/3 from the F1 fit, then
/// gamma = (k2 - omega)/2 from the F2 fit with errors propagated assuming
/// independence. A negative raw gamma is clamped to zero and flagged.
RateEstimate extract_rates(const synth::DecayCurve& f1, const synth::DecayCurve& f2);

struct PowerLawPoint {
  double f_mhz;
  double gamma_khz;
  double sigma_khz;
};

/// gamma(f) = amplitude / (f - 2E)^exponent + gamma_inf.
struct PowerLawFit {
  double amplitude = 0.0;
  double exponent = 0.0;
  double gamma_inf_khz = 0.0;
  double amplitude_sigma = 0.0;
  double exponent_sigma = 0.0;
  double gamma_inf_sigma_khz = 0.0;
  double e_used_mhz = 0.0;
  FitResult detail;
};

PowerLawFit fit_power_law(const std::vector<PowerLawPoint>& points, double e_mhz);

LmProblem make_power_law_problem(const std::vector<PowerLawPoint>& points, double e_mhz,
                                 const Eigen::Vector3d& init_natural);

struct TempPoint {
  double t_kelvin;
  double inv_t1_khz;
};

/// Power law 1/T1 proportional to T^p, by ordinary least squares on logs.
struct TempLawFit {
  double exponent = 0.0;
  double log_prefactor = 0.0;
  double exponent_sigma = 0.0;
  double log_prefactor_sigma = 0.0;
};

TempLawFit fit_temperature_law(const std::vector<TempPoint>& points);

}  // namespace relaxo::fit
