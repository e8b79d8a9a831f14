#include "relaxo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "relaxo/errors.hpp"

namespace relaxo::synth {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

void AcquisitionConfig::validate() const {
  if (tau_grid_us.empty()) throw InvalidInput("tau_grid_us must be non-empty");
  for (std::size_t i = 0; i < tau_grid_us.size(); ++i) {
    if (!std::isfinite(tau_grid_us[i]) || tau_grid_us[i] < 0.0)
      throw InvalidInput("tau_grid_us entries must be finite and >= 0");
    if (i > 0 && tau_grid_us[i] <= tau_grid_us[i - 1])
      throw InvalidInput("tau_grid_us must be strictly increasing");
  }
  if (shots < 1) throw InvalidInput("shots must be >= 1");
  if (!std::isfinite(noise_scale) || noise_scale < 0.0)
    throw InvalidInput("noise_scale must be finite and >= 0");
}

void DecayCurve::validate() const {
  if (tau_us.size() != signal.size() || tau_us.size() != sigma.size())
    throw InvalidInput("decay curve columns must have equal length");
  for (std::size_t i = 0; i < tau_us.size(); ++i) {
    if (sigma[i] < 0.0) throw InvalidInput("sigma must be >= 0");
    if (i > 0 && tau_us[i] <= tau_us[i - 1])
      throw InvalidInput("tau_us must be strictly increasing");
  }
}

double model_value(CurveModel model, const rates::RateParams& rates,
                   const rates::ReadoutModel& readout, double tau_us) {
  switch (model) {
    case CurveModel::F1:
      return rates::f1_signal(rates, readout, tau_us);
    case CurveModel::F2:
      return rates::f2_signal(rates, readout, tau_us);
    case CurveModel::SingleExp:
      return readout.baseline +
             readout.amplitude * std::exp(-rates.omega_khz * tau_us * 1e-3);
  }
  throw InvalidInput("unknown curve model");
}

GaussianStream::GaussianStream(std::uint64_t seed, std::uint64_t stream) {
  // Decorrelate streams by pushing the stream index through the state
  // update before mixing with the user seed.
  std::uint64_t s = stream;
  for (int i = 0; i < 2; ++i) splitmix64(s);
  state_ = seed ^ splitmix64(s);
}

double GaussianStream::next() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  // 53-bit uniforms in (0,1]; u1 kept away from zero for the log.
  const double u1 = ((splitmix64(state_) >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = (splitmix64(state_) >> 11) * 0x1.0p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

DecayCurve generate_curve(CurveModel model, const rates::RateParams& rates,
                          const rates::ReadoutModel& readout, const AcquisitionConfig& acq,
                          std::uint64_t stream) {
  acq.validate();
  rates.validate();
  readout.validate();

  const double sigma = acq.noise_scale / std::sqrt(static_cast<double>(acq.shots));
  GaussianStream rng(acq.seed, stream);

  DecayCurve curve;
  curve.tau_us = acq.tau_grid_us;
  curve.signal.reserve(curve.tau_us.size());
  curve.sigma.assign(curve.tau_us.size(), sigma);
  for (double tau : curve.tau_us) {
    double value = model_value(model, rates, readout, tau);
    if (sigma > 0.0) value += sigma * rng.next();
    curve.signal.push_back(value);
  }
  return curve;
}

std::pair<DecayCurve, DecayCurve> paired_f1_f2(const rates::RateParams& rates,
                                               const rates::ReadoutModel& readout,
                                               const AcquisitionConfig& acq) {
  DecayCurve f1 = generate_curve(CurveModel::F1, rates, readout, acq, /*stream=*/0);
  DecayCurve f2 = generate_curve(CurveModel::F2, rates, readout, acq, /*stream=*/1);
  f1.meta = "protocol=F1";
  f2.meta = "protocol=F2";
  return {std::move(f1), std::move(f2)};
}

std::vector<double> default_tau_grid_us(const rates::RateParams& rates, int n_points) {
  rates.validate();
  if (n_points < 2) throw InvalidInput("tau grid needs at least 2 points");
  const double slowest_khz =
      std::min(3.0 * rates.omega_khz, rates.omega_khz + 2.0 * rates.gamma_khz);
  if (slowest_khz <= 0.0) throw InvalidInput("rates give no decay to resolve");

  const double tau_min = 0.1;
  const double tau_max = 5.0 * 1e3 / slowest_khz;
  std::vector<double> grid(n_points);
  const double log_step = std::log(tau_max / tau_min) / (n_points - 1);
  for (int i = 0; i < n_points; ++i) grid[i] = tau_min * std::exp(i * log_step);
  grid.back() = tau_max;  // exact endpoint
  return grid;
}

}  // namespace relaxo::synth
