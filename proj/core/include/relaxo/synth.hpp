#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "relaxo/rate_dynamics.hpp"

namespace relaxo::synth {

/// Synthetic acquisition settings. noise_scale is the per-point standard
/// deviation at one shot; the effective sigma is noise_scale/sqrt(shots).
struct AcquisitionConfig {
  std::vector<double> tau_grid_us;
  int shots = 1;
  double noise_scale = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// A (tau, signal, sigma) dataset, measured or synthetic.
struct DecayCurve {
  std::vector<double> tau_us;
  std::vector<double> signal;
  std::vector<double> sigma;
  std::string meta;

  void validate() const;
  std::size_t size() const { return tau_us.size(); }
};

enum class CurveModel { F1, F2, SingleExp };

/// Noise-free model value at one delay. SingleExp decays at the bare
/// omega_khz rate: baseline + amplitude * exp(-omega * tau).
double model_value(CurveModel model, const rates::RateParams& rates,
                   const rates::ReadoutModel& readout, double tau_us);

/// Deterministic Gaussian stream: SplitMix64 uniforms keyed by
/// (seed, stream), normal deviates by Box-Muller on 53-bit mantissas.
/// Fully specified, so output is bit-identical across platforms.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream);
  double next();

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Synthesizes one decay curve: model(tau_i) plus independent zero-mean
/// Gaussian noise of standard deviation noise_scale/sqrt(shots).
DecayCurve generate_curve(CurveModel model, const rates::RateParams& rates,
                          const rates::ReadoutModel& readout, const AcquisitionConfig& acq,
                          std::uint64_t stream = 0);

/// F1 and F2 curves on a shared tau grid with independent noise streams
/// derived from the same seed.
std::pair<DecayCurve, DecayCurve> paired_f1_f2(const rates::RateParams& rates,
                                               const rates::ReadoutModel& readout,
                                               const AcquisitionConfig& acq);

/// 32 log-spaced delays from 0.1 us to five times the slowest decay time.
std::vector<double> default_tau_grid_us(const rates::RateParams& rates, int n_points = 32);

}  // namespace relaxo::synth
