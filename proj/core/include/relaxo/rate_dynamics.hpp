#pragma once

#include <Eigen/Dense>
#include <string>

namespace relaxo::rates {

/// The two relaxation rates driving the three-level dynamics, in kHz.
/// omega is the single-quantum rate between |0> and each of |+-1>;
/// gamma the double-quantum rate between |+1> and |-1>.
struct RateParams {
  double omega_khz = 0.0;
  double gamma_khz = 0.0;

  void validate() const;
};

/// Level populations in the {|-1>, |0>, |+1>} order.
struct Populations {
  double p_minus = 0.0;
  double p_zero = 1.0;
  double p_plus = 0.0;

  void validate() const;
};

enum class InitPulse { PolarizeOnly, PiPlus, PiMinus };
enum class ReadPulse { Direct, PiPlus, PiMinus };

/// One pulse-sequence variant: polarize, optional init pi pulse, free
/// evolution, optional read pi pulse, photoluminescence readout.
struct Protocol {
  InitPulse init = InitPulse::PolarizeOnly;
  ReadPulse read = ReadPulse::Direct;
  std::string label;
};

/// Linear readout: signal = baseline + amplitude * p_zero after the read
/// pulse. pulse_fidelity interpolates every pi pulse between a perfect
/// population swap (1) and the identity (0).
struct ReadoutModel {
  double amplitude = 1.0;
  double baseline = 0.0;
  double pulse_fidelity = 1.0;

  void validate() const;
};

/// Generator G of dp/dt = G p, in kHz, populations ordered
/// {p_minus, p_zero, p_plus}. Columns sum to zero; the uniform vector is
/// a fixed point. Nonzero eigenvalues are -3*omega and -(omega+2*gamma).
Eigen::Matrix3d rate_generator(const RateParams& rates);

/// Exact evolution over tau microseconds via the three decay modes.
/// Exponents are rate[kHz] * tau[us] * 1e-3.
Populations evolve_analytic(const Populations& p, const RateParams& rates, double tau_us);

/// Fixed-step RK4 integration of the same generator; cross-check for the
/// analytic path.
Populations evolve_numeric(const Populations& p, const RateParams& rates, double tau_us,
                           double step_us);

double simulate_protocol(const Protocol& protocol, const RateParams& rates,
                         const ReadoutModel& readout, double tau_us);

/// Baseline-cancelling difference signals. At unit pulse fidelity,
/// f1 = amplitude * exp(-3*omega*tau) and
/// f2 = amplitude * exp(-(omega + 2*gamma)*tau).
double f1_signal(const RateParams& rates, const ReadoutModel& readout, double tau_us);
double f2_signal(const RateParams& rates, const ReadoutModel& readout, double tau_us);

/// Full relaxation time 1/(3*omega + gamma), in microseconds.
double t1_full_us(const RateParams& rates);
/// Conventional relaxation time 1/(3*omega), ignoring the DQ channel.
double t1_conventional_us(const RateParams& rates);

}  // namespace relaxo::rates
