#include "relaxo/rate_dynamics.hpp"

#include <cmath>

#include "relaxo/errors.hpp"

namespace relaxo::rates {

namespace {

constexpr double kKhzUsToExponent = 1e-3;

Eigen::Vector3d as_vector(const Populations& p) {
  return {p.p_minus, p.p_zero, p.p_plus};
}

Populations as_populations(const Eigen::Vector3d& v) {
  return {v(0), v(1), v(2)};
}

// Mix a perfect |0> <-> |target> swap with identity according to fidelity.
Populations apply_pi(const Populations& p, bool plus, double fidelity) {
  Populations swapped = p;
  if (plus)
    std::swap(swapped.p_zero, swapped.p_plus);
  else
    std::swap(swapped.p_zero, swapped.p_minus);
  return {(1.0 - fidelity) * p.p_minus + fidelity * swapped.p_minus,
          (1.0 - fidelity) * p.p_zero + fidelity * swapped.p_zero,
          (1.0 - fidelity) * p.p_plus + fidelity * swapped.p_plus};
}

}  // namespace

void RateParams::validate() const {
  if (!std::isfinite(omega_khz) || omega_khz < 0.0)
    throw InvalidInput("omega_khz must be finite and >= 0");
  if (!std::isfinite(gamma_khz) || gamma_khz < 0.0)
    throw InvalidInput("gamma_khz must be finite and >= 0");
}

void Populations::validate() const {
  const double sum = p_minus + p_zero + p_plus;
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidInput("populations must sum to 1");
  for (double p : {p_minus, p_zero, p_plus})
    if (p < -1e-9 || p > 1.0 + 1e-9) throw InvalidInput("populations must lie in [0, 1]");
}

void ReadoutModel::validate() const {
  if (!std::isfinite(amplitude) || amplitude <= 0.0)
    throw InvalidInput("readout amplitude must be > 0");
  if (!std::isfinite(baseline)) throw InvalidInput("readout baseline must be finite");
  if (!(pulse_fidelity >= 0.0 && pulse_fidelity <= 1.0))
    throw InvalidInput("pulse_fidelity must lie in [0, 1]");
}

Eigen::Matrix3d rate_generator(const RateParams& rates) {
  rates.validate();
  const double w = rates.omega_khz;
  const double g = rates.gamma_khz;
  Eigen::Matrix3d gen;
  gen << -(w + g), w, g,
         w, -2.0 * w, w,
         g, w, -(w + g);
  return gen;
}

Populations evolve_analytic(const Populations& p, const RateParams& rates, double tau_us) {
  rates.validate();
  if (!(tau_us >= 0.0)) throw InvalidInput("tau_us must be >= 0");

  // Orthogonal modes of the symmetric generator:
  //   (1,1,1)  eigenvalue 0
  //   (1,-2,1) eigenvalue -3*omega
  //   (1,0,-1) eigenvalue -(omega + 2*gamma)
  const double total = p.p_minus + p.p_zero + p.p_plus;
  const double c_sym = (p.p_minus - 2.0 * p.p_zero + p.p_plus) / 6.0;
  const double c_asym = (p.p_minus - p.p_plus) / 2.0;

  const double e_sym = std::exp(-3.0 * rates.omega_khz * tau_us * kKhzUsToExponent);
  const double e_asym =
      std::exp(-(rates.omega_khz + 2.0 * rates.gamma_khz) * tau_us * kKhzUsToExponent);

  return {total / 3.0 + c_sym * e_sym + c_asym * e_asym,
          total / 3.0 - 2.0 * c_sym * e_sym,
          total / 3.0 + c_sym * e_sym - c_asym * e_asym};
}

Populations evolve_numeric(const Populations& p, const RateParams& rates, double tau_us,
                           double step_us) {
  if (!(step_us > 0.0)) throw InvalidInput("step_us must be > 0");
  if (!(tau_us >= 0.0)) throw InvalidInput("tau_us must be >= 0");

  const Eigen::Matrix3d gen = rate_generator(rates) * kKhzUsToExponent;  // per us
  Eigen::Vector3d v = as_vector(p);

  double t = 0.0;
  while (t < tau_us) {
    const double h = std::min(step_us, tau_us - t);
    const Eigen::Vector3d k1 = gen * v;
    const Eigen::Vector3d k2 = gen * (v + 0.5 * h * k1);
    const Eigen::Vector3d k3 = gen * (v + 0.5 * h * k2);
    const Eigen::Vector3d k4 = gen * (v + h * k3);
    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return as_populations(v);
}

double simulate_protocol(const Protocol& protocol, const RateParams& rates,
                         const ReadoutModel& readout, double tau_us) {
  readout.validate();

  Populations p{0.0, 1.0, 0.0};  // perfect polarization into |0>
  if (protocol.init == InitPulse::PiPlus)
    p = apply_pi(p, true, readout.pulse_fidelity);
  else if (protocol.init == InitPulse::PiMinus)
    p = apply_pi(p, false, readout.pulse_fidelity);

  p = evolve_analytic(p, rates, tau_us);

  if (protocol.read == ReadPulse::PiPlus)
    p = apply_pi(p, true, readout.pulse_fidelity);
  else if (protocol.read == ReadPulse::PiMinus)
    p = apply_pi(p, false, readout.pulse_fidelity);

  return readout.baseline + readout.amplitude * p.p_zero;
}

double f1_signal(const RateParams& rates, const ReadoutModel& readout, double tau_us) {
  const double s_ref =
      simulate_protocol({InitPulse::PolarizeOnly, ReadPulse::Direct, "F1 ref"}, rates,
                        readout, tau_us);
  const double s_swap = simulate_protocol({InitPulse::PiPlus, ReadPulse::Direct, "F1 swap"},
                                          rates, readout, tau_us);
  return s_ref - s_swap;
}

double f2_signal(const RateParams& rates, const ReadoutModel& readout, double tau_us) {
  const double s_same = simulate_protocol({InitPulse::PiPlus, ReadPulse::PiPlus, "F2 same"},
                                          rates, readout, tau_us);
  const double s_cross = simulate_protocol({InitPulse::PiPlus, ReadPulse::PiMinus, "F2 cross"},
                                           rates, readout, tau_us);
  return s_same - s_cross;
}

double t1_full_us(const RateParams& rates) {
  rates.validate();
  const double total_khz = 3.0 * rates.omega_khz + rates.gamma_khz;
  if (total_khz <= 0.0) throw UndefinedRate("3*omega + gamma must be > 0");
  return 1e3 / total_khz;
}

double t1_conventional_us(const RateParams& rates) {
  rates.validate();
  if (rates.omega_khz <= 0.0) throw UndefinedRate("omega must be > 0");
  return 1e3 / (3.0 * rates.omega_khz);
}

}  // namespace relaxo::rates
