#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace relaxo::noise {

/// Ground-state transverse electric-field susceptibility, Hz m/V.
struct Susceptibility {
  double d_perp_over_h = 0.4;

  void validate() const;
};

/// One spectral point: splitting frequency and transverse electric-field
/// noise intensity in (V/m)^2/Hz.
struct NoisePoint {
  double f_mhz = 0.0;
  double s_e_perp = 0.0;
  double sigma = 0.0;
  bool unphysical = false;  ///< excess rate was negative; value kept as-is
};

struct NoiseSpectrum {
  std::vector<NoisePoint> points;  ///< strictly ascending in f
  std::string meta;

  void validate() const;
};

struct SpectrumEntry {
  double f_mhz;
  double gamma_khz;
  double sigma_khz;
};

/// Converts an excess DQ rate to noise intensity:
///   S = (gamma - gamma_inf) * 1e3 / (d_perp/h)^2
/// with the rate in Hz. Negative excess yields a negative value (the
/// caller flags it, nothing is clamped).
double electric_noise(double gamma_khz, double gamma_inf_khz, const Susceptibility& sus);

/// Per-point conversion with linear sigma propagation, sorted ascending
/// in frequency. Duplicate frequencies are rejected.
NoiseSpectrum build_spectrum(std::vector<SpectrumEntry> entries, double gamma_inf_khz,
                             const Susceptibility& sus);

struct SuppressionResult {
  std::vector<double> percent;          ///< per-point 100*(1 - coated/raw)
  double average = 0.0;                 ///< unweighted mean over included points
  std::vector<std::size_t> excluded;    ///< indices where raw == 0
};

/// Point-by-point noise suppression of a coated spectrum relative to the
/// raw one. Grids must match within 1e-9 MHz.
SuppressionResult suppression(const NoiseSpectrum& raw, const NoiseSpectrum& coated);

}  // namespace relaxo::noise
