#include "relaxo/noise_spectroscopy.hpp"

#include <algorithm>
#include <cmath>

#include "relaxo/errors.hpp"

namespace relaxo::noise {

void Susceptibility::validate() const {
  if (!std::isfinite(d_perp_over_h) || d_perp_over_h <= 0.0)
    throw InvalidInput("d_perp_over_h must be finite and > 0");
}

void NoiseSpectrum::validate() const {
  if (points.empty()) throw InvalidInput("spectrum must be non-empty");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].f_mhz > 0.0)) throw InvalidInput("frequencies must be > 0");
    if (points[i].sigma < 0.0) throw InvalidInput("sigma must be >= 0");
    if (i > 0 && points[i].f_mhz <= points[i - 1].f_mhz)
      throw InvalidInput("frequencies must be strictly ascending");
  }
}

double electric_noise(double gamma_khz, double gamma_inf_khz, const Susceptibility& sus) {
  sus.validate();
  // kHz -> Hz, divided by the squared susceptibility.
  return (gamma_khz - gamma_inf_khz) * 1e3 / (sus.d_perp_over_h * sus.d_perp_over_h);
}

NoiseSpectrum build_spectrum(std::vector<SpectrumEntry> entries, double gamma_inf_khz,
                             const Susceptibility& sus) {
  if (entries.empty()) throw InvalidInput("no spectrum entries");
  sus.validate();

  std::sort(entries.begin(), entries.end(),
            [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.f_mhz < b.f_mhz; });
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i].f_mhz == entries[i - 1].f_mhz)
      throw InvalidInput("duplicate frequency in spectrum entries");

  const double sigma_factor = 1e3 / (sus.d_perp_over_h * sus.d_perp_over_h);

  NoiseSpectrum spectrum;
  spectrum.points.reserve(entries.size());
  for (const auto& entry : entries) {
    NoisePoint point;
    point.f_mhz = entry.f_mhz;
    point.s_e_perp = electric_noise(entry.gamma_khz, gamma_inf_khz, sus);
    point.sigma = entry.sigma_khz * sigma_factor;
    point.unphysical = point.s_e_perp < 0.0;
    spectrum.points.push_back(point);
  }
  spectrum.validate();
  return spectrum;
}

SuppressionResult suppression(const NoiseSpectrum& raw, const NoiseSpectrum& coated) {
  raw.validate();
  coated.validate();
  if (raw.points.size() != coated.points.size())
    throw InvalidInput("spectra must have equal length");
  for (std::size_t i = 0; i < raw.points.size(); ++i)
    if (std::abs(raw.points[i].f_mhz - coated.points[i].f_mhz) > 1e-9)
      throw InvalidInput("frequency grids do not match");

  SuppressionResult result;
  result.percent.reserve(raw.points.size());
  double sum = 0.0;
  std::size_t included = 0;
  for (std::size_t i = 0; i < raw.points.size(); ++i) {
    if (raw.points[i].s_e_perp == 0.0) {
      result.percent.push_back(0.0);
      result.excluded.push_back(i);
      continue;
    }
    const double pct = 100.0 * (1.0 - coated.points[i].s_e_perp / raw.points[i].s_e_perp);
    result.percent.push_back(pct);
    sum += pct;
    ++included;
  }
  result.average = included > 0 ? sum / static_cast<double>(included) : 0.0;
  return result;
}

}  // namespace relaxo::noise
