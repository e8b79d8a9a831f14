#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>

namespace relaxo::spin {

/// Bohr magneton over Planck constant, in MHz per gauss.
struct PhysicalConstants {
  static constexpr double bohr_mhz_per_gauss = 1.3996245;
};

/// Static constants of one spin-1 defect ensemble. All frequencies are
/// ordinary (not angular) frequencies in MHz.
struct DefectParams {
  double d_gs_mhz = 3480.0;   ///< axial zero-field splitting D
  double e_gs_mhz = 48.0;     ///< transverse zero-field splitting E
  double g_factor = 2.0;      ///< Lande g-factor
  std::optional<double> depth_nm;  ///< implantation depth, when known
  std::string label;

  void validate() const;
};

/// External static magnetic field. polar_rad is measured from the defect
/// c-axis; azimuth_rad in the transverse plane.
struct FieldConfig {
  double b_gauss = 0.0;
  double polar_rad = 0.0;
  double azimuth_rad = 0.0;

  void validate() const;
  bool is_axial() const { return b_gauss == 0.0 || std::sin(polar_rad) == 0.0; }
};

/// Eigenstructure of the ground-state Hamiltonian: energies ascending,
/// states orthonormal, basis order {|-1>, |0>, |+1>}.
struct SpinLevels {
  std::array<double, 3> energies_mhz;
  std::array<Eigen::Vector3cd, 3> states;
};

/// Resulting |0>-to-upper-level transition frequencies, nu_minus <= nu_plus.
struct OdmrFrequencies {
  double nu_minus_mhz;
  double nu_plus_mhz;
};

/// Ground-state spin-1 Hamiltonian in the {|-1>, |0>, |+1>} basis:
///   H = D (Sz^2 - 2/3 I) + E (Sx^2 - Sy^2) + g (mu_B/h) B . S
/// All entries in MHz; the zero-field-splitting part is traceless.
Eigen::Matrix3cd build_hamiltonian(const DefectParams& params, const FieldConfig& field);

/// Eigendecomposition of a Hermitian 3x3 matrix (Hermitian within 1e-9,
/// else InvalidInput). Energies ascending.
SpinLevels spin_levels(const Eigen::Matrix3cd& hamiltonian);

/// Transition frequencies from the |0>-like level to each of the upper
/// levels. For axial fields the closed form D -+ sqrt(b^2 + E^2) is used
/// (b = g * mu_B/h * B); otherwise a general eigensolve.
OdmrFrequencies odmr_frequencies(const DefectParams& params, const FieldConfig& field);

/// Splitting between the two upper levels, nu_plus - nu_minus. At zero
/// field this is exactly 2E; for axial fields 2 sqrt(b^2 + E^2).
double dq_splitting_mhz(const DefectParams& params, const FieldConfig& field);

/// Most-probable defect depth for a nitrogen implantation energy, by
/// piecewise-linear interpolation over {2.5 keV -> 4.8 nm, 5 -> 9.2,
/// 7.5 -> 14.5}. No extrapolation outside [2.5, 7.5] keV.
double depth_for_energy_nm(double implant_energy_kev);

}  // namespace relaxo::spin
