#include "relaxo/spin_model.hpp"

#include <cmath>
#include <complex>

#include "relaxo/errors.hpp"

namespace relaxo::spin {

namespace {

using Eigen::Matrix3cd;
using std::complex;

constexpr double kInvSqrt2 = 0.7071067811865475244;

// Spin-1 operators in the {|-1>, |0>, |+1>} basis (m ascending).
Matrix3cd spin_x() {
  Matrix3cd s = Matrix3cd::Zero();
  s(0, 1) = s(1, 0) = s(1, 2) = s(2, 1) = kInvSqrt2;
  return s;
}

Matrix3cd spin_y() {
  Matrix3cd s = Matrix3cd::Zero();
  const complex<double> i(0.0, 1.0);
  s(0, 1) = -i * kInvSqrt2;
  s(1, 0) = i * kInvSqrt2;
  s(1, 2) = -i * kInvSqrt2;
  s(2, 1) = i * kInvSqrt2;
  return s;
}

Matrix3cd spin_z() {
  Matrix3cd s = Matrix3cd::Zero();
  s(0, 0) = -1.0;
  s(2, 2) = 1.0;
  return s;
}

}  // namespace

void DefectParams::validate() const {
  if (!std::isfinite(d_gs_mhz) || d_gs_mhz <= 0.0)
    throw InvalidInput("d_gs_mhz must be finite and > 0");
  if (!std::isfinite(e_gs_mhz) || e_gs_mhz < 0.0)
    throw InvalidInput("e_gs_mhz must be finite and >= 0");
  if (!std::isfinite(g_factor) || g_factor <= 0.0)
    throw InvalidInput("g_factor must be finite and > 0");
  if (depth_nm && (!std::isfinite(*depth_nm) || *depth_nm <= 0.0))
    throw InvalidInput("depth_nm must be finite and > 0 when present");
}

void FieldConfig::validate() const {
  if (!std::isfinite(b_gauss) || b_gauss < 0.0)
    throw InvalidInput("b_gauss must be finite and >= 0");
  if (!std::isfinite(polar_rad) || !std::isfinite(azimuth_rad))
    throw InvalidInput("field angles must be finite");
}

Eigen::Matrix3cd build_hamiltonian(const DefectParams& params, const FieldConfig& field) {
  params.validate();
  field.validate();

  const Matrix3cd sx = spin_x();
  const Matrix3cd sy = spin_y();
  const Matrix3cd sz = spin_z();

  const double bz = field.b_gauss * std::cos(field.polar_rad);
  const double bperp = field.b_gauss * std::sin(field.polar_rad);
  const double bx = bperp * std::cos(field.azimuth_rad);
  const double by = bperp * std::sin(field.azimuth_rad);

  const double zeeman = params.g_factor * PhysicalConstants::bohr_mhz_per_gauss;

  Matrix3cd h = params.d_gs_mhz * (sz * sz - (2.0 / 3.0) * Matrix3cd::Identity());
  h += params.e_gs_mhz * (sx * sx - sy * sy);
  h += zeeman * (bx * sx + by * sy + bz * sz);
  return h;
}

SpinLevels spin_levels(const Eigen::Matrix3cd& hamiltonian) {
  if (!hamiltonian.allFinite()) throw InvalidInput("hamiltonian has non-finite entries");
  const double herm_defect = (hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff();
  if (herm_defect > 1e-9)
    throw InvalidInput("hamiltonian is not Hermitian within 1e-9");

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(hamiltonian);
  if (solver.info() != Eigen::Success)
    throw InvalidInput("eigensolve failed");

  SpinLevels levels;
  for (int i = 0; i < 3; ++i) {
    levels.energies_mhz[i] = solver.eigenvalues()(i);  // ascending by contract
    levels.states[i] = solver.eigenvectors().col(i);
  }
  return levels;
}

OdmrFrequencies odmr_frequencies(const DefectParams& params, const FieldConfig& field) {
  params.validate();
  field.validate();

  if (field.is_axial()) {
    // |0> stays an eigenstate at -2D/3; the |+-1> block has eigenvalues
    // D/3 +- sqrt(b^2 + E^2).
    const double b = params.g_factor * PhysicalConstants::bohr_mhz_per_gauss *
                     field.b_gauss * std::cos(field.polar_rad);
    const double split = std::hypot(b, params.e_gs_mhz);
    return {params.d_gs_mhz - split, params.d_gs_mhz + split};
  }

  const SpinLevels levels = spin_levels(build_hamiltonian(params, field));
  // Identify the |0>-like level by overlap with the bare |0> basis state.
  int zero_like = 0;
  double best = -1.0;
  for (int i = 0; i < 3; ++i) {
    const double overlap = std::norm(levels.states[i](1));
    if (overlap > best) {
      best = overlap;
      zero_like = i;
    }
  }
  double nu[2];
  int n = 0;
  for (int i = 0; i < 3; ++i)
    if (i != zero_like) nu[n++] = levels.energies_mhz[i] - levels.energies_mhz[zero_like];
  if (nu[0] > nu[1]) std::swap(nu[0], nu[1]);
  return {nu[0], nu[1]};
}

double dq_splitting_mhz(const DefectParams& params, const FieldConfig& field) {
  const OdmrFrequencies nu = odmr_frequencies(params, field);
  return nu.nu_plus_mhz - nu.nu_minus_mhz;
}

double depth_for_energy_nm(double implant_energy_kev) {
  // Anchor table from SRIM-derived most-probable depths.
  static constexpr double energies[] = {2.5, 5.0, 7.5};
  static constexpr double depths[] = {4.8, 9.2, 14.5};

  if (!std::isfinite(implant_energy_kev) || implant_energy_kev < energies[0] ||
      implant_energy_kev > energies[2])
    throw InvalidInput("implant energy outside table range [2.5, 7.5] keV");

  const int seg = implant_energy_kev <= energies[1] ? 0 : 1;
  const double t = (implant_energy_kev - energies[seg]) / (energies[seg + 1] - energies[seg]);
  return depths[seg] + t * (depths[seg + 1] - depths[seg]);
}

}  // namespace relaxo::spin
