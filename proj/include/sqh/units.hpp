#pragma once
#include <cmath>

// Physical constants (CODATA 2018) and conversions between SI and Hartree
// atomic units. All dynamical kernels work in atomic units (hbar = |e| =
// m_e = 1, masses in units of m_e); the boundary layers — configuration
// input, emitted-field prefactors, reports — convert through this header.
namespace sqh::units {

inline constexpr double pi = 3.141592653589793238462643383279502884;

// SI values of the defining constants.
inline constexpr double c_SI    = 299792458.0;        // m/s (exact)
inline constexpr double hbar_SI = 1.054571817e-34;    // J s
inline constexpr double e_SI    = 1.602176634e-19;    // C (exact)
inline constexpr double me_SI   = 9.1093837015e-31;   // kg
inline constexpr double eps0_SI = 8.8541878128e-12;   // F/m
inline constexpr double a0_SI   = 5.29177210903e-11;  // m   (Bohr radius)
inline constexpr double Eh_SI   = 4.3597447222071e-18;// J   (Hartree)

// Derived atomic-unit sizes in SI.
inline constexpr double time_au_SI     = hbar_SI / Eh_SI;          // s
inline constexpr double field_au_SI    = Eh_SI / (e_SI * a0_SI);   // V/m
inline constexpr double momentum_au_SI = hbar_SI / a0_SI;          // kg m/s
inline constexpr double velocity_au_SI = a0_SI * Eh_SI / hbar_SI;  // m/s
inline constexpr double eV_SI          = e_SI;                     // J per eV

// Transition-dipole constants carry medium-dependent units:
//  - bound-atom form d(p) = d0 * p / (p^2/2m + E0)^3:
//      [d0] = length * momentum^{-5/2} * energy^3
//  - two-band solid form d(p) = d0 * Eg / (Eg + p^2/2m*):
//      [d0] = length * momentum^{-3/2}
inline const double dipole_atom_au_SI =
    a0_SI * Eh_SI * Eh_SI * Eh_SI / std::pow(momentum_au_SI, 2.5);
inline const double dipole_solid_au_SI =
    a0_SI / std::pow(momentum_au_SI, 1.5);

// --- conversions into atomic units -----------------------------------------

inline double energy_au_from_eV(double ev) { return ev * eV_SI / Eh_SI; }
inline double omega_au_from_wavelength_m(double lambda_m) {
  return (2.0 * pi * c_SI / lambda_m) * time_au_SI;
}
inline double wavelength_m_from_omega_au(double w_au) {
  return 2.0 * pi * c_SI * time_au_SI / w_au;
}
inline double field_au_from_V_per_m(double f) { return f / field_au_SI; }

// Cycle-averaged plane-wave intensity convention I = (1/2) eps0 c F^2.
inline double field_V_per_m_from_intensity_W_per_cm2(double I_W_cm2) {
  return std::sqrt(2.0 * (I_W_cm2 * 1e4) / (eps0_SI * c_SI));
}
inline double intensity_W_per_cm2_from_field_V_per_m(double F) {
  return 0.5 * eps0_SI * c_SI * F * F * 1e-4;
}

// --- conversions out of atomic units ---------------------------------------

inline double omega_SI_from_au(double w_au) { return w_au / time_au_SI; }
inline double time_SI_from_au(double t_au) { return t_au * time_au_SI; }
inline double energy_eV_from_au(double e_au) { return e_au * Eh_SI / eV_SI; }

// Photon energy (J) at SI angular frequency.
inline double photon_energy_J(double omega_SI) { return hbar_SI * omega_SI; }

// Vacuum field amplitude sqrt(hbar*omega / (2 eps0 V)) in V/m for the
// quantization volume V (m^3).
inline double vacuum_field_V_per_m(double omega_SI, double volume_m3) {
  return std::sqrt(hbar_SI * omega_SI / (2.0 * eps0_SI * volume_m3));
}

}  // namespace sqh::units
