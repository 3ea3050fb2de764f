#pragma once
#include <complex>
#include <vector>

#include "sqh/emission.hpp"
#include "sqh/grids.hpp"

namespace sqh {

// Bright-squeezed-vacuum drive description.
struct BsvParameters {
  double r = 0.0;            // squeezing parameter
  double theta = 0.0;        // squeezing phase
  double omega_q_SI = 0.0;   // sideband angular frequency (rad/s)
  double waist_m = 0.0;      // beam waist w_q
  double bandwidth_m = 0.0;  // wavelength bandwidth of the squeezed drive
  double mode_volume_density() const;  // bandwidth/(waist*wavelength)^2, 1/m^3
};

// r from pulse energy: mean photon number sinh^2 r = E_pulse/(hbar w_q).
double squeezing_from_pulse_energy(double energy_J, double omega_q_SI);

// Phase-matched macroscopic response of a sheet of N0 emitters with beam
// waist w_k and interaction length l_i: the one-photon spectral photon
// density is dn/dw = C * |H(w)|^2 with C = (N0 w_k l_i)^2 V / (2c).
struct MacroscopicGeometry {
  double density_per_m3 = 0.0;  // N0
  double waist_m = 0.0;         // w_k
  double length_m = 0.0;        // l_i
  // (N0 w_k l_i)^2/(2c); multiply by V for the one-photon constant.
  double response_constant() const;
};

// Per-harmonic-band integrated photon numbers and sideband couplings.
struct BandReport {
  int N = 0;                       // harmonic order
  double n_classical = 0.0;        // band photons from |H|^2
  double n_sideband = 0.0;         // band photons cosh^2 r * |zeta_N|^2
  double zeta2 = 0.0;              // |zeta_N|^2
  std::complex<double> zeta;       // complex band coupling (phase at band peak)
};

struct SpectralResult {
  std::vector<double> omega_au;
  std::vector<double> dn_classical;  // spectral photon density, per rad/s
  std::vector<double> dn_sideband;
  std::vector<BandReport> bands;
  double theta = 0.0;
};

// zeta(w) = F(w) - G(w) tanh(r) e^{i theta}; |zeta_N|^2 is its band integral
// weighted by the sideband response constant
//   Cq = (N0 w_k l_i)^2/(2c) * V^2 * mode_volume_density,
// and the band photon number is cosh^2 r * |zeta_N|^2. The complex zeta_N
// carries the phase of zeta(w) at the in-band peak of |zeta(w)|^2
// (convention; only |zeta_N|^2 enters photon numbers).
SpectralResult macroscopic_spectrum(const EmissionSpectra& em,
                                    const FrequencyGrid& fg,
                                    const MacroscopicGeometry& geom,
                                    const BsvParameters& bsv);

// Photon numbers per band for a scan over squeezing phases, reusing the
// same emission spectra (only zeta is reassembled).
struct ThetaScan {
  std::vector<double> thetas;
  // [itheta][iband] photon numbers, bands as in SpectralResult.
  std::vector<std::vector<double>> n_sideband;
  std::vector<double> average;  // arithmetic mean over thetas per band
};
ThetaScan theta_scan(const EmissionSpectra& em, const FrequencyGrid& fg,
                     const MacroscopicGeometry& geom, const BsvParameters& bsv,
                     int n_theta);

// Weak-field susceptibility scaling I0/(8 omega0^5 m^2): useful only in
// ratios between media/drives. Inputs in any consistent unit system.
double susceptibility_scaling(double intensity, double omega0, double mass);

}  // namespace sqh
