#pragma once
#include <complex>
#include <vector>

#include "sqh/grids.hpp"
#include "sqh/sfa.hpp"

namespace sqh {

// Spectral emission amplitudes at each frequency of the emission grid.
//   H(w_k): one-photon (classical-drive) emission amplitude
//   F(w_k): sideband up-conversion amplitude   (transform at w_k + w_q)
//   G(w_k): sideband down-conversion amplitude (transform at w_k - w_q)
// All dimensionless in SI after the vacuum-field prefactors; V is the
// quantization volume (cancels in physical reports).
struct EmissionSpectra {
  std::vector<double> omega_au;        // emission grid (atomic units)
  std::vector<std::complex<double>> H;
  std::vector<std::complex<double>> F;
  std::vector<std::complex<double>> G;
  double omega_q_au = 0.0;
  double volume_m3 = 1.0;
};

struct EmissionOptions {
  double volume_m3 = 1.0;
  SigmaMethod sigma_kappa = SigmaMethod::HighFrequency;
};

// Assemble the spectra from momentum-space reductions.
//
//   H(w_k) = -(e Ev(w_k)/hbar) * T[x - kh/w_k^2](w_k)
//   F(w_k) = +(e/hbar)^2 Ev(w_k)Ev(w_q) * T[xf - (i/w_k^2) kf](w_k + w_q)
//   G(w_k) = +(e/hbar)^2 Ev(w_k)Ev(w_q) * T[-xf* - (i/w_k^2) kf*](w_k - w_q)
//
// with T[y](w) = dt * sum_n wt_n y(t_n) e^{i w t_n} (trapezoid-weighted
// transform) and Ev(w) = sqrt(hbar w/(2 eps0 V)). In exact sigma_kappa mode
// the -/w_k^2 terms are replaced by the per-frequency reduction arrays, which
// must have been produced for exactly the same frequency list.
//
// Requires the emission grid to stay below the time-grid Nyquist frequency
// (including the +w_q shift); throws ConfigError otherwise.
EmissionSpectra assemble_emission(const SfaReductions& red, const TimeGrid& tg,
                                  const FrequencyGrid& fg, double omega_q_au,
                                  const EmissionOptions& opt,
                                  const simd::Kernels& kernels);

}  // namespace sqh
