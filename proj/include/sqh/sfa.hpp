#pragma once
#include <vector>

#include "sqh/grids.hpp"
#include "sqh/medium.hpp"
#include "sqh/simd.hpp"

namespace sqh {

// Memory suppression exponent xi(lag): zero for lag <= T0/2, rising linearly
// to 10 at lag = T0, infinite beyond. The sampled kernel k[j] = exp(-xi(j dt))
// therefore has compact support j <= W = T0/dt, which turns the continuum
// amplitude into a windowed correlation.
double memory_suppression(double lag_au, double period_au);

struct FilterKernel {
  std::vector<double> k;     // k[j] = exp(-xi(j*dt)), j = 0..W
  std::vector<double> khat;  // k with khat[0] halved (trapezoid endpoint)
  int W = 0;
};
// Requires T0/dt to be integral to within 1e-9 relative.
FilterKernel make_filter_kernel(double period_au, double dt_au);

// How the displacement of a harmonic vacuum mode driven by the electron
// velocity is evaluated.
enum class SigmaMethod {
  HighFrequency,   // sigma(t) = -v(t)/omega^2
  ExactRecursion,  // trapezoid-exact integral recursion
};

// Exact driven-mode displacement
//   sigma(t) = -(i/omega) int_{t0}^{t} v(t') exp(-i omega (t-t')) dt'
// accumulated by the recursion
//   sigma_{n+1} = E sigma_n - (i/omega)(dt/2)(E v_n + v_{n+1}),  E = e^{-i w dt}.
void mode_displacement_exact(const std::vector<double>& v, double dt_au,
                             double omega_au, std::vector<double>& sig_re,
                             std::vector<double>& sig_im);
// High-frequency closed form sigma(t) = -v(t)/omega^2 (imaginary part zero).
void mode_displacement_hf(const std::vector<double>& v, double omega_au,
                          std::vector<double>& sig_re,
                          std::vector<double>& sig_im);

// Everything the emission stage needs from a single momentum cell.
struct TrajectorySeries {
  std::vector<double> S;            // action phase (radians)
  std::vector<double> cosS, sinS;
  std::vector<double> d;            // dipole projection at kinetic momentum
  std::vector<double> Omega;        // d(p_t) * F(t)
  std::vector<double> v;            // (p_par + A)/m
  std::vector<double> b_re, b_im;   // continuum amplitude
  std::vector<double> G_re, G_im;   // recollision product Omega * b
};

// Action phase S(t) = int_{t0}^{t} (p_t^2/(2m) + gap) dt', cumulative
// trapezoid on the grid.
std::vector<double> action_phase(const MediumModel& m, const TimeGrid& tg,
                                 const std::vector<double>& A, double p_par,
                                 double p_perp);

// Continuum amplitude and derived series for one momentum cell:
//   b(t) = int_{t0}^{t} Omega(t') exp(i(S(t)-S(t'))) exp(-xi(t-t')) dt'
// evaluated as a windowed correlation with trapezoid endpoints.
TrajectorySeries compute_trajectory(const MediumModel& m, const TimeGrid& tg,
                                    const std::vector<double>& F,
                                    const std::vector<double>& A,
                                    const FilterKernel& filter, double p_par,
                                    double p_perp,
                                    const simd::Kernels& kernels);

struct SfaProblem {
  const MediumModel* medium = nullptr;
  TimeGrid tg;
  MomentumGrid mg;
  std::vector<double> F, A;  // sampled pulse (atomic units)
  FilterKernel filter;
  double omega_q_au = 0.0;   // squeezed-drive sideband frequency
  SigmaMethod sigma_q = SigmaMethod::HighFrequency;
  SigmaMethod sigma_kappa = SigmaMethod::HighFrequency;
  // Emission frequencies needing per-(p, omega) displacement series when
  // sigma_kappa == ExactRecursion (validation use; cost scales with size).
  std::vector<double> exact_kappa_omegas;
  int threads = 1;
};

// Momentum-space reductions, all series over the time grid:
//   x     = Int d3p  d(p_t) (b + b*)                 [dipole expectation]
//   gamma = Int d3p  Omega b                         [recollision amplitude]
//   kh    = Int d3p  v (Gamma + Gamma*)              [velocity-weighted]
//   xf    = Int d3p  sigma_q d (b - b*)              [sideband-dressed dipole]
//   kf    = Int d3p  sigma_q v Im(Gamma)
// The G-sideband counterparts follow from xg = -conj(xf), kg = conj(kf)
// because d(b - b*) is purely imaginary and v*Im(Gamma) is real; in exact
// sigma_kappa mode the per-frequency arrays below are also filled.
struct SfaReductions {
  std::vector<double> x;
  std::vector<double> gamma_re, gamma_im;
  std::vector<double> kh;
  std::vector<double> xf_re, xf_im;
  std::vector<double> kf_re, kf_im;
  // indexed [iw][it], iw over SfaProblem::exact_kappa_omegas
  std::vector<std::vector<double>> bh_re, bh_im;  // Int sigma_k (Gamma+cc)
  std::vector<std::vector<double>> bf_re, bf_im;  // Int sigma_q i sigma_k Im G
  std::vector<std::vector<double>> bg_re, bg_im;  // Int sigma_q* i sigma_k Im G
};

// Deterministic independent of thread count: momentum cells are grouped in
// fixed leaves of 128, each leaf accumulated sequentially, leaves combined
// by a fixed pairwise tree.
SfaReductions reduce_over_momentum(const SfaProblem& prob);

}  // namespace sqh
