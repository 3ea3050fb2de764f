#pragma once
#include <complex>
#include <vector>

#include "sqh/fockspace.hpp"

namespace sqh {

// Phase-space grid for Wigner maps; x is the theta=0 quadrature, p the
// theta=pi/2 one, with vacuum variance 1/4 in each.
struct PhaseSpaceGrid {
  double x_min = -4, x_max = 4;
  double p_min = -4, p_max = 4;
  int nx = 129, np = 129;
  double x(int i) const { return x_min + (x_max - x_min) * i / (nx - 1); }
  double p(int j) const { return p_min + (p_max - p_min) * j / (np - 1); }
  double dx() const { return (x_max - x_min) / (nx - 1); }
  double dp() const { return (p_max - p_min) / (np - 1); }
};

// Hermitian density matrix in the Fock basis, rho[n * dim + n'].
struct DensityMatrix {
  int dim = 0;
  std::vector<std::complex<double>> rho;
  static DensityMatrix pure(const FockState& s);
  // Equal-weight (or weighted) mixture of pure states.
  static DensityMatrix mixture(const std::vector<FockState>& states);
};

// W(x, p) = (2/pi) sum_{n,n'} rho_{n n'} (-1)^n D_{n' n}(2 gamma),
// gamma = x + i p, where D(beta) is the displacement operator matrix. The
// elements are generated along diagonals n' - n = const by a forward-stable
// three-term recurrence written directly in the bounded values |D| <= 1,
// with power-of-two exponent tracking, so the evaluation stays finite and
// accurate for any grid and basis size.
double wigner_point(const DensityMatrix& rho, double x, double p);
double wigner_point(const FockState& state, double x, double p);

// Row-major field out[j * nx + i] = W(x_i, p_j).
std::vector<double> wigner_field(const DensityMatrix& rho,
                                 const PhaseSpaceGrid& grid);
std::vector<double> wigner_field(const FockState& state,
                                 const PhaseSpaceGrid& grid);

// Grid integral of the field (trapezoid in both axes).
double wigner_norm(const std::vector<double>& field,
                   const PhaseSpaceGrid& grid);

// Grid sized per axis from the state's quadrature variances: each half-extent
// is pad * sigma + 1.0, so squeezed states are both covered and resolved.
PhaseSpaceGrid adaptive_grid(const FockState& state, int nx = 129,
                             double pad = 1.6);

// ---- interference washout under photon-number resolution -------------------

struct WashoutOptions {
  // Fringe window half-width in quadrature units; the interference pattern
  // of the conditional states lives within a few vacuum widths of the
  // origin.
  double window = 1.5;
  int samples = 301;
  bool even_only = false;  // average only outcomes sharing parity with l
};

struct WashoutCurve {
  std::vector<int> delta_l;       // 0 .. delta_l_max
  std::vector<double> modulation; // max-min of the averaged fringe slice
  std::vector<double> ratio;      // modulation normalized to delta_l = 0
};

// Average the conditional-state Wigner functions over measured drive photon
// numbers l' in [l, l + delta_l] (equal weights) and report the fringe
// modulation (max - min over the central window of the slice along the
// fringe axis) as a function of delta_l. Linearity of the Wigner transform
// lets per-outcome slices be cached, so the full curve costs one slice per
// outcome. The fringe axis is x when Re[alpha_N] >= 0, else p.
WashoutCurve washout_curve(const SidebandCoupling& sc, long long l,
                           int delta_l_max, const WashoutOptions& opt,
                           const ProjectionOptions& popt = {});

}  // namespace sqh
