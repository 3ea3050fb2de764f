#pragma once
#include <cstddef>
#include <vector>

namespace sqh {

struct LaserPulse;

// Uniform simulation time grid (atomic units). Immutable once built.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  int n = 0;

  double t(int i) const { return t0 + dt * i; }
  double t_end() const { return t(n - 1); }
  std::vector<double> samples() const;
};

// Default grid for a pulse: symmetric about the envelope peak, extends until
// the envelope falls below `envelope_floor` of its peak on both sides, with
// dt = T0 / (4 * n_max_order) (at least four samples per period of the
// highest reported harmonic). Throws ConfigError when an explicit span is
// too short to contain the pulse at the floor.
TimeGrid make_time_grid(const LaserPulse& pulse, int n_max_order,
                        double envelope_floor = 1e-8);
TimeGrid make_time_grid_explicit(const LaserPulse& pulse, int n_max_order,
                                 double t_begin, double t_end,
                                 double envelope_floor = 1e-8);

// Cylindrical momentum grid: p_par uniform over [-p_par_max, p_par_max]
// (n_par points), p_perp uniform over [0, p_perp_max] (n_perp points).
// weight(i,j) carries the full 3D volume element 2*pi*p_perp * trapezoid
// weights of both axes, so sums over (i,j) approximate integrals d^3p.
struct MomentumGrid {
  double p_par_max = 0.0;
  double p_perp_max = 0.0;
  int n_par = 0;
  int n_perp = 0;

  double p_par(int i) const;
  double p_perp(int j) const;
  double weight(int i, int j) const;
  int points() const { return n_par * n_perp; }
};

MomentumGrid make_momentum_grid(double p_par_max, double p_perp_max, int n_par,
                                int n_perp);

// Emission frequency grid: harmonic orders 0.5 .. n_max + 0.5 in steps of
// 1/points_per_order of the fundamental, so band edges (N +- 1/2) omega0 are
// exactly on-grid. omega(j) = (0.5 + j/points_per_order) * omega0.
struct FrequencyGrid {
  double omega0_au = 0.0;
  int n_max_order = 0;
  int points_per_order = 32;

  int size() const { return n_max_order * points_per_order + 1; }
  double omega(int j) const {
    return (0.5 + static_cast<double>(j) / points_per_order) * omega0_au;
  }
  double domega() const { return omega0_au / points_per_order; }
  // Index range [first, last] (inclusive) covering band N.
  int band_first(int N) const { return (N - 1) * points_per_order; }
  int band_last(int N) const { return N * points_per_order; }
};

FrequencyGrid make_frequency_grid(double omega0_au, int n_max_order,
                                  int points_per_order = 32);

// Trapezoid integral of samples y on a uniform grid with spacing dx.
double trapezoid(const std::vector<double>& y, double dx);
// Cumulative trapezoid antiderivative, out[0] = 0.
void cumulative_trapezoid(const double* y, int n, double dx, double* out);

}  // namespace sqh
