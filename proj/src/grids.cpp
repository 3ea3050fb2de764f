#include "sqh/grids.hpp"

#include <cmath>
#include <string>

#include "sqh/errors.hpp"
#include "sqh/pulse.hpp"
#include "sqh/units.hpp"

namespace sqh {

std::vector<double> TimeGrid::samples() const {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = t(i);
  return out;
}

namespace {

double grid_dt(const LaserPulse& pulse, int n_max_order) {
  if (n_max_order < 1) throw ConfigError("time grid: n_max_order must be >= 1");
  // At least four samples per period of the highest reported harmonic.
  return pulse.period_au() / (4.0 * n_max_order);
}

double envelope_half_span(const LaserPulse& pulse, double envelope_floor) {
  if (!(envelope_floor > 0.0) || envelope_floor >= 1.0) {
    throw ConfigError("time grid: envelope floor must be in (0, 1)");
  }
  if (pulse.flat_envelope) {
    throw ConfigError(
        "time grid: a flat-envelope pulse has no natural span; use "
        "make_time_grid_explicit");
  }
  return pulse.tau_au * std::sqrt(-std::log(envelope_floor));
}

}  // namespace

TimeGrid make_time_grid(const LaserPulse& pulse, int n_max_order,
                        double envelope_floor) {
  const double dt = grid_dt(pulse, n_max_order);
  const double half = envelope_half_span(pulse, envelope_floor);
  const int half_steps = static_cast<int>(std::ceil(half / dt));
  TimeGrid g;
  g.dt = dt;
  g.n = 2 * half_steps + 1;  // symmetric about the envelope peak
  g.t0 = -dt * half_steps;
  return g;
}

TimeGrid make_time_grid_explicit(const LaserPulse& pulse, int n_max_order,
                                 double t_begin, double t_end,
                                 double envelope_floor) {
  const double dt = grid_dt(pulse, n_max_order);
  if (!(t_end > t_begin)) throw ConfigError("time grid: empty span");
  if (!pulse.flat_envelope) {
    const double need = pulse.tau_au * std::sqrt(-std::log(envelope_floor));
    if (t_begin > -need || t_end < need) {
      throw ConfigError(
          "time grid: span [" + std::to_string(t_begin) + ", " +
          std::to_string(t_end) +
          "] does not contain the pulse down to the envelope floor (needs +-" +
          std::to_string(need) + " au)");
    }
  }
  TimeGrid g;
  g.dt = dt;
  g.t0 = t_begin;
  g.n = static_cast<int>(std::ceil((t_end - t_begin) / dt - 1e-9)) + 1;
  return g;
}

double MomentumGrid::p_par(int i) const {
  return -p_par_max + 2.0 * p_par_max * i / (n_par - 1);
}

double MomentumGrid::p_perp(int j) const {
  return p_perp_max * j / (n_perp - 1);
}

double MomentumGrid::weight(int i, int j) const {
  const double dpar = 2.0 * p_par_max / (n_par - 1);
  const double dperp = p_perp_max / (n_perp - 1);
  const double wpar = (i == 0 || i == n_par - 1) ? 0.5 * dpar : dpar;
  const double wperp = (j == 0 || j == n_perp - 1) ? 0.5 * dperp : dperp;
  return 2.0 * units::pi * p_perp(j) * wpar * wperp;
}

MomentumGrid make_momentum_grid(double p_par_max, double p_perp_max, int n_par,
                                int n_perp) {
  if (!(p_par_max > 0) || !(p_perp_max > 0)) {
    throw ConfigError("momentum grid: extents must be positive");
  }
  if (n_par < 3 || n_perp < 2) {
    throw ConfigError("momentum grid: need n_par >= 3 and n_perp >= 2");
  }
  MomentumGrid g;
  g.p_par_max = p_par_max;
  g.p_perp_max = p_perp_max;
  g.n_par = n_par;
  g.n_perp = n_perp;
  return g;
}

FrequencyGrid make_frequency_grid(double omega0_au, int n_max_order,
                                  int points_per_order) {
  if (!(omega0_au > 0)) throw ConfigError("frequency grid: omega0 must be positive");
  if (n_max_order < 1) throw ConfigError("frequency grid: n_max_order must be >= 1");
  if (points_per_order < 2 || points_per_order % 2 != 0) {
    throw ConfigError(
        "frequency grid: points_per_order must be even and >= 2 so band "
        "edges are on-grid");
  }
  FrequencyGrid g;
  g.omega0_au = omega0_au;
  g.n_max_order = n_max_order;
  g.points_per_order = points_per_order;
  return g;
}

double trapezoid(const std::vector<double>& y, double dx) {
  const size_t n = y.size();
  if (n < 2) return 0.0;
  double acc = 0.5 * (y[0] + y[n - 1]);
  for (size_t i = 1; i + 1 < n; ++i) acc += y[i];
  return acc * dx;
}

void cumulative_trapezoid(const double* y, int n, double dx, double* out) {
  out[0] = 0.0;
  for (int i = 1; i < n; ++i) {
    out[i] = out[i - 1] + 0.5 * dx * (y[i - 1] + y[i]);
  }
}

}  // namespace sqh
