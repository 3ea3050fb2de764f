#include "sqh/pulse.hpp"

#include <cmath>

#include "sqh/errors.hpp"
#include "sqh/grids.hpp"
#include "sqh/units.hpp"

namespace sqh {

double LaserPulse::period_au() const { return 2.0 * units::pi / omega0_au; }

double LaserPulse::field_at(double t) const {
  const double carrier = std::sin(omega0_au * t + cep_rad);
  if (flat_envelope) return F0_au * carrier;
  const double g = t / tau_au;
  return F0_au * std::exp(-g * g) * carrier;
}

LaserPulse make_pulse(double wavelength_m, double peak_field_V_per_m,
                      double tau_cycles, double cep_rad) {
  if (wavelength_m <= 0) throw DomainError("pulse: wavelength must be positive");
  if (peak_field_V_per_m < 0) throw DomainError("pulse: peak field must be >= 0");
  if (tau_cycles <= 0) throw DomainError("pulse: envelope width must be positive");
  LaserPulse p;
  p.omega0_au = units::omega_au_from_wavelength_m(wavelength_m);
  p.F0_au = units::field_au_from_V_per_m(peak_field_V_per_m);
  p.tau_au = tau_cycles * 2.0 * units::pi / p.omega0_au;
  p.cep_rad = cep_rad;
  return p;
}

PulseFields sample_pulse(const LaserPulse& pulse, const TimeGrid& grid) {
  PulseFields out;
  out.F.resize(grid.n);
  out.A.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) out.F[i] = pulse.field_at(grid.t(i));
  // A = -int F dt, cumulative trapezoid: A(t0) = 0 and the discrete
  // derivative identity holds to rounding.
  cumulative_trapezoid(out.F.data(), grid.n, grid.dt, out.A.data());
  for (int i = 0; i < grid.n; ++i) out.A[i] = -out.A[i];
  return out;
}

}  // namespace sqh
