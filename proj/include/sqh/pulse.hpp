#pragma once
#include <vector>

namespace sqh {

// Linearly polarized driving pulse: Gaussian envelope, sine carrier.
//   F(t) = F0 * exp(-t^2/tau^2) * sin(omega0 t + cep)
// All members in atomic units; t = 0 is the envelope peak.
struct LaserPulse {
  double omega0_au = 0.0;   // carrier angular frequency
  double F0_au = 0.0;       // peak field
  double tau_au = 0.0;      // Gaussian envelope 1/e half-width
  double cep_rad = 0.0;     // carrier-envelope phase

  double period_au() const;               // T0 = 2*pi/omega0
  double field_at(double t_au) const;     // F(t)

  // Envelope-free variant used by steady-state tests.
  bool flat_envelope = false;
};

// Build a pulse from laboratory inputs. tau = tau_cycles * T0.
LaserPulse make_pulse(double wavelength_m, double peak_field_V_per_m,
                      double tau_cycles, double cep_rad);

// Sampled field and vector potential on a uniform time grid.
// A(t) = -int_{t0}^{t} F dt' by cumulative trapezoid, so A(t0) = 0 and the
// discrete identity -(A[i+1]-A[i])/dt = (F[i]+F[i+1])/2 holds to rounding.
struct PulseFields {
  std::vector<double> F;  // field samples
  std::vector<double> A;  // vector potential samples
};
struct TimeGrid;  // grids.hpp
PulseFields sample_pulse(const LaserPulse& pulse, const TimeGrid& grid);

}  // namespace sqh
