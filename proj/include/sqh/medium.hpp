#pragma once
#include <string>

namespace sqh {

// Emitter model: a bound atom (hydrogen-like continuum dipole, odd in p) or
// a two-band solid (constant interband dipole shape, even in p).
struct MediumModel {
  enum class Kind { Atom, Solid };
  Kind kind = Kind::Atom;

  double gap_au = 0.0;      // ionization potential E0 or band gap Eg
  double mass_au = 1.0;     // electron (effective) mass in units of m_e
  double d0_au = 0.0;       // transition-dipole constant, kind-specific unit
  double density_per_m3 = 0.0;  // emitter number density N0

  std::string name;
};

MediumModel make_atom(double gap_au, double mass_au, double d0_au,
                      double density_per_m3, std::string name = "atom");
MediumModel make_solid(double gap_au, double mass_au, double d0_au,
                       double density_per_m3, std::string name = "solid");

// Polarization component of the transition dipole at kinetic momentum
// (p_par, p_perp), both atomic units:
//   atom : d0 * p_par / (p^2/(2m) + E0)^3
//   solid: d0 * Eg / (Eg + p^2/(2m))
double transition_dipole(const MediumModel& m, double p_par, double p_perp);

// Kinetic energy above the gap: p^2/(2m) + gap.
double continuum_energy(const MediumModel& m, double p_par, double p_perp);

// Ponderomotive energy Up = F0^2/(4 m omega0^2) and the classical cutoff
// energy gap + 3.17 Up, atomic units.
double ponderomotive_energy(double F0_au, double omega0_au, double mass_au);
double cutoff_energy(const MediumModel& m, double F0_au, double omega0_au);

}  // namespace sqh
