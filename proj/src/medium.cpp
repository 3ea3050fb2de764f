#include "sqh/medium.hpp"

#include <cmath>
#include <utility>

#include "sqh/errors.hpp"

namespace sqh {

namespace {
void check_common(double gap_au, double mass_au, double d0_au,
                  double density_per_m3) {
  if (!(gap_au > 0)) throw DomainError("medium: gap must be positive");
  if (!(mass_au > 0)) throw DomainError("medium: mass must be positive");
  if (!(d0_au >= 0)) throw DomainError("medium: dipole constant must be >= 0");
  if (!(density_per_m3 > 0)) throw DomainError("medium: density must be positive");
}
}  // namespace

MediumModel make_atom(double gap_au, double mass_au, double d0_au,
                      double density_per_m3, std::string name) {
  check_common(gap_au, mass_au, d0_au, density_per_m3);
  MediumModel m;
  m.kind = MediumModel::Kind::Atom;
  m.gap_au = gap_au;
  m.mass_au = mass_au;
  m.d0_au = d0_au;
  m.density_per_m3 = density_per_m3;
  m.name = std::move(name);
  return m;
}

MediumModel make_solid(double gap_au, double mass_au, double d0_au,
                       double density_per_m3, std::string name) {
  check_common(gap_au, mass_au, d0_au, density_per_m3);
  MediumModel m;
  m.kind = MediumModel::Kind::Solid;
  m.gap_au = gap_au;
  m.mass_au = mass_au;
  m.d0_au = d0_au;
  m.density_per_m3 = density_per_m3;
  m.name = std::move(name);
  return m;
}

double continuum_energy(const MediumModel& m, double p_par, double p_perp) {
  const double p2 = p_par * p_par + p_perp * p_perp;
  return 0.5 * p2 / m.mass_au + m.gap_au;
}

double transition_dipole(const MediumModel& m, double p_par, double p_perp) {
  const double eps = continuum_energy(m, p_par, p_perp);
  if (m.kind == MediumModel::Kind::Atom) {
    // Hydrogen-like continuum dipole, polarization projection; odd in p.
    return m.d0_au * p_par / (eps * eps * eps);
  }
  // Two-band solid: constant direction along the polarization; even in p.
  return m.d0_au * m.gap_au / eps;
}

double ponderomotive_energy(double F0_au, double omega0_au, double mass_au) {
  if (!(omega0_au > 0)) throw DomainError("Up: omega0 must be positive");
  if (!(mass_au > 0)) throw DomainError("Up: mass must be positive");
  return F0_au * F0_au / (4.0 * mass_au * omega0_au * omega0_au);
}

double cutoff_energy(const MediumModel& m, double F0_au, double omega0_au) {
  return m.gap_au + 3.17 * ponderomotive_energy(F0_au, omega0_au, m.mass_au);
}

}  // namespace sqh
