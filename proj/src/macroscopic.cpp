#include "sqh/macroscopic.hpp"

#include <cmath>
#include <complex>

#include "sqh/errors.hpp"
#include "sqh/units.hpp"

namespace sqh {

double BsvParameters::mode_volume_density() const {
  if (!(omega_q_SI > 0) || !(waist_m > 0) || !(bandwidth_m > 0)) {
    throw DomainError("bsv: mode-volume density needs positive frequency, waist, bandwidth");
  }
  const double lambda_q = 2.0 * units::pi * units::c_SI / omega_q_SI;
  const double wl = waist_m * lambda_q;
  return bandwidth_m / (wl * wl);
}

double squeezing_from_pulse_energy(double energy_J, double omega_q_SI) {
  if (energy_J < 0) throw DomainError("bsv: pulse energy must be >= 0");
  if (!(omega_q_SI > 0)) throw DomainError("bsv: sideband frequency must be positive");
  const double n_photons = energy_J / units::photon_energy_J(omega_q_SI);
  return std::asinh(std::sqrt(n_photons));
}

double MacroscopicGeometry::response_constant() const {
  if (!(density_per_m3 > 0) || !(waist_m > 0) || !(length_m > 0)) {
    throw DomainError("geometry: density, waist, and length must be positive");
  }
  const double nwl = density_per_m3 * waist_m * length_m;
  return nwl * nwl / (2.0 * units::c_SI);
}

namespace {

// Trapezoid band integral of y over the inclusive index range [a, b].
double band_integral(const std::vector<double>& y, int a, int b, double dw) {
  double acc = 0.5 * (y[a] + y[b]);
  for (int i = a + 1; i < b; ++i) acc += y[i];
  return acc * dw;
}

}  // namespace

SpectralResult macroscopic_spectrum(const EmissionSpectra& em,
                                    const FrequencyGrid& fg,
                                    const MacroscopicGeometry& geom,
                                    const BsvParameters& bsv) {
  const int nw = fg.size();
  if (static_cast<int>(em.H.size()) != nw) {
    throw ConfigError("macroscopic: emission spectra do not match the grid");
  }
  const double V = em.volume_m3;
  const double ck2 = geom.response_constant() * V;
  const double cq2 = geom.response_constant() * V * V * bsv.mode_volume_density();
  const double th = std::tanh(bsv.r);
  const double ch2 = std::cosh(bsv.r) * std::cosh(bsv.r);
  const std::complex<double> phase = std::polar(th, bsv.theta);

  SpectralResult out;
  out.theta = bsv.theta;
  out.omega_au = em.omega_au;
  out.dn_classical.resize(nw);
  out.dn_sideband.resize(nw);
  std::vector<double> zeta_abs2(nw);
  std::vector<std::complex<double>> zeta(nw);
  for (int k = 0; k < nw; ++k) {
    zeta[k] = em.F[k] - em.G[k] * phase;
    zeta_abs2[k] = std::norm(zeta[k]);
    out.dn_classical[k] = ck2 * std::norm(em.H[k]);
    out.dn_sideband[k] = ch2 * cq2 * zeta_abs2[k];
  }

  // Convert band integrals from per-atomic-frequency to per-SI-frequency.
  const double dw_SI = fg.domega() / units::time_au_SI;
  for (int N = 1; N <= fg.n_max_order; ++N) {
    const int a = fg.band_first(N);
    const int b = fg.band_last(N);
    BandReport br;
    br.N = N;
    br.n_classical = band_integral(out.dn_classical, a, b, dw_SI);
    br.zeta2 = cq2 * band_integral(zeta_abs2, a, b, dw_SI);
    br.n_sideband = ch2 * br.zeta2;
    int peak = a;
    for (int i = a + 1; i <= b; ++i) {
      if (zeta_abs2[i] > zeta_abs2[peak]) peak = i;
    }
    // Band coupling magnitude from the integral, phase from the in-band
    // peak of |zeta|^2 (documented convention; photon numbers use only the
    // magnitude).
    const double mag = std::sqrt(br.zeta2);
    const std::complex<double> zp = zeta[peak];
    br.zeta = (std::abs(zp) > 0) ? mag * zp / std::abs(zp)
                                 : std::complex<double>(mag, 0.0);
    out.bands.push_back(br);
  }
  return out;
}

ThetaScan theta_scan(const EmissionSpectra& em, const FrequencyGrid& fg,
                     const MacroscopicGeometry& geom, const BsvParameters& bsv,
                     int n_theta) {
  if (n_theta < 1) throw ConfigError("theta scan: need at least one sample");
  ThetaScan scan;
  scan.thetas.resize(n_theta);
  scan.n_sideband.resize(n_theta);
  for (int i = 0; i < n_theta; ++i) {
    BsvParameters b = bsv;
    b.theta = 2.0 * units::pi * i / n_theta;
    scan.thetas[i] = b.theta;
    const SpectralResult res = macroscopic_spectrum(em, fg, geom, b);
    scan.n_sideband[i].resize(res.bands.size());
    for (size_t n = 0; n < res.bands.size(); ++n) {
      scan.n_sideband[i][n] = res.bands[n].n_sideband;
    }
  }
  const size_t nb = scan.n_sideband.empty() ? 0 : scan.n_sideband[0].size();
  scan.average.assign(nb, 0.0);
  for (int i = 0; i < n_theta; ++i) {
    for (size_t n = 0; n < nb; ++n) scan.average[n] += scan.n_sideband[i][n];
  }
  for (double& v : scan.average) v /= n_theta;
  return scan;
}

double susceptibility_scaling(double intensity, double omega0, double mass) {
  if (!(omega0 > 0) || !(mass > 0)) {
    throw DomainError("scaling: omega0 and mass must be positive");
  }
  const double w5 = omega0 * omega0 * omega0 * omega0 * omega0;
  return intensity / (8.0 * w5 * mass * mass);
}

}  // namespace sqh
