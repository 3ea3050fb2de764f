#pragma once
#include <complex>
#include <string>

#include "sqh/fockspace.hpp"

namespace sqh {

// Sentinel-aware scalar: some statistics are infinite (g2 of a vacuum-like
// even cat) or undefined (g2 of vacuum).
struct StatValue {
  enum class Kind { Finite, Infinite, Undefined } kind = Kind::Finite;
  double value = 0.0;
  bool finite() const { return kind == Kind::Finite; }
  std::string str() const;
  static StatValue finite_of(double v) { return {Kind::Finite, v}; }
  static StatValue infinite() { return {Kind::Infinite, 0.0}; }
  static StatValue undefined() { return {Kind::Undefined, 0.0}; }
};

// Photon statistics of a normalized Fock-basis state:
//   n_mean, n2_mean, g2 = (<n^2>-<n>)/<n>^2,
//   quadratures X1 = (a+a^+)/2, X2 = (a-a^+)/(2i),
//   var_X1 = 1/4 (1 + 2<n> + 2 Re<a^2>) - <X1>^2,
//   var_X2 = 1/4 (1 + 2<n> - 2 Re<a^2>) - <X2>^2.
struct PhotonStatistics {
  double n_mean = 0.0;
  double n2_mean = 0.0;
  StatValue g2;
  double x1_mean = 0.0, x2_mean = 0.0;
  double var_x1 = 0.25, var_x2 = 0.25;
  double uncertainty_product() const { return var_x1 * var_x2; }
};

// Throws DomainError when the state norm deviates from 1 by more than 1e-8.
PhotonStatistics photon_statistics(const FockState& state);

// Photon statistics of the band-conditioned sideband state (m-photon-added
// squeezed vacuum), streamed directly from the term ratios of the amplitude
// series in O(1) memory. Numerically equivalent to
// photon_statistics(project_on_N(sc, m, opt)) but usable at couplings whose
// conditioned state spans too many Fock components to materialize (the
// support grows like 1/(1 - 2|beta_N|)). Refuses when the estimated sweep
// exceeds ~2.5e9 terms unless opt.allow_expensive.
PhotonStatistics project_on_N_stats(const SidebandCoupling& sc, long long m,
                                    const ProjectionOptions& opt = {});

// ---- closed forms for the conditional states --------------------------------

// Drive-outcome projection (cat-like states, parameter alpha_N):
//  even outcomes: g2 = 1/tanh^2|a|, var_j = 1/4 (1 + 2(|a| tanh|a| + (-1)^j Re a))
//  odd outcomes : g2 = tanh^2|a|,   var_j = 1/4 (1 + 2(|a|/tanh|a| + (-1)^j Re a))
// with a = alpha_N and j in {1, 2}. |a| -> 0: even g2 infinite, var -> 1/4;
// odd g2 -> 0, var -> 3/4 + (sign) Re-term.
struct ProjqStatistics {
  StatValue g2;
  double var_x1 = 0.0, var_x2 = 0.0;
};
ProjqStatistics projq_statistics_analytic(const SidebandCoupling& sc,
                                          long long l);

// Harmonic-outcome projection (photon-added squeezed vacuum):
//   g2 = 1 + 2/(2m+1) exactly, independent of r, theta, zeta.
// Quadrature variances to leading order in |zeta|^2:
//   var_j = m(m-1)/(2(2m-1)) * (1 + (-1)^j cos(theta) (1+|z|^2)/tanh r)
//         + (2m+1)/4 * [A_j + |z|^2 (1 + nbar)] / (1 + 2 nbar)
// with A_j = cosh^2 r + sinh^2 r + 2 (-1)^j cosh r sinh r cos theta,
// nbar = |z|^2 cosh^2 r, z = zeta. (First term vanishes for m = 0, 1.)
struct ProjNStatistics {
  double g2 = 0.0;
  double var_x1 = 0.0, var_x2 = 0.0;
};
ProjNStatistics projn_statistics_analytic(const SidebandCoupling& sc,
                                          long long m);

// Simplified theta = 0 variance used for consistency scans:
//   var_j ~ (2m+1)/4 (cosh r + (-1)^j sinh r)^2/(1+2 nbar)
//         + |z|^2/4 (1 + 1/(2(2m-1))).
double projn_var_theta0(const SidebandCoupling& sc, long long m, int j);

}  // namespace sqh
