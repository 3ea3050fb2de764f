#include "sqh/observables.hpp"

#include <cmath>
#include <cstdio>

#include "sqh/errors.hpp"

namespace sqh {

std::string StatValue::str() const {
  switch (kind) {
    case Kind::Infinite:
      return "inf";
    case Kind::Undefined:
      return "undefined";
    case Kind::Finite:
    default: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", value);
      return buf;
    }
  }
}

PhotonStatistics photon_statistics(const FockState& state) {
  if (state.size() == 0) throw DomainError("statistics: empty state");
  double norm = 0.0;
  for (const auto& c : state.c) norm += std::norm(c);
  if (std::abs(norm - 1.0) > 1e-8) {
    throw DomainError("statistics: state is not normalized (norm^2 = " +
                      std::to_string(norm) + ")");
  }
  const int K = state.size();
  double n_mean = 0.0, n2_mean = 0.0;
  std::complex<double> a_mean{0.0, 0.0}, a2_mean{0.0, 0.0};
  for (int n = 0; n < K; ++n) {
    const double w = std::norm(state.c[n]);
    n_mean += n * w;
    n2_mean += static_cast<double>(n) * n * w;
    if (n + 1 < K) {
      a_mean += std::conj(state.c[n]) * state.c[n + 1] *
                std::sqrt(static_cast<double>(n) + 1.0);
    }
    if (n + 2 < K) {
      a2_mean += std::conj(state.c[n]) * state.c[n + 2] *
                 std::sqrt((n + 1.0) * (n + 2.0));
    }
  }
  PhotonStatistics st;
  st.n_mean = n_mean;
  st.n2_mean = n2_mean;
  st.g2 = (n_mean == 0.0)
              ? StatValue::undefined()
              : StatValue::finite_of((n2_mean - n_mean) / (n_mean * n_mean));
  st.x1_mean = a_mean.real();
  st.x2_mean = a_mean.imag();
  st.var_x1 = 0.25 * (1.0 + 2.0 * n_mean + 2.0 * a2_mean.real()) -
              st.x1_mean * st.x1_mean;
  st.var_x2 = 0.25 * (1.0 + 2.0 * n_mean - 2.0 * a2_mean.real()) -
              st.x2_mean * st.x2_mean;
  return st;
}

PhotonStatistics project_on_N_stats(const SidebandCoupling& sc, long long m,
                                    const ProjectionOptions& opt) {
  if (m < 0) throw DomainError("projection: photon number must be >= 0");
  if (m > 0 && std::abs(sc.zeta) == 0.0) {
    throw DomainError("projection: conditioning on a zero-probability outcome");
  }
  const std::complex<double> bn = sc.beta_N();
  const double x = std::abs(bn);
  const double u = sc.zeta2();

  // Sweep-length estimate from the stable pivots 1 - 2x and 1 - 4x^2
  // (x = tanh(r)/(2(1+u)), so form them from 1 - tanh r = 2/(e^{2r}+1)).
  const double t1m = 2.0 / (std::exp(2.0 * sc.r) + 1.0);
  const double one_m_2x = (u + t1m) / (1.0 + u);
  const double one_p_2x = (2.0 + u - t1m) / (1.0 + u);
  const double denom_quad = std::max(one_m_2x * one_p_2x, 1e-300);
  const double est_iters =
      x * (static_cast<double>(m) + 2.0) / std::max(one_m_2x, 1e-300) +
      80.0 / denom_quad + 50.0;
  if (!opt.allow_expensive && est_iters > 2.5e9) {
    throw RefusalError(
        "streamed band-outcome statistics refused: estimated sweep of " +
        std::to_string(est_iters) +
        " terms (enable allow_expensive to force)");
  }

  // Unnormalized weights w_j = |d_j|^2 on Fock index n_j = 2j + m, advanced
  // by the exact term ratio; the off-diagonal <a^2> sum has the constant
  // phase arg(-beta_N), so its magnitude streams alongside. Periodic
  // rescaling keeps everything in range; the statistics are weight ratios,
  // so the scale cancels.
  // The squeezed quadrature needs n_j - cross_j to near-full precision (the
  // two totals cancel to ~1e-13 of their size at large r), so that
  // difference is formed per term from the exact integer identity
  //   2 n j' - (n+2)(n+1) = -2j(m+1) - (m^2+m+2),   n = 2j+m, j' = j+1,
  // plus the stable pivot delta = 1-2x:
  //   n - cross = [-2j(m+1) - (m^2+m+2)]/(2j') + delta (n+2)(n+1)/(2j').
  // The quadrature combinations n +- cos(phi) cross then follow without
  // cancellation for any phase.
  const double cphi = std::cos(std::arg(-bn));
  const double md = static_cast<double>(m);
  const double int_c = md * md + md + 2.0;
  double w = 1.0;
  double peak = 1.0;
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, v1 = 0.0, v2 = 0.0;
  const double tail_cut = opt.tail_epsilon * 1e-18;
  for (long long j = 0;; ++j) {
    const double jd = static_cast<double>(j);
    const double nd = 2.0 * jd + md;
    const double jp = jd + 1.0;
    const double grow = (nd + 2.0) * (nd + 1.0);
    const double cross = (1.0 - one_m_2x) * grow / (2.0 * jp);
    const double diff = (-2.0 * jd * (md + 1.0) - int_c) / (2.0 * jp) +
                        one_m_2x * grow / (2.0 * jp);  // nd - cross, stable
    s0 += w;
    s1 += nd * w;
    s2 += nd * nd * w;
    v1 += (diff + (1.0 + cphi) * cross) * w;
    v2 += (diff + (1.0 - cphi) * cross) * w;
    const double ratio = x * x * grow / (jp * jp);
    w *= ratio;
    peak = std::max(peak, w);
    // ratio < 1 marks the downhill side of the single peak; w then decays
    // with e-fold 1/(1-4x^2) steps, so the threshold terminates the sweep.
    if (ratio < 1.0 && w < peak * tail_cut) break;
    if (w > 1e250) {
      const double sc_dn = 1e-250;
      w *= sc_dn;
      peak *= sc_dn;
      s0 *= sc_dn;
      s1 *= sc_dn;
      s2 *= sc_dn;
      v1 *= sc_dn;
      v2 *= sc_dn;
    }
  }

  const double n_mean = s1 / s0;
  const double n2_mean = s2 / s0;
  PhotonStatistics st;
  st.n_mean = n_mean;
  st.n2_mean = n2_mean;
  st.g2 = (n_mean == 0.0)
              ? StatValue::undefined()
              : StatValue::finite_of((n2_mean - n_mean) / (n_mean * n_mean));
  st.x1_mean = 0.0;
  st.x2_mean = 0.0;
  st.var_x1 = 0.25 * (1.0 + 2.0 * v1 / s0);
  st.var_x2 = 0.25 * (1.0 + 2.0 * v2 / s0);
  return st;
}

ProjqStatistics projq_statistics_analytic(const SidebandCoupling& sc, long long l) {
  if (l < 0) throw DomainError("projection statistics: photon number must be >= 0");
  const long long eta = l & 1;
  std::complex<double> alpha{0.0, 0.0};
  if (l - eta > 0) alpha = projq_alpha(sc, l);  // throws at r = 0
  const double aa = std::abs(alpha);
  const double re = alpha.real();

  ProjqStatistics out;
  if (eta == 0) {
    if (aa == 0.0) {
      out.g2 = StatValue::infinite();
      out.var_x1 = 0.25;
      out.var_x2 = 0.25;
      return out;
    }
    const double t = std::tanh(aa);
    out.g2 = StatValue::finite_of(1.0 / (t * t));
    out.var_x1 = 0.25 * (1.0 + 2.0 * (aa * t - re));
    out.var_x2 = 0.25 * (1.0 + 2.0 * (aa * t + re));
  } else {
    if (aa == 0.0) {
      out.g2 = StatValue::finite_of(0.0);
      out.var_x1 = 0.75;
      out.var_x2 = 0.75;
      return out;
    }
    const double t = std::tanh(aa);
    out.g2 = StatValue::finite_of(t * t);
    out.var_x1 = 0.25 * (1.0 + 2.0 * (aa / t - re));
    out.var_x2 = 0.25 * (1.0 + 2.0 * (aa / t + re));
  }
  return out;
}

ProjNStatistics projn_statistics_analytic(const SidebandCoupling& sc, long long m) {
  if (m < 0) throw DomainError("projection statistics: photon number must be >= 0");
  if (!(sc.r > 0)) {
    throw DomainError("analytic projection statistics need r > 0");
  }
  const double u = sc.zeta2();
  const double ch = std::cosh(sc.r), th = std::tanh(sc.r);
  const double e2r = std::exp(2.0 * sc.r);
  const double em2r = std::exp(-2.0 * sc.r);
  const double nbar = u * ch * ch;
  const double md = static_cast<double>(m);
  const double ct = std::cos(sc.theta);

  ProjNStatistics out;
  out.g2 = 1.0 + 2.0 / (2.0 * md + 1.0);
  for (int j = 1; j <= 2; ++j) {
    const double sgn = (j & 1) ? -1.0 : 1.0;  // (-1)^j
    const double w = sgn * ct;                // in [-1, 1]
    // A_j = cosh 2r + w sinh 2r, rearranged so the w = -1 limit reaches
    // e^{-2r} without cancellation between ~e^{2r}-sized terms.
    const double a_j = 0.5 * (e2r * (1.0 + w) + em2r * (1.0 - w));
    // 1 + w(1+u)/tanh r = ((tanh r - 1) + (1 + w) + w u)/tanh r with
    // tanh r - 1 = -2/(e^{2r}+1): each addend is exact-scale, no huge pair.
    const double th_m1 = -2.0 / (e2r + 1.0);
    const double fac = (th_m1 + (1.0 + w) + w * u) / th;
    const double term1 = md * (md - 1.0) / (2.0 * (2.0 * md - 1.0)) * fac;
    const double term2 =
        (2.0 * md + 1.0) / 4.0 * (a_j + u * (1.0 + nbar)) / (1.0 + 2.0 * nbar);
    const double var = term1 + term2;
    if (j == 1) {
      out.var_x1 = var;
    } else {
      out.var_x2 = var;
    }
  }
  return out;
}

double projn_var_theta0(const SidebandCoupling& sc, long long m, int j) {
  if (m < 0) throw DomainError("projection statistics: photon number must be >= 0");
  if (j != 1 && j != 2) throw DomainError("quadrature index must be 1 or 2");
  const double u = sc.zeta2();
  const double ch = std::cosh(sc.r);
  const double nbar = u * ch * ch;
  const double md = static_cast<double>(m);
  const double sgn = (j & 1) ? -1.0 : 1.0;
  // (cosh r + sgn sinh r)^2 = e^{2 sgn r}, evaluated directly so the j = 1
  // branch keeps full precision at large r.
  const double quad2 = std::exp(2.0 * sgn * sc.r);
  return (2.0 * md + 1.0) / 4.0 * quad2 / (1.0 + 2.0 * nbar) +
         u / 4.0 * (1.0 + 1.0 / (2.0 * (2.0 * md - 1.0)));
}

}  // namespace sqh
