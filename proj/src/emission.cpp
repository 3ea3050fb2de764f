#include "sqh/emission.hpp"

#include <cmath>
#include <string>

#include "sqh/errors.hpp"
#include "sqh/units.hpp"

namespace sqh {

namespace {

std::vector<double> endpoint_weighted(const std::vector<double>& y) {
  std::vector<double> o(y);
  if (o.size() >= 2) {
    o.front() *= 0.5;
    o.back() *= 0.5;
  }
  return o;
}

}  // namespace

EmissionSpectra assemble_emission(const SfaReductions& red, const TimeGrid& tg,
                                  const FrequencyGrid& fg, double omega_q_au,
                                  const EmissionOptions& opt,
                                  const simd::Kernels& kr) {
  const int n = tg.n;
  const int nw = fg.size();
  if (static_cast<int>(red.x.size()) != n) {
    throw ConfigError("emission: reductions do not match the time grid");
  }
  const bool exact_kappa = !red.bh_re.empty();
  if (exact_kappa && static_cast<int>(red.bh_re.size()) != nw) {
    throw ConfigError(
        "emission: exact-displacement reductions cover a different frequency "
        "list than the emission grid");
  }
  // The shifted transform at omega_k + omega_q must stay below Nyquist.
  const double w_needed = fg.omega(nw - 1) + omega_q_au;
  const double w_nyquist = units::pi / tg.dt;
  if (w_needed >= w_nyquist) {
    throw ConfigError(
        "emission: frequency grid (up to " + std::to_string(w_needed) +
        " au with the sideband shift) exceeds the time-grid Nyquist limit " +
        std::to_string(w_nyquist) + " au; refine dt or lower n_max_order");
  }

  // Trapezoid endpoint weights folded into copies; dt applied as a scalar.
  const std::vector<double> xw = endpoint_weighted(red.x);
  const std::vector<double> khw = endpoint_weighted(red.kh);
  const std::vector<double> xfre = endpoint_weighted(red.xf_re);
  const std::vector<double> xfim = endpoint_weighted(red.xf_im);
  const std::vector<double> kfre = endpoint_weighted(red.kf_re);
  const std::vector<double> kfim = endpoint_weighted(red.kf_im);
  // Conjugated sideband series for the down-conversion amplitude.
  std::vector<double> cxfim(xfim), ckfim(kfim);
  for (double& v : cxfim) v = -v;
  for (double& v : ckfim) v = -v;

  std::vector<double> ts(n);
  for (int i = 0; i < n; ++i) ts[i] = tg.t(i);
  std::vector<double> qpre(n), qpim(n);
  for (int i = 0; i < n; ++i) {
    qpre[i] = std::cos(omega_q_au * ts[i]);
    qpim[i] = std::sin(omega_q_au * ts[i]);
  }

  EmissionSpectra out;
  out.omega_au.resize(nw);
  out.H.resize(nw);
  out.F.resize(nw);
  out.G.resize(nw);
  out.omega_q_au = omega_q_au;
  out.volume_m3 = opt.volume_m3;

  const double omega_q_SI = units::omega_SI_from_au(omega_q_au);
  const double ev_q = units::vacuum_field_V_per_m(omega_q_SI, opt.volume_m3);
  const double h_unit = units::e_SI / units::hbar_SI * units::a0_SI *
                        units::time_au_SI;  // e/hbar * x * dt in SI
  const double fg_unit = (units::e_SI / units::hbar_SI) *
                         (units::e_SI / units::hbar_SI) * units::a0_SI *
                         units::a0_SI * units::time_au_SI * units::time_au_SI;

  std::vector<double> pre(n), pim(n), fpre(n), fpim(n), gpre(n), gpim(n);
  std::vector<double> bhw_re(n), bhw_im(n), bfw_re(n), bfw_im(n), bgw_re(n),
      bgw_im(n);

  for (int k = 0; k < nw; ++k) {
    const double w = fg.omega(k);
    out.omega_au[k] = w;
    for (int i = 0; i < n; ++i) {
      pre[i] = std::cos(w * ts[i]);
      pim[i] = std::sin(w * ts[i]);
    }
    for (int i = 0; i < n; ++i) {
      // e^{i(w+wq)t} and e^{i(w-wq)t}
      fpre[i] = pre[i] * qpre[i] - pim[i] * qpim[i];
      fpim[i] = pre[i] * qpim[i] + pim[i] * qpre[i];
      gpre[i] = pre[i] * qpre[i] + pim[i] * qpim[i];
      gpim[i] = pim[i] * qpre[i] - pre[i] * qpim[i];
    }

    const double w2 = w * w;
    double Xr, Xi, ar, ai, br, bi;
    kr.rdot(xw.data(), pre.data(), pim.data(), n, &Xr, &Xi);

    double Hr_au, Hi_au;
    if (!exact_kappa) {
      kr.rdot(khw.data(), pre.data(), pim.data(), n, &ar, &ai);
      Hr_au = Xr - ar / w2;
      Hi_au = Xi - ai / w2;
    } else {
      for (int i = 0; i < n; ++i) {
        const double wt = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        bhw_re[i] = wt * red.bh_re[k][i];
        bhw_im[i] = wt * red.bh_im[k][i];
      }
      kr.cdot(bhw_re.data(), bhw_im.data(), pre.data(), pim.data(), n, &ar,
              &ai);
      Hr_au = Xr + ar;
      Hi_au = Xi + ai;
    }

    double XFr, XFi, KFr, KFi;
    kr.cdot(xfre.data(), xfim.data(), fpre.data(), fpim.data(), n, &XFr, &XFi);
    double Fr_au, Fi_au;
    if (!exact_kappa) {
      kr.cdot(kfre.data(), kfim.data(), fpre.data(), fpim.data(), n, &KFr,
              &KFi);
      Fr_au = XFr + KFi / w2;
      Fi_au = XFi - KFr / w2;
    } else {
      for (int i = 0; i < n; ++i) {
        const double wt = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        bfw_re[i] = wt * red.bf_re[k][i];
        bfw_im[i] = wt * red.bf_im[k][i];
      }
      kr.cdot(bfw_re.data(), bfw_im.data(), fpre.data(), fpim.data(), n, &ar,
              &ai);
      Fr_au = XFr + ar;
      Fi_au = XFi + ai;
    }

    double XGr, XGi;
    kr.cdot(xfre.data(), cxfim.data(), gpre.data(), gpim.data(), n, &XGr,
            &XGi);
    double Gr_au, Gi_au;
    if (!exact_kappa) {
      kr.cdot(kfre.data(), ckfim.data(), gpre.data(), gpim.data(), n, &br,
              &bi);
      Gr_au = -XGr + bi / w2;
      Gi_au = -XGi - br / w2;
    } else {
      for (int i = 0; i < n; ++i) {
        const double wt = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        bgw_re[i] = wt * red.bg_re[k][i];
        bgw_im[i] = wt * red.bg_im[k][i];
      }
      kr.cdot(bgw_re.data(), bgw_im.data(), gpre.data(), gpim.data(), n, &ar,
              &ai);
      Gr_au = -XGr + ar;
      Gi_au = -XGi + ai;
    }

    const double w_SI = units::omega_SI_from_au(w);
    const double ev_k = units::vacuum_field_V_per_m(w_SI, opt.volume_m3);
    const double prefH = -(ev_k * h_unit) * tg.dt;
    const double prefFG = (ev_k * ev_q) * fg_unit * tg.dt;
    out.H[k] = {prefH * Hr_au, prefH * Hi_au};
    out.F[k] = {prefFG * Fr_au, prefFG * Fi_au};
    out.G[k] = {prefFG * Gr_au, prefFG * Gi_au};
  }
  return out;
}

}  // namespace sqh
