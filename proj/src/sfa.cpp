#include "sqh/sfa.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "sqh/errors.hpp"

namespace sqh {

double memory_suppression(double lag_au, double period_au) {
  if (!(period_au > 0)) throw DomainError("memory filter: period must be positive");
  if (lag_au < 0) throw DomainError("memory filter: lag must be >= 0");
  if (lag_au <= 0.5 * period_au) return 0.0;
  if (lag_au <= period_au) return 10.0 * lag_au / period_au;
  return std::numeric_limits<double>::infinity();
}

FilterKernel make_filter_kernel(double period_au, double dt_au) {
  if (!(dt_au > 0)) throw ConfigError("memory filter: dt must be positive");
  const double ratio = period_au / dt_au;
  const long long W = std::llround(ratio);
  if (W < 2 || std::abs(ratio - static_cast<double>(W)) > 1e-9 * ratio) {
    throw ConfigError(
        "memory filter: the drive period must be an integer number of time "
        "steps (T0/dt = " + std::to_string(ratio) + ")");
  }
  FilterKernel f;
  f.W = static_cast<int>(W);
  f.k.resize(f.W + 1);
  f.khat.resize(f.W + 1);
  for (int j = 0; j <= f.W; ++j) {
    // Index form of the suppression exponent (lag/T0 = j/W exactly), so the
    // boundary sample j = W/2 lands in the zero branch without rounding.
    const double frac = static_cast<double>(j) / static_cast<double>(W);
    const double xi = (2 * j <= f.W) ? 0.0 : 10.0 * frac;
    f.k[j] = std::exp(-xi);
  }
  f.khat = f.k;
  f.khat[0] *= 0.5;  // trapezoid half-weight at zero lag
  return f;
}

void mode_displacement_exact(const std::vector<double>& v, double dt_au,
                             double omega_au, std::vector<double>& sig_re,
                             std::vector<double>& sig_im) {
  if (!(omega_au > 0)) {
    throw DomainError("mode displacement: frequency must be positive");
  }
  const int n = static_cast<int>(v.size());
  sig_re.assign(n, 0.0);
  sig_im.assign(n, 0.0);
  if (n == 0) return;
  // The constant drift part v(t0) enters with its settled response -v0/w^2:
  // integrating it from the finite grid start instead would ring undamped at
  // e^{-iw(t-t0)} and make every spectral amplitude depend on where the
  // quiet-zone grid happens to begin. The recursion therefore runs on the
  // field-driven part v - v0, which vanishes outside the pulse.
  const double v0 = v[0];
  const double base = -v0 / (omega_au * omega_au);
  const double Er = std::cos(omega_au * dt_au);
  const double Ei = -std::sin(omega_au * dt_au);
  const double c = 0.5 * dt_au / omega_au;
  double sr = 0.0, si = 0.0;
  sig_re[0] = base;
  for (int i = 0; i + 1 < n; ++i) {
    // q = E dv_i + dv_{i+1};   s <- E s - (i/w)(dt/2) q
    const double qr = Er * (v[i] - v0) + (v[i + 1] - v0);
    const double qi = Ei * (v[i] - v0);
    const double nsr = Er * sr - Ei * si + c * qi;
    const double nsi = Er * si + Ei * sr - c * qr;
    sr = nsr;
    si = nsi;
    sig_re[i + 1] = base + sr;
    sig_im[i + 1] = si;
  }
}

void mode_displacement_hf(const std::vector<double>& v, double omega_au,
                          std::vector<double>& sig_re,
                          std::vector<double>& sig_im) {
  if (!(omega_au > 0)) {
    throw DomainError("mode displacement: frequency must be positive");
  }
  const int n = static_cast<int>(v.size());
  sig_re.resize(n);
  sig_im.assign(n, 0.0);
  const double w2 = omega_au * omega_au;
  for (int i = 0; i < n; ++i) sig_re[i] = -v[i] / w2;
}

std::vector<double> action_phase(const MediumModel& m, const TimeGrid& tg,
                                 const std::vector<double>& A, double p_par,
                                 double p_perp) {
  const int n = tg.n;
  std::vector<double> energy(n), S(n);
  const double inv2m = 0.5 / m.mass_au;
  for (int i = 0; i < n; ++i) {
    const double pk = p_par + A[i];
    energy[i] = (pk * pk + p_perp * p_perp) * inv2m + m.gap_au;
  }
  cumulative_trapezoid(energy.data(), n, tg.dt, S.data());
  return S;
}

namespace {

void compute_trajectory_into(const MediumModel& m, const TimeGrid& tg,
                             const std::vector<double>& F,
                             const std::vector<double>& A,
                             const FilterKernel& filter, double p_par,
                             double p_perp, const simd::Kernels& kr,
                             TrajectorySeries& tr, std::vector<double>& u_re,
                             std::vector<double>& u_im,
                             std::vector<double>& w_re,
                             std::vector<double>& w_im) {
  const int n = tg.n;
  tr.S = action_phase(m, tg, A, p_par, p_perp);
  tr.cosS.resize(n);
  tr.sinS.resize(n);
  tr.d.resize(n);
  tr.Omega.resize(n);
  tr.v.resize(n);
  tr.b_re.resize(n);
  tr.b_im.resize(n);
  tr.G_re.resize(n);
  tr.G_im.resize(n);
  u_re.resize(n);
  u_im.resize(n);
  w_re.resize(n);
  w_im.resize(n);

  const double invm = 1.0 / m.mass_au;
  for (int i = 0; i < n; ++i) {
    const double pk = p_par + A[i];
    tr.cosS[i] = std::cos(tr.S[i]);
    tr.sinS[i] = std::sin(tr.S[i]);
    tr.d[i] = transition_dipole(m, pk, p_perp);
    tr.Omega[i] = tr.d[i] * F[i];
    tr.v[i] = pk * invm;
    u_re[i] = tr.Omega[i] * tr.cosS[i];
    u_im[i] = -(tr.Omega[i] * tr.sinS[i]);
  }

  // b(t_i) = dt e^{iS_i} [ sum_j khat_j u_{i-j} - (ramp correction) ]
  simd::windowed_corr_ramp(filter.k.data(), filter.khat.data(), filter.W,
                           u_re.data(), w_re.data(), n);
  simd::windowed_corr_ramp(filter.k.data(), filter.khat.data(), filter.W,
                           u_im.data(), w_im.data(), n);
  if (filter.W + 1 < n) {
    kr.windowed_corr_main(filter.khat.data(), filter.W, u_re.data(),
                          w_re.data(), filter.W + 1, n);
    kr.windowed_corr_main(filter.khat.data(), filter.W, u_im.data(),
                          w_im.data(), filter.W + 1, n);
  }
  const double dt = tg.dt;
  for (int i = 0; i < n; ++i) {
    const double br = dt * (tr.cosS[i] * w_re[i] - tr.sinS[i] * w_im[i]);
    const double bi = dt * (tr.sinS[i] * w_re[i] + tr.cosS[i] * w_im[i]);
    tr.b_re[i] = br;
    tr.b_im[i] = bi;
    tr.G_re[i] = tr.Omega[i] * br;
    tr.G_im[i] = tr.Omega[i] * bi;
  }
}

}  // namespace

TrajectorySeries compute_trajectory(const MediumModel& m, const TimeGrid& tg,
                                    const std::vector<double>& F,
                                    const std::vector<double>& A,
                                    const FilterKernel& filter, double p_par,
                                    double p_perp,
                                    const simd::Kernels& kernels) {
  TrajectorySeries tr;
  std::vector<double> u_re, u_im, w_re, w_im;
  compute_trajectory_into(m, tg, F, A, filter, p_par, p_perp, kernels, tr,
                          u_re, u_im, w_re, w_im);
  return tr;
}

namespace {

struct LeafAcc {
  std::vector<double> x, gre, gim, kh, xfre, xfim, kfre, kfim;
  std::vector<std::vector<double>> bhre, bhim, bfre, bfim, bgre, bgim;

  void init(int n, int n_kappa) {
    x.assign(n, 0.0);
    gre.assign(n, 0.0);
    gim.assign(n, 0.0);
    kh.assign(n, 0.0);
    xfre.assign(n, 0.0);
    xfim.assign(n, 0.0);
    kfre.assign(n, 0.0);
    kfim.assign(n, 0.0);
    auto blank = [&](std::vector<std::vector<double>>& a) {
      a.assign(n_kappa, std::vector<double>(n, 0.0));
    };
    blank(bhre);
    blank(bhim);
    blank(bfre);
    blank(bfim);
    blank(bgre);
    blank(bgim);
  }

  void add(const LeafAcc& o, const simd::Kernels& kr) {
    const int n = static_cast<int>(x.size());
    kr.axpy(1.0, o.x.data(), n, x.data());
    kr.axpy(1.0, o.gre.data(), n, gre.data());
    kr.axpy(1.0, o.gim.data(), n, gim.data());
    kr.axpy(1.0, o.kh.data(), n, kh.data());
    kr.axpy(1.0, o.xfre.data(), n, xfre.data());
    kr.axpy(1.0, o.xfim.data(), n, xfim.data());
    kr.axpy(1.0, o.kfre.data(), n, kfre.data());
    kr.axpy(1.0, o.kfim.data(), n, kfim.data());
    for (size_t w = 0; w < bhre.size(); ++w) {
      kr.axpy(1.0, o.bhre[w].data(), n, bhre[w].data());
      kr.axpy(1.0, o.bhim[w].data(), n, bhim[w].data());
      kr.axpy(1.0, o.bfre[w].data(), n, bfre[w].data());
      kr.axpy(1.0, o.bfim[w].data(), n, bfim[w].data());
      kr.axpy(1.0, o.bgre[w].data(), n, bgre[w].data());
      kr.axpy(1.0, o.bgim[w].data(), n, bgim[w].data());
    }
  }
};

constexpr int kLeafSize = 128;

struct Workspace {
  TrajectorySeries tr;
  std::vector<double> u_re, u_im, w_re, w_im;
  std::vector<double> sq_re, sq_im;       // sideband displacement
  std::vector<double> sk_re, sk_im;       // per-frequency displacement
  std::vector<double> vom, dbim, vimg;    // v*Omega, d*Im b, v*Omega*Im b
  std::vector<double> gre_t, gim_t;       // Omega*Re b, Omega*Im b
  std::vector<double> t1, t2;
};

void accumulate_cell(const SfaProblem& prob, const simd::Kernels& kr, int ipar,
                     int jperp, LeafAcc& acc, Workspace& ws) {
  const MediumModel& m = *prob.medium;
  const int n = prob.tg.n;
  const double p_par = prob.mg.p_par(ipar);
  const double p_perp = prob.mg.p_perp(jperp);
  const double wp = prob.mg.weight(ipar, jperp);

  compute_trajectory_into(m, prob.tg, prob.F, prob.A, prob.filter, p_par,
                          p_perp, kr, ws.tr, ws.u_re, ws.u_im, ws.w_re,
                          ws.w_im);
  const TrajectorySeries& tr = ws.tr;

  // x += 2 wp d Re b ; gamma += wp Omega b ; kh += 2 wp v Omega Re b
  kr.amul(2.0 * wp, tr.d.data(), tr.b_re.data(), n, acc.x.data());
  kr.amul(wp, tr.Omega.data(), tr.b_re.data(), n, acc.gre.data());
  kr.amul(wp, tr.Omega.data(), tr.b_im.data(), n, acc.gim.data());
  ws.vom.resize(n);
  kr.emul(tr.v.data(), tr.Omega.data(), n, ws.vom.data());
  kr.amul(2.0 * wp, ws.vom.data(), tr.b_re.data(), n, acc.kh.data());

  // Sideband displacement sigma_q.
  const bool exact_q = prob.sigma_q == SigmaMethod::ExactRecursion;
  if (exact_q) {
    mode_displacement_exact(tr.v, prob.tg.dt, prob.omega_q_au, ws.sq_re,
                            ws.sq_im);
  } else {
    mode_displacement_hf(tr.v, prob.omega_q_au, ws.sq_re, ws.sq_im);
  }

  // xf += wp sigma_q d (b - b*) = wp sigma_q (2 i d Im b)
  ws.dbim.resize(n);
  kr.emul(tr.d.data(), tr.b_im.data(), n, ws.dbim.data());
  kr.amul(2.0 * wp, ws.sq_re.data(), ws.dbim.data(), n, acc.xfim.data());
  if (exact_q) {
    kr.amul(-2.0 * wp, ws.sq_im.data(), ws.dbim.data(), n, acc.xfre.data());
  }
  // kf += wp sigma_q v Im Gamma
  ws.vimg.resize(n);
  kr.emul(ws.vom.data(), tr.b_im.data(), n, ws.vimg.data());
  kr.amul(wp, ws.sq_re.data(), ws.vimg.data(), n, acc.kfre.data());
  if (exact_q) {
    kr.amul(wp, ws.sq_im.data(), ws.vimg.data(), n, acc.kfim.data());
  }

  if (prob.sigma_kappa == SigmaMethod::ExactRecursion) {
    ws.gre_t.resize(n);
    ws.gim_t.resize(n);
    kr.emul(tr.Omega.data(), tr.b_re.data(), n, ws.gre_t.data());
    kr.emul(tr.Omega.data(), tr.b_im.data(), n, ws.gim_t.data());
    ws.t1.resize(n);
    ws.t2.resize(n);
    for (size_t w = 0; w < prob.exact_kappa_omegas.size(); ++w) {
      mode_displacement_exact(tr.v, prob.tg.dt, prob.exact_kappa_omegas[w],
                              ws.sk_re, ws.sk_im);
      // bh += wp sigma_k (Gamma + Gamma*) = 2 wp sigma_k Omega Re b
      kr.amul(2.0 * wp, ws.sk_re.data(), ws.gre_t.data(), n,
              acc.bhre[w].data());
      kr.amul(2.0 * wp, ws.sk_im.data(), ws.gre_t.data(), n,
              acc.bhim[w].data());
      // bf += wp sigma_q (i sigma_k) Im Gamma;
      // bg += wp sigma_q* (i sigma_k) Im Gamma.
      for (int i = 0; i < n; ++i) {
        // i sigma_k = (-sk_im, sk_re)
        ws.t1[i] = ws.sq_re[i] * (-ws.sk_im[i]) - ws.sq_im[i] * ws.sk_re[i];
        ws.t2[i] = ws.sq_re[i] * ws.sk_re[i] + ws.sq_im[i] * (-ws.sk_im[i]);
      }
      kr.amul(wp, ws.t1.data(), ws.gim_t.data(), n, acc.bfre[w].data());
      kr.amul(wp, ws.t2.data(), ws.gim_t.data(), n, acc.bfim[w].data());
      for (int i = 0; i < n; ++i) {
        ws.t1[i] = ws.sq_re[i] * (-ws.sk_im[i]) + ws.sq_im[i] * ws.sk_re[i];
        ws.t2[i] = ws.sq_re[i] * ws.sk_re[i] - ws.sq_im[i] * (-ws.sk_im[i]);
      }
      kr.amul(wp, ws.t1.data(), ws.gim_t.data(), n, acc.bgre[w].data());
      kr.amul(wp, ws.t2.data(), ws.gim_t.data(), n, acc.bgim[w].data());
    }
  }
}

}  // namespace

SfaReductions reduce_over_momentum(const SfaProblem& prob) {
  if (prob.medium == nullptr) throw ConfigError("reduction: medium not set");
  if (static_cast<int>(prob.F.size()) != prob.tg.n ||
      static_cast<int>(prob.A.size()) != prob.tg.n) {
    throw ConfigError("reduction: pulse samples do not match the time grid");
  }
  if (!(prob.omega_q_au > 0)) {
    throw ConfigError("reduction: sideband frequency must be positive");
  }
  const int n = prob.tg.n;
  const int cells = prob.mg.points();
  const int n_kappa = prob.sigma_kappa == SigmaMethod::ExactRecursion
                          ? static_cast<int>(prob.exact_kappa_omegas.size())
                          : 0;
  const int nleaves = (cells + kLeafSize - 1) / kLeafSize;
  const simd::Kernels& kr = simd::active();

  std::vector<LeafAcc> leaves(nleaves);
  std::atomic<int> next{0};
  const int nthreads =
      std::max(1, std::min(prob.threads > 0 ? prob.threads : 1, nleaves));

  auto worker = [&]() {
    Workspace ws;
    for (;;) {
      const int leaf = next.fetch_add(1);
      if (leaf >= nleaves) break;
      LeafAcc& acc = leaves[leaf];
      acc.init(n, n_kappa);
      const int lo = leaf * kLeafSize;
      const int hi = std::min(cells, lo + kLeafSize);
      for (int idx = lo; idx < hi; ++idx) {
        accumulate_cell(prob, kr, idx / prob.mg.n_perp, idx % prob.mg.n_perp,
                        acc, ws);
      }
    }
  };

  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Fixed pairwise combination tree; order independent of thread count.
  int cnt = nleaves;
  while (cnt > 1) {
    const int half = cnt / 2;
    for (int k = 0; k < half; ++k) {
      leaves[2 * k].add(leaves[2 * k + 1], kr);
      if (k != 2 * k) leaves[k] = std::move(leaves[2 * k]);
    }
    if (cnt % 2 == 1) leaves[half] = std::move(leaves[cnt - 1]);
    cnt = half + cnt % 2;
  }

  SfaReductions out;
  LeafAcc& a0 = leaves[0];
  out.x = std::move(a0.x);
  out.gamma_re = std::move(a0.gre);
  out.gamma_im = std::move(a0.gim);
  out.kh = std::move(a0.kh);
  out.xf_re = std::move(a0.xfre);
  out.xf_im = std::move(a0.xfim);
  out.kf_re = std::move(a0.kfre);
  out.kf_im = std::move(a0.kfim);
  out.bh_re = std::move(a0.bhre);
  out.bh_im = std::move(a0.bhim);
  out.bf_re = std::move(a0.bfre);
  out.bf_im = std::move(a0.bfim);
  out.bg_re = std::move(a0.bgre);
  out.bg_im = std::move(a0.bgim);
  return out;
}

}  // namespace sqh
