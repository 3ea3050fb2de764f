#include "sqh/fockspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sqh/errors.hpp"

namespace sqh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRescaleHi = 1e250;
constexpr double kLnRescale = 575.6462732485114;  // ln(1e250)

void check_coupling(const SidebandCoupling& sc) {
  if (sc.r < 0) throw DomainError("sideband coupling: squeezing r must be >= 0");
  if (!std::isfinite(sc.r) || !std::isfinite(sc.theta) ||
      !std::isfinite(sc.zeta.real()) || !std::isfinite(sc.zeta.imag())) {
    throw DomainError("sideband coupling: parameters must be finite");
  }
}

// ln of a nonnegative base raised to a nonnegative integer power, with the
// 0^0 = 1 convention (avoids 0 * -inf = NaN).
double pow_log(double ln_base, long long k) {
  return (k == 0) ? 0.0 : static_cast<double>(k) * ln_base;
}

}  // namespace

std::complex<double> SidebandCoupling::beta() const {
  return std::polar(0.5 * std::tanh(r), -theta);
}

std::complex<double> SidebandCoupling::beta_N() const {
  return beta() / (1.0 + zeta2());
}

double SidebandCoupling::norm_N() const { return 1.0 / std::sqrt(1.0 + zeta2()); }

double SidebandCoupling::mean_photons() const {
  const double ch = std::cosh(r);
  return ch * ch * zeta2();
}

std::complex<double> joint_amplitude(const SidebandCoupling& sc, long long m,
                                     long long n) {
  check_coupling(sc);
  if (m < 0 || n < 0) throw DomainError("joint amplitude: photon numbers must be >= 0");
  if (n < m || ((n - m) & 1)) return {0.0, 0.0};
  const long long j = (n - m) / 2;
  const double az = std::abs(sc.zeta);
  const std::complex<double> bn = sc.beta_N();
  const double ab = std::abs(bn);
  if ((m > 0 && az == 0.0) || (j > 0 && ab == 0.0)) return {0.0, 0.0};
  const double ln_mag = std::log(sc.norm_N()) - 0.5 * std::log(std::cosh(sc.r)) +
                        pow_log(std::log(az), m) + pow_log(std::log(ab), j) +
                        0.5 * std::lgamma(static_cast<double>(n) + 1.0) -
                        0.5 * std::lgamma(static_cast<double>(m) + 1.0) -
                        std::lgamma(static_cast<double>(j) + 1.0);
  const double phase = static_cast<double>(m) * std::arg(sc.zeta) +
                       static_cast<double>(j) * (std::arg(bn) + std::acos(-1.0));
  return std::polar(std::exp(ln_mag), phase);
}

std::vector<double> joint_distribution(const SidebandCoupling& sc,
                                       long long m_max, long long n_max) {
  if (m_max < 0 || n_max < 0) throw DomainError("joint distribution: bounds must be >= 0");
  std::vector<double> out(static_cast<size_t>((m_max + 1) * (n_max + 1)), 0.0);
  for (long long m = 0; m <= m_max; ++m) {
    for (long long n = 0; n <= n_max; ++n) {
      out[static_cast<size_t>(m * (n_max + 1) + n)] = std::norm(joint_amplitude(sc, m, n));
    }
  }
  return out;
}

double marginal_exact_termwise(const SidebandCoupling& sc, long long m,
                               bool allow_expensive) {
  check_coupling(sc);
  if (m < 0) throw DomainError("marginal: photon number must be >= 0");
  const double u = sc.zeta2();
  const double x = std::abs(sc.beta_N());
  if (m > 0 && u == 0.0) return 0.0;

  // Cost estimate: the term peak sits near x*m/(1-2x) and the geometric tail
  // behind it needs O(1/(1-4x^2)) further terms.
  const double denom_lin = std::max(1.0 - 2.0 * x, 1e-300);
  const double denom_quad = std::max(1.0 - 4.0 * x * x, 1e-300);
  const double est_terms = x * static_cast<double>(m) / denom_lin + 30.0 / denom_quad;
  if (!allow_expensive && (sc.r > 12.0 || est_terms > 2e9)) {
    throw RefusalError(
        "exact termwise marginal refused: r = " + std::to_string(sc.r) +
        ", estimated terms = " + std::to_string(est_terms) +
        " (enable allow_expensive to force)");
  }

  // P(m) = (Norm^2/cosh r) u^m sum_j s_j,  s_j = x^{2j} (m+2j)!/(m! (j!)^2),
  // s_0 = 1, s_{j+1}/s_j = x^2 (m+2j+2)(m+2j+1)/(j+1)^2.  The partial sum is
  // kept rescaled by e^{-offset} so it never overflows.
  double term = 1.0;
  double partial = 1.0;
  double offset = 0.0;
  double ratio = kInf;
  for (long long j = 0;; ++j) {
    const double md = static_cast<double>(m);
    const double jd = static_cast<double>(j);
    ratio = x * x * (md + 2.0 * jd + 2.0) * (md + 2.0 * jd + 1.0) /
            ((jd + 1.0) * (jd + 1.0));
    term *= ratio;
    partial += term;
    if (partial > kRescaleHi) {
      partial /= kRescaleHi;
      term /= kRescaleHi;
      offset += kLnRescale;
    }
    if (ratio < 0.999 && term < 1e-12 * partial) break;
  }
  const double ln_p = 2.0 * std::log(sc.norm_N()) - std::log(std::cosh(sc.r)) +
                      pow_log(std::log(u), m) + std::log(partial) + offset;
  return std::exp(ln_p);
}

std::vector<double> marginal_exact_log(const SidebandCoupling& sc, long long m_max) {
  check_coupling(sc);
  if (m_max < 0) throw DomainError("marginal: photon number bound must be >= 0");
  const double u = sc.zeta2();
  // q = 1 - 4x^2 with x = |beta_N| = tanh(r)/(2(1+u)). Forming it from x
  // directly cancels catastrophically at large r (x -> 1/2), and the
  // recurrence divides by q every step, so the relative error of q would
  // compound exponentially in m. Build it from 1 - tanh r = 2/(e^{2r}+1),
  // which is exact to rounding:
  //   1 - 2x = (u + (1 - tanh r)) / (1 + u),
  //   1 + 2x = (2 + u - (1 - tanh r)) / (1 + u).
  const double t1m = 2.0 / (std::exp(2.0 * sc.r) + 1.0);  // 1 - tanh r
  const double q =
      (u + t1m) * (2.0 + u - t1m) / ((1.0 + u) * (1.0 + u));
  const double ln_pref = 2.0 * std::log(sc.norm_N()) - std::log(std::cosh(sc.r));

  std::vector<double> ln_p(static_cast<size_t>(m_max) + 1, -kInf);
  // h_m solves (1-4x^2)(m+1) h_{m+1} = u(2m+1) h_m - u^2 m h_{m-1},
  // h_0 = q^{-1/2}, h_1 = u q^{-3/2}; P(m) = pref * h_m.  h is the dominant
  // solution of the recurrence, so forward iteration is stable; a shared
  // exponent offset keeps the pair in double range.
  double h_prev = 1.0 / std::sqrt(q);
  double h_cur = u / (q * std::sqrt(q));
  double offset = 0.0;
  ln_p[0] = ln_pref + std::log(h_prev);
  if (m_max >= 1 && h_cur > 0) ln_p[1] = ln_pref + std::log(h_cur) + offset;
  for (long long m = 1; m < m_max; ++m) {
    const double md = static_cast<double>(m);
    const double h_next =
        (u * (2.0 * md + 1.0) * h_cur - u * u * md * h_prev) / (q * (md + 1.0));
    h_prev = h_cur;
    h_cur = h_next;
    const double mag = std::max(std::abs(h_cur), std::abs(h_prev));
    if (mag > kRescaleHi) {
      h_cur /= kRescaleHi;
      h_prev /= kRescaleHi;
      offset += kLnRescale;
    } else if (mag > 0 && mag < 1.0 / kRescaleHi) {
      h_cur *= kRescaleHi;
      h_prev *= kRescaleHi;
      offset -= kLnRescale;
    }
    if (h_cur > 0) ln_p[static_cast<size_t>(m) + 1] = ln_pref + std::log(h_cur) + offset;
  }
  return ln_p;
}

double marginal_analytic_log(const SidebandCoupling& sc, long long m) {
  check_coupling(sc);
  if (m < 0) throw DomainError("marginal: photon number must be >= 0");
  const double nbar = sc.mean_photons();
  const double th = std::tanh(sc.r);
  const double g = 2.0 * nbar * th * th;  // per-photon weight
  if (m > 0 && g == 0.0) return -kInf;
  const double md = static_cast<double>(m);
  // ln[(2m-1)!!/(2m)!!] = lgamma(m+1/2) - lgamma(1/2) - lgamma(m+1)
  const double ln_df = std::lgamma(md + 0.5) - 0.5 * std::log(std::acos(-1.0)) -
                       std::lgamma(md + 1.0);
  return ln_df + pow_log(std::log(g), m) -
         (md + 0.5) * std::log1p(2.0 * nbar);
}

double marginal_analytic(const SidebandCoupling& sc, long long m) {
  return std::exp(marginal_analytic_log(sc, m));
}

double marginal_analytic_sum(const SidebandCoupling& sc) {
  check_coupling(sc);
  return 1.0 / std::sqrt(1.0 + 2.0 * sc.zeta2());
}

namespace {

// Shared tail: build a normalized state from per-index log magnitudes and
// phases (max-log normalization, safe for very large common factors).
FockState assemble_state(long long dim, const std::vector<long long>& idx,
                         const std::vector<double>& ln_mag,
                         const std::vector<double>& phase) {
  double max_ln = -kInf;
  for (double v : ln_mag) max_ln = std::max(max_ln, v);
  if (max_ln == -kInf) {
    throw DomainError("projection: conditioning on a zero-probability outcome");
  }
  FockState st;
  st.c.assign(static_cast<size_t>(dim), {0.0, 0.0});
  double norm2 = 0.0;
  std::vector<double> mag(ln_mag.size());
  for (size_t i = 0; i < ln_mag.size(); ++i) {
    mag[i] = std::exp(ln_mag[i] - max_ln);
    norm2 += mag[i] * mag[i];
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (size_t i = 0; i < ln_mag.size(); ++i) {
    st.c[static_cast<size_t>(idx[i])] = std::polar(mag[i] * inv, phase[i]);
  }
  return st;
}

}  // namespace

FockState project_on_q(const SidebandCoupling& sc, long long l,
                       const ProjectionOptions& opt) {
  check_coupling(sc);
  if (l < 0) throw DomainError("projection: photon number must be >= 0");
  // The amplitude chain is one O(l) sweep; the returned state is truncated
  // to the populated head, so memory does not scale with l.
  if (l > 200'000'000 && !opt.allow_expensive) {
    throw RefusalError("projection on the drive sideband refused: outcome " +
                       std::to_string(l) + " needs an O(l) amplitude sweep "
                       "(enable allow_expensive to force)");
  }
  const long long eta = l & 1;
  const double az = std::abs(sc.zeta);
  const std::complex<double> bn = sc.beta_N();
  const double ab = std::abs(bn);
  const double arg_z = std::arg(sc.zeta);
  const double arg_mb = std::arg(bn) + std::acos(-1.0);  // arg(-beta_N)

  std::vector<long long> idx;
  std::vector<double> ln_mag, phase;
  if (az == 0.0 || ab == 0.0) {
    // Degenerate couplings populate at most one Fock index; evaluate the
    // surviving terms directly.
    const double half_lg_l = 0.5 * std::lgamma(static_cast<double>(l) + 1.0);
    for (long long k = 0; 2 * k + eta <= l; ++k) {
      const long long mu = 2 * k + eta;
      const long long j = (l - mu) / 2;
      if ((mu > 0 && az == 0.0) || (j > 0 && ab == 0.0)) continue;
      idx.push_back(mu);
      ln_mag.push_back(pow_log(std::log(az), mu) + pow_log(std::log(ab), j) +
                       half_lg_l -
                       0.5 * std::lgamma(static_cast<double>(mu) + 1.0) -
                       std::lgamma(static_cast<double>(j) + 1.0));
      phase.push_back(static_cast<double>(mu) * arg_z +
                      static_cast<double>(j) * arg_mb);
    }
  } else {
    // ln|amplitude| on mu = 2k + eta (unnormalized):
    //   mu ln az + j ln ab + lgamma(l+1)/2 - lgamma(mu+1)/2 - lgamma(j+1),
    // j = (l - mu)/2, advanced incrementally in k. The profile is concave
    // in mu with a single peak near |alpha|, so once the magnitude has
    // dropped below the tail bound past the peak the rest is negligible.
    double lm = (eta ? std::log(az) : 0.0) +
                static_cast<double>((l - eta) / 2) * std::log(ab) +
                0.5 * std::lgamma(static_cast<double>(l) + 1.0) -
                std::lgamma(static_cast<double>((l - eta) / 2) + 1.0);
    double ph = static_cast<double>(eta) * arg_z +
                static_cast<double>((l - eta) / 2) * arg_mb;
    double best = -kInf;
    for (long long k = 0;; ++k) {
      const long long mu = 2 * k + eta;
      const long long j = (l - mu) / 2;
      idx.push_back(mu);
      ln_mag.push_back(lm);
      phase.push_back(ph);
      best = std::max(best, lm);
      if (lm < best + 0.5 * std::log(opt.tail_epsilon) - 40.0 &&
          static_cast<double>(mu) >
              2.0 * std::norm(sc.zeta) * static_cast<double>(l)) {
        break;
      }
      if (mu + 2 > l) break;
      // mu -> mu + 2, j -> j - 1
      lm += 2.0 * std::log(az) - std::log(ab) -
            0.5 * std::log((mu + 1.0) * (mu + 2.0)) +
            std::log(static_cast<double>(j));
      ph += 2.0 * arg_z - arg_mb;
    }
  }
  const long long dim = idx.empty() ? 1 : idx.back() + 1;
  return assemble_state(dim, idx, ln_mag, phase);
}

std::complex<double> projq_alpha(const SidebandCoupling& sc, long long l) {
  check_coupling(sc);
  if (l < 0) throw DomainError("projection: photon number must be >= 0");
  const long long eta = l & 1;
  if (l - eta == 0) return {0.0, 0.0};
  const std::complex<double> bn = sc.beta_N();
  if (std::abs(bn) == 0.0) {
    throw DomainError("coherent-pair approximation undefined at r = 0");
  }
  return static_cast<double>(l - eta) * sc.zeta2() / (2.0 * bn);
}

FockState project_on_q_analytic(const SidebandCoupling& sc, long long l,
                                const ProjectionOptions& opt) {
  check_coupling(sc);
  if (l < 0) throw DomainError("projection: photon number must be >= 0");
  const long long eta = l & 1;
  std::complex<double> alpha{0.0, 0.0};
  if (l - eta > 0 && std::abs(sc.beta_N()) > 0) alpha = projq_alpha(sc, l);
  const double aa = std::abs(alpha);

  if (aa == 0.0) {
    // Degenerate limits: |0> for even outcomes, |1> for odd.
    FockState st;
    st.c.assign(static_cast<size_t>(eta) + 1, {0.0, 0.0});
    st.c[static_cast<size_t>(eta)] = {1.0, 0.0};
    return st;
  }

  long long dim = static_cast<long long>(aa + 12.0 * std::sqrt(aa) + 30.0);
  dim = std::min(dim, opt.max_dimension);
  const double ln_a = std::log(aa);
  const double arg_a = std::arg(alpha);
  std::vector<long long> idx;
  std::vector<double> ln_mag, phase;
  for (long long k = 0; 2 * k + eta < dim; ++k) {
    const long long n = 2 * k + eta;
    // c_n ~ (-1)^k (sqrt(alpha))^n / sqrt(n!)
    idx.push_back(n);
    ln_mag.push_back(0.5 * static_cast<double>(n) * ln_a -
                     0.5 * std::lgamma(static_cast<double>(n) + 1.0));
    phase.push_back(0.5 * static_cast<double>(n) * arg_a +
                    static_cast<double>(k) * std::acos(-1.0));
  }
  return assemble_state(dim, idx, ln_mag, phase);
}

FockState project_on_N(const SidebandCoupling& sc, long long m,
                       const ProjectionOptions& opt) {
  check_coupling(sc);
  if (m < 0) throw DomainError("projection: photon number must be >= 0");
  if (m > 0 && std::abs(sc.zeta) == 0.0) {
    throw DomainError("projection: conditioning on a zero-probability outcome");
  }
  const std::complex<double> bn = sc.beta_N();
  const double x = std::abs(bn);
  const double md = static_cast<double>(m);

  if (x == 0.0) {
    // r = 0 leaves only the pairless j = 0 term: band and sideband are
    // twin-beam correlated, so seeing m photons collapses the sideband to
    // exactly |m>.
    FockState st;
    st.c.assign(static_cast<size_t>(m) + 1, {0.0, 0.0});
    st.c[static_cast<size_t>(m)] = {1.0, 0.0};
    return st;
  }

  const double denom_lin = std::max(1.0 - 2.0 * x, 1e-300);
  const double denom_quad = std::max(1.0 - 4.0 * x * x, 1e-300);
  const double j_peak = x * (md + 2.0) / denom_lin + 1.0;
  const double est_j = j_peak + 30.0 / denom_quad + 20.0;
  const double est_dim = 2.0 * est_j + md + 1.0;
  if (!opt.allow_expensive && est_dim > static_cast<double>(opt.max_dimension)) {
    throw RefusalError(
        "projection on the harmonic band refused: estimated dimension " +
        std::to_string(est_dim) + " exceeds max_dimension (enable "
        "allow_expensive to force)");
  }
  if (est_dim > 5e7) {
    throw RefusalError("projection on the harmonic band refused: estimated dimension " +
                       std::to_string(est_dim) + " is beyond the memory cap");
  }

  const double ln_x = std::log(x);
  const double arg_mb = std::arg(bn) + std::acos(-1.0);
  const long long j_hard = static_cast<long long>(3.0 * est_j) + 1000;
  std::vector<long long> idx;
  std::vector<double> ln_mag, phase;
  double max_ln = -kInf;
  for (long long j = 0; j <= j_hard; ++j) {
    const double jd = static_cast<double>(j);
    const double lm = pow_log(ln_x, j) +
                      0.5 * std::lgamma(2.0 * jd + md + 1.0) -
                      std::lgamma(jd + 1.0);
    idx.push_back(2 * j + m);
    ln_mag.push_back(lm);
    phase.push_back(jd * arg_mb);
    max_ln = std::max(max_ln, lm);
    // Stop once past the peak and the tail is negligible at the requested
    // truncation accuracy.
    const double ratio = x * x * (2.0 * jd + md + 2.0) * (2.0 * jd + md + 1.0) /
                         ((jd + 1.0) * (jd + 1.0));
    if (j >= 4 && ratio < 0.999 &&
        2.0 * (lm - max_ln) < std::log(opt.tail_epsilon) - 40.0) {
      break;
    }
  }
  return assemble_state(idx.back() + 1, idx, ln_mag, phase);
}

}  // namespace sqh
