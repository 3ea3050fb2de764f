#pragma once
#include <complex>
#include <vector>

namespace sqh {

// Two-mode description of one harmonic band (mode N) entangled with the
// squeezed drive sideband (mode q), to leading order in the band coupling:
//
//   |phi> = (Norm/sqrt(cosh r)) exp(zeta a_N^+ a_q^+) exp(-beta_N a_q^+2) |0,0>
//
// with beta = (tanh r / 2) e^{-i theta} and beta_N = beta/(1+|zeta|^2),
// Norm = (1+|zeta|^2)^{-1/2}.
struct SidebandCoupling {
  double r = 0.0;
  double theta = 0.0;
  std::complex<double> zeta;

  double zeta2() const { return std::norm(zeta); }
  std::complex<double> beta() const;
  std::complex<double> beta_N() const;
  double norm_N() const;          // (1+|zeta|^2)^{-1/2}
  double mean_photons() const;    // cosh^2 r * |zeta|^2
};

// Joint amplitude <m, n | phi> (m photons in the harmonic band, n in the
// drive sideband): zero unless n >= m and n - m even, else
//   (Norm/sqrt(cosh r)) zeta^m (-beta_N)^j sqrt(n!) / (sqrt(m!) j!),
// j = (n - m)/2. Log-domain evaluation; exact checkerboard zeros.
std::complex<double> joint_amplitude(const SidebandCoupling& sc, long long m,
                                     long long n);

// P(m, n) = |<m, n|phi>|^2 for 0 <= m <= m_max, 0 <= n <= n_max,
// row-major [m * (n_max+1) + n].
std::vector<double> joint_distribution(const SidebandCoupling& sc,
                                       long long m_max, long long n_max);

// ---- harmonic-band photon-number marginal P_N(m) ---------------------------

// Literal termwise sum P(m) = (Norm^2/cosh r)(|zeta|^{2m}/m!) *
// sum_n |beta_N|^{2n} (2n+m)!/(n!)^2, evaluated with running-ratio
// rescaling. Refuses r > 12, or an estimated term count beyond 2e9, unless
// allow_expensive.
double marginal_exact_termwise(const SidebandCoupling& sc, long long m,
                               bool allow_expensive = false);

// Same quantity for m = 0..m_max through the three-term recurrence satisfied
// by h_m = P(m) cosh(r)/Norm^2,
//   (1-4x^2)(m+1) h_{m+1} = u(2m+1) h_m - u^2 m h_{m-1},
//   u = |zeta|^2, x = |beta_N|,
// which follows from the closed-form generating function
// sum_m h_m s^m = [(1-us)^2 - 4x^2]^{-1/2}. Forward-stable (h is the
// dominant solution) and O(1) per m. Returns ln P(m); entries may exceed
// the double range in the unnormalizable regime |zeta|^2 cosh r > 1/sqrt(2),
// which the log representation survives.
std::vector<double> marginal_exact_log(const SidebandCoupling& sc,
                                       long long m_max);

// Large-r closed form P(m) = (2m-1)!!/(2m)!! (2 nbar tanh^2 r)^m /
// (1+2 nbar)^{m+1/2}, nbar = |zeta|^2 cosh^2 r. Returns ln P(m).
double marginal_analytic_log(const SidebandCoupling& sc, long long m);
double marginal_analytic(const SidebandCoupling& sc, long long m);

// sum_m P_analytic(m); equals (1+2|zeta|^2)^{-1/2} identically.
double marginal_analytic_sum(const SidebandCoupling& sc);

// ---- conditional states -----------------------------------------------------

struct FockState {
  std::vector<std::complex<double>> c;  // c[n] = <n|psi>, normalized
  int size() const { return static_cast<int>(c.size()); }
};

struct ProjectionOptions {
  bool allow_expensive = false;
  double tail_epsilon = 1e-14;   // truncation: neglected probability bound
  long long max_dimension = 2'000'000;
};

// State of the harmonic band after measuring l photons in the drive
// sideband. Populated Fock indices share the parity of l; normalized.
// The overall phase follows the amplitude chain
// zeta^mu (-beta_N)^{(l-mu)/2} (global phase convention documented in the
// implementation).
FockState project_on_q(const SidebandCoupling& sc, long long l,
                       const ProjectionOptions& opt = {});

// Coherent-pair approximation of the same state, valid for populated
// mu << l: amplitudes proportional to (-1)^k alpha_N^{(2k+eta)/2-ish}; see
// implementation. alpha_N = (l - eta)|zeta|^2/(2 beta_N), eta = l mod 2.
std::complex<double> projq_alpha(const SidebandCoupling& sc, long long l);
FockState project_on_q_analytic(const SidebandCoupling& sc, long long l,
                                const ProjectionOptions& opt = {});

// State of the drive sideband after measuring m photons in the harmonic
// band: amplitudes on |2j + m> proportional to (-beta_N)^j sqrt((2j+m)!)/j!.
// This is an m-photon-added squeezed vacuum with tanh r_eff =
// tanh(r)/(1+|zeta|^2). Truncated at the tail_epsilon probability bound.
FockState project_on_N(const SidebandCoupling& sc, long long m,
                       const ProjectionOptions& opt = {});

}  // namespace sqh
