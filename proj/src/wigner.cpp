#include "sqh/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "sqh/errors.hpp"

namespace sqh {

namespace {

using cd = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kLn2 = 0.69314718055994530942;

// Shared Wigner evaluation over the Fock basis,
//   W = (2/pi) Re sum_{n,n'} rho_{n,n'} (-1)^n D_{n',n}(b),  b = 2(x + ip),
// scanned by diagonals k = n' - n. Along a diagonal the matrix elements
//   D_{n+k,n} = sqrt(n!/(n+k)!) b^k e^{-|b|^2/2} L_n^{(k)}(|b|^2)
// obey the associated-Laguerre three-term recurrence rewritten directly in
// the bounded D values. Run upward in n this is forward-stable: the computed
// solution dominates while it grows out of the classically forbidden region
// and the recurrence is neutral once oscillatory. (Stepping the matrix row
// by row in n' instead admits an exponentially growing parasite solution and
// breaks down for dimensions in the thousands.) A power-of-two exponent
// offset keeps deep-forbidden diagonal heads representable; Hermiticity of
// rho folds the k < 0 triangle into the real part.
template <typename RhoAt>
double wigner_fock_sum(int K, cd b, RhoAt rho_at) {
  const double x = std::norm(b);
  if (x == 0.0) {
    double acc = 0.0;
    for (int n = 0; n < K; ++n) {
      const double sign = (n & 1) ? -1.0 : 1.0;
      acc += sign * rho_at(n, n).real();
    }
    return (2.0 / kPi) * acc;
  }

  std::vector<double> lnfact(static_cast<size_t>(K) + 1);
  lnfact[0] = 0.0;
  for (int i = 1; i <= K; ++i) {
    lnfact[static_cast<size_t>(i)] = lnfact[static_cast<size_t>(i) - 1] +
                                     std::log(static_cast<double>(i));
  }

  const double lb = 0.5 * std::log(x);
  const cd bhat = b / std::abs(b);
  cd phase{1.0, 0.0};  // bhat^k
  double acc = 0.0;

  for (int k = 0; k < K; ++k) {
    // Head of the diagonal, D_{k,0} = e^{-x/2} |b|^k / sqrt(k!), carried as
    // d * 2^sh so the start can sit far below the double underflow limit.
    const double ln_t0 = -0.5 * x + k * lb - 0.5 * lnfact[static_cast<size_t>(k)];
    int sh = static_cast<int>(ln_t0 / kLn2);
    double d_cur = std::exp(ln_t0 - sh * kLn2);
    double d_prev = 0.0;

    const double mult = (k == 0) ? 1.0 : 2.0;
    for (int n = 0; n + k < K; ++n) {
      double d_out = (sh >= -1000) ? std::ldexp(d_cur, sh) : 0.0;
      if (d_out != 0.0) {
        const double sign = (n & 1) ? -1.0 : 1.0;
        const cd w = rho_at(n, n + k) * phase;
        acc += mult * sign * w.real() * d_out;
      }
      // D_{n+1} = [(2n+k+1-x) D_n - sqrt(n(n+k)) D_{n-1}] / sqrt((n+1)(n+1+k))
      const double s_next = std::sqrt((n + 1.0) * (n + 1.0 + k));
      const double d_next =
          ((2.0 * n + k + 1.0 - x) * d_cur -
           std::sqrt(static_cast<double>(n) * (n + k)) * d_prev) /
          s_next;
      d_prev = d_cur;
      d_cur = d_next;
      const double a = std::fabs(d_cur);
      if (a > 1e150 || (a != 0.0 && a < 1e-150)) {
        const int adj = (a > 1e150) ? 512 : -512;
        d_cur = std::ldexp(d_cur, -adj);
        d_prev = std::ldexp(d_prev, -adj);
        sh += adj;
      }
    }
    phase *= bhat;
  }
  return (2.0 / kPi) * acc;
}

}  // namespace

DensityMatrix DensityMatrix::pure(const FockState& s) {
  if (s.size() == 0) throw DomainError("density matrix: empty state");
  DensityMatrix dm;
  dm.dim = s.size();
  dm.rho.assign(static_cast<size_t>(dm.dim) * dm.dim, cd{0.0, 0.0});
  for (int n = 0; n < dm.dim; ++n) {
    for (int np = 0; np < dm.dim; ++np) {
      dm.rho[static_cast<size_t>(n) * dm.dim + np] = s.c[n] * std::conj(s.c[np]);
    }
  }
  return dm;
}

DensityMatrix DensityMatrix::mixture(const std::vector<FockState>& states) {
  if (states.empty()) throw DomainError("density matrix: empty mixture");
  int dim = 0;
  for (const FockState& s : states) dim = std::max(dim, s.size());
  if (dim == 0) throw DomainError("density matrix: empty state in mixture");
  DensityMatrix dm;
  dm.dim = dim;
  dm.rho.assign(static_cast<size_t>(dim) * dim, cd{0.0, 0.0});
  const double w = 1.0 / static_cast<double>(states.size());
  for (const FockState& s : states) {
    for (int n = 0; n < s.size(); ++n) {
      for (int np = 0; np < s.size(); ++np) {
        dm.rho[static_cast<size_t>(n) * dim + np] += w * s.c[n] * std::conj(s.c[np]);
      }
    }
  }
  return dm;
}

double wigner_point(const DensityMatrix& dm, double x, double p) {
  if (dm.dim <= 0) throw DomainError("wigner: empty density matrix");
  const int K = dm.dim;
  const cd b = 2.0 * cd(x, p);
  const cd* rho = dm.rho.data();
  return wigner_fock_sum(K, b, [rho, K](int n, int np) {
    return rho[static_cast<size_t>(n) * K + np];
  });
}

double wigner_point(const FockState& state, double x, double p) {
  if (state.size() == 0) throw DomainError("wigner: empty state");
  const int K = state.size();
  const cd b = 2.0 * cd(x, p);
  const cd* c = state.c.data();
  return wigner_fock_sum(K, b, [c](int n, int np) {
    return c[n] * std::conj(c[np]);
  });
}

namespace {

template <typename StateLike>
std::vector<double> field_impl(const StateLike& s, const PhaseSpaceGrid& g) {
  if (g.nx < 2 || g.np < 2) throw DomainError("wigner: grid needs at least 2x2 points");
  if (!(g.x_max > g.x_min) || !(g.p_max > g.p_min)) {
    throw DomainError("wigner: grid extents must be increasing");
  }
  std::vector<double> out(static_cast<size_t>(g.nx) * g.np);
  for (int j = 0; j < g.np; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      out[static_cast<size_t>(j) * g.nx + i] = wigner_point(s, g.x(i), g.p(j));
    }
  }
  return out;
}

}  // namespace

std::vector<double> wigner_field(const DensityMatrix& rho, const PhaseSpaceGrid& grid) {
  return field_impl(rho, grid);
}

std::vector<double> wigner_field(const FockState& state, const PhaseSpaceGrid& grid) {
  return field_impl(state, grid);
}

double wigner_norm(const std::vector<double>& field, const PhaseSpaceGrid& grid) {
  if (static_cast<int>(field.size()) != grid.nx * grid.np) {
    throw DomainError("wigner: field does not match the grid");
  }
  double acc = 0.0;
  for (int j = 0; j < grid.np; ++j) {
    const double wj = (j == 0 || j == grid.np - 1) ? 0.5 : 1.0;
    for (int i = 0; i < grid.nx; ++i) {
      const double wi = (i == 0 || i == grid.nx - 1) ? 0.5 : 1.0;
      acc += wi * wj * field[static_cast<size_t>(j) * grid.nx + i];
    }
  }
  return acc * grid.dx() * grid.dp();
}

PhaseSpaceGrid adaptive_grid(const FockState& state, int nx, double pad) {
  if (state.size() == 0) throw DomainError("wigner: empty state");
  if (nx < 2) throw DomainError("wigner: grid needs at least 2 points per axis");
  // Per-axis extents from the quadrature second moments,
  //   <x^2> = (2 Re<a^2> + 2<n> + 1)/4,  <p^2> = (-2 Re<a^2> + 2<n> + 1)/4,
  // so strongly squeezed states get a grid fine enough to resolve the
  // narrow axis instead of a square box sized by <n> alone.
  double n_mean = 0.0;
  cd a2{0.0, 0.0};
  for (int n = 0; n < state.size(); ++n) {
    n_mean += n * std::norm(state.c[n]);
    if (n + 2 < state.size()) {
      a2 += std::conj(state.c[n]) * state.c[n + 2] *
            std::sqrt((n + 1.0) * (n + 2.0));
    }
  }
  const double var_x = (2.0 * a2.real() + 2.0 * n_mean + 1.0) / 4.0;
  const double var_p = (-2.0 * a2.real() + 2.0 * n_mean + 1.0) / 4.0;
  const double hx = pad * std::sqrt(std::max(var_x, 0.0)) + 1.0;
  const double hp = pad * std::sqrt(std::max(var_p, 0.0)) + 1.0;
  PhaseSpaceGrid g;
  g.x_min = -hx;
  g.x_max = hx;
  g.p_min = -hp;
  g.p_max = hp;
  g.nx = nx;
  g.np = nx;
  return g;
}

WashoutCurve washout_curve(const SidebandCoupling& sc, long long l,
                           int delta_l_max, const WashoutOptions& opt,
                           const ProjectionOptions& popt) {
  if (l < 0) throw DomainError("washout: photon number must be >= 0");
  if (delta_l_max < 0) throw DomainError("washout: delta_l_max must be >= 0");
  if (opt.samples < 2 || !(opt.window > 0)) {
    throw DomainError("washout: need window > 0 and at least 2 samples");
  }

  // Fringe axis convention: x for Re[alpha_N] >= 0, else p (the cat lobes sit
  // at +/- i sqrt(alpha_N), so the interference oscillates along the
  // conjugate axis).
  bool along_x = true;
  try {
    along_x = projq_alpha(sc, l).real() >= 0.0;
  } catch (const DomainError&) {
    // r = 0 or l < 2: no interference structure; keep the default axis.
  }

  const int S = opt.samples;
  std::vector<double> sum(static_cast<size_t>(S), 0.0);
  int count = 0;

  WashoutCurve curve;
  double mod0 = -1.0;
  for (int dl = 0; dl <= delta_l_max; ++dl) {
    const long long lp = l + dl;
    const bool include = !opt.even_only || ((dl & 1) == 0);
    if (include) {
      const FockState st = project_on_q(sc, lp, popt);
      for (int s = 0; s < S; ++s) {
        const double q = -opt.window + 2.0 * opt.window * s / (S - 1);
        const double w = along_x ? wigner_point(st, q, 0.0)
                                 : wigner_point(st, 0.0, q);
        sum[static_cast<size_t>(s)] += w;
      }
      ++count;
    }
    double lo = sum[0] / count, hi = sum[0] / count;
    for (int s = 1; s < S; ++s) {
      const double v = sum[static_cast<size_t>(s)] / count;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double mod = hi - lo;
    if (dl == 0) mod0 = mod;
    curve.delta_l.push_back(dl);
    curve.modulation.push_back(mod);
    curve.ratio.push_back(mod0 > 0 ? mod / mod0 : (dl == 0 ? 1.0 : 0.0));
  }
  return curve;
}

}  // namespace sqh
