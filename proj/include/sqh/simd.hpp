#pragma once
#include <cstddef>

// Low-level numeric kernels with two interchangeable implementations:
// a scalar reference and an AVX2 one. Both follow the same floating-point
// contract so their results are bit-identical:
//
//  * reductions keep four independent partial sums; element i is always
//    accumulated into partial i mod 4 with a fused multiply-add, and the
//    partials are combined as (s0+s1)+(s2+s3);
//  * elementwise kernels evaluate the same expression tree per element;
//  * the library is compiled with -ffp-contract=off so no implicit
//    contractions differ between translation units.
//
// The active implementation is chosen once at startup: AVX2 when the CPU
// supports it, unless the environment variable SQH_FORCE_SCALAR is set to a
// non-empty value other than "0".
namespace sqh::simd {

struct Kernels {
  const char* name;

  // w[i] = sum_{j=0..W} khat[j] * u[i-j]   for i in [i0, n).
  // Caller guarantees i0 >= W+1 (full windows only; the ramp region is
  // handled by shared scalar code in the dispatch layer).
  void (*windowed_corr_main)(const double* khat, int W, const double* u,
                             double* w, int i0, int n);

  // Real-series dot against a complex phase table:
  //   re = sum_i a[i]*pre[i],  im = sum_i a[i]*pim[i]
  void (*rdot)(const double* a, const double* pre, const double* pim, int n,
               double* re, double* im);

  // Complex-series dot against a complex phase table:
  //   (re + i im) = sum_i (are[i] + i aim[i]) * (pre[i] + i pim[i])
  void (*cdot)(const double* are, const double* aim, const double* pre,
               const double* pim, int n, double* re, double* im);

  // z[i] += c * a[i] * b[i]
  void (*amul)(double c, const double* a, const double* b, int n, double* z);

  // z[i] = a[i] * b[i]
  void (*emul)(const double* a, const double* b, int n, double* z);

  // z[i] += c * a[i]
  void (*axpy)(double c, const double* a, int n, double* z);
};

const Kernels& scalar();
// Null when this build or CPU cannot run AVX2.
const Kernels* avx2_or_null();
// Dispatched implementation (see header comment for selection rules).
const Kernels& active();
const char* active_name();

// Shared scalar helper for the ramp region i in [0, min(W, n-1)] of the
// windowed correlation with trapezoid endpoint correction:
//   w[i] = sum_{j=0..i} khat[j]*u[i-j] - 0.5*k[i]*u[0]
// where khat[0] = 0.5*k[0] and khat[j>=1] = k[j]. Both implementations use
// this identical code path, so it lives with the dispatcher.
void windowed_corr_ramp(const double* k, const double* khat, int W,
                        const double* u, double* w, int n);

}  // namespace sqh::simd
