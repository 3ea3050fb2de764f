#include <cmath>

#include "sqh/simd.hpp"

// AVX2 + FMA kernels. This is the only translation unit built with -mavx2
// -mfma; it is reached solely through the runtime dispatcher after a CPUID
// check. Floating-point contract: identical to the scalar reference —
// per-lane FMA chains run in the same order over the same elements, scalar
// remainders reuse the same expression trees, and partial sums combine as
// (s0+s1)+(s2+s3).

#ifdef SQH_BUILD_AVX2
#include <immintrin.h>

namespace sqh::simd {
namespace {

void windowed_corr_main_(const double* khat, int W, const double* u, double* w,
                         int i0, int n) {
  int i = i0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    const double* us = u + i;
    for (int j = 0; j <= W; ++j) {
      // Lane L accumulates fma(khat[j], u[i+L-j], .) in ascending j order —
      // exactly the scalar chain for output i+L.
      const __m256d kj = _mm256_set1_pd(khat[j]);
      const __m256d uv = _mm256_loadu_pd(us - j);
      acc = _mm256_fmadd_pd(kj, uv, acc);
    }
    _mm256_storeu_pd(w + i, acc);
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    const double* us = u + i;
    for (int j = 0; j <= W; ++j) acc = std::fma(khat[j], us[-j], acc);
    w[i] = acc;
  }
}

void rdot_(const double* a, const double* pre, const double* pim, int n,
           double* re, double* im) {
  __m256d vr = _mm256_setzero_pd(), vi = _mm256_setzero_pd();
  const int n4 = n & ~3;
  for (int i = 0; i < n4; i += 4) {
    const __m256d av = _mm256_loadu_pd(a + i);
    vr = _mm256_fmadd_pd(av, _mm256_loadu_pd(pre + i), vr);
    vi = _mm256_fmadd_pd(av, _mm256_loadu_pd(pim + i), vi);
  }
  alignas(32) double sr[4], si[4];
  _mm256_store_pd(sr, vr);
  _mm256_store_pd(si, vi);
  for (int i = n4; i < n; ++i) {
    sr[i & 3] = std::fma(a[i], pre[i], sr[i & 3]);
    si[i & 3] = std::fma(a[i], pim[i], si[i & 3]);
  }
  *re = (sr[0] + sr[1]) + (sr[2] + sr[3]);
  *im = (si[0] + si[1]) + (si[2] + si[3]);
}

void cdot_(const double* are, const double* aim, const double* pre,
           const double* pim, int n, double* re, double* im) {
  __m256d vrr = _mm256_setzero_pd(), vii = _mm256_setzero_pd();
  __m256d vri = _mm256_setzero_pd(), vir = _mm256_setzero_pd();
  const int n4 = n & ~3;
  for (int i = 0; i < n4; i += 4) {
    const __m256d ar = _mm256_loadu_pd(are + i);
    const __m256d ai = _mm256_loadu_pd(aim + i);
    const __m256d pr = _mm256_loadu_pd(pre + i);
    const __m256d pi = _mm256_loadu_pd(pim + i);
    vrr = _mm256_fmadd_pd(ar, pr, vrr);
    vii = _mm256_fmadd_pd(ai, pi, vii);
    vri = _mm256_fmadd_pd(ar, pi, vri);
    vir = _mm256_fmadd_pd(ai, pr, vir);
  }
  alignas(32) double rr[4], ii[4], ri[4], ir[4];
  _mm256_store_pd(rr, vrr);
  _mm256_store_pd(ii, vii);
  _mm256_store_pd(ri, vri);
  _mm256_store_pd(ir, vir);
  for (int i = n4; i < n; ++i) {
    const int l = i & 3;
    rr[l] = std::fma(are[i], pre[i], rr[l]);
    ii[l] = std::fma(aim[i], pim[i], ii[l]);
    ri[l] = std::fma(are[i], pim[i], ri[l]);
    ir[l] = std::fma(aim[i], pre[i], ir[l]);
  }
  const double srr = (rr[0] + rr[1]) + (rr[2] + rr[3]);
  const double sii = (ii[0] + ii[1]) + (ii[2] + ii[3]);
  const double sri = (ri[0] + ri[1]) + (ri[2] + ri[3]);
  const double sir = (ir[0] + ir[1]) + (ir[2] + ir[3]);
  *re = srr - sii;
  *im = sri + sir;
}

void amul_(double c, const double* a, const double* b, int n, double* z) {
  const __m256d vc = _mm256_set1_pd(c);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(vc, _mm256_loadu_pd(a + i));
    const __m256d zv = _mm256_fmadd_pd(t, _mm256_loadu_pd(b + i),
                                       _mm256_loadu_pd(z + i));
    _mm256_storeu_pd(z + i, zv);
  }
  for (; i < n; ++i) {
    const double t = c * a[i];
    z[i] = std::fma(t, b[i], z[i]);
  }
}

void emul_(const double* a, const double* b, int n, double* z) {
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(z + i, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                          _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) z[i] = a[i] * b[i];
}

void axpy_(double c, const double* a, int n, double* z) {
  const __m256d vc = _mm256_set1_pd(c);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d zv = _mm256_fmadd_pd(vc, _mm256_loadu_pd(a + i),
                                       _mm256_loadu_pd(z + i));
    _mm256_storeu_pd(z + i, zv);
  }
  for (; i < n; ++i) z[i] = std::fma(c, a[i], z[i]);
}

const Kernels kAvx2 = {
    "avx2", &windowed_corr_main_, &rdot_, &cdot_, &amul_, &emul_, &axpy_,
};

}  // namespace

const Kernels* avx2_or_null() {
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return &kAvx2;
  }
  return nullptr;
}

}  // namespace sqh::simd

#else  // !SQH_BUILD_AVX2

namespace sqh::simd {
const Kernels* avx2_or_null() { return nullptr; }
}  // namespace sqh::simd

#endif
