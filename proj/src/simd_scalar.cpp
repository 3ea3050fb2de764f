#include <cmath>

#include "sqh/simd.hpp"

// Scalar reference kernels. The AVX2 implementation mirrors these exactly:
// per output element (or per modulo-4 partial sum) the same fused
// multiply-add chain runs in the same order, so results are bit-identical.
namespace sqh::simd {
namespace {

void windowed_corr_main_(const double* khat, int W, const double* u, double* w,
                         int i0, int n) {
  for (int i = i0; i < n; ++i) {
    double acc = 0.0;
    const double* us = u + i;
    for (int j = 0; j <= W; ++j) acc = std::fma(khat[j], us[-j], acc);
    w[i] = acc;
  }
}

void rdot_(const double* a, const double* pre, const double* pim, int n,
           double* re, double* im) {
  double sr[4] = {0, 0, 0, 0}, si[4] = {0, 0, 0, 0};
  for (int i = 0; i < n; ++i) {
    sr[i & 3] = std::fma(a[i], pre[i], sr[i & 3]);
    si[i & 3] = std::fma(a[i], pim[i], si[i & 3]);
  }
  *re = (sr[0] + sr[1]) + (sr[2] + sr[3]);
  *im = (si[0] + si[1]) + (si[2] + si[3]);
}

void cdot_(const double* are, const double* aim, const double* pre,
           const double* pim, int n, double* re, double* im) {
  double rr[4] = {0, 0, 0, 0}, ii[4] = {0, 0, 0, 0};
  double ri[4] = {0, 0, 0, 0}, ir[4] = {0, 0, 0, 0};
  for (int i = 0; i < n; ++i) {
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
  for (int i = 0; i < n; ++i) {
    const double t = c * a[i];
    z[i] = std::fma(t, b[i], z[i]);
  }
}

void emul_(const double* a, const double* b, int n, double* z) {
  for (int i = 0; i < n; ++i) z[i] = a[i] * b[i];
}

void axpy_(double c, const double* a, int n, double* z) {
  for (int i = 0; i < n; ++i) z[i] = std::fma(c, a[i], z[i]);
}

const Kernels kScalar = {
    "scalar", &windowed_corr_main_, &rdot_, &cdot_, &amul_, &emul_, &axpy_,
};

}  // namespace

const Kernels& scalar() { return kScalar; }

}  // namespace sqh::simd
