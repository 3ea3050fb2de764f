#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "sqh/simd.hpp"

namespace sqh::simd {

namespace {
bool force_scalar_env() {
  const char* v = std::getenv("SQH_FORCE_SCALAR");
  return v != nullptr && v[0] != '\0' && std::string(v) != "0";
}
}  // namespace

const Kernels& active() {
  static const Kernels& chosen = [on = !force_scalar_env()]() -> const Kernels& {
    if (on) {
      if (const Kernels* k = avx2_or_null()) return *k;
    }
    return scalar();
  }();
  return chosen;
}

const char* active_name() { return active().name; }

void windowed_corr_ramp(const double* k, const double* khat, int W,
                        const double* u, double* w, int n) {
  // Trapezoid rule over [t0, t_i] with the kernel's compact support: the
  // running sum uses khat (half weight at lag 0); the t0 endpoint weight is
  // corrected from full to half by subtracting 0.5*k[i]*u[0]. At i = 0 this
  // yields exactly zero (empty integral).
  const int top = std::min(W, n - 1);
  for (int i = 0; i <= top; ++i) {
    double acc = 0.0;
    for (int j = 0; j <= i; ++j) acc = std::fma(khat[j], u[i - j], acc);
    const double endpoint = 0.5 * k[i];
    w[i] = acc - endpoint * u[0];
  }
}

}  // namespace sqh::simd
