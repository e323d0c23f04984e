#include "hypar/kernels.hpp"

#include <cstdlib>
#include <cstring>

#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace hypar::kernels {

void caxpy_scalar(std::size_t n, double ar, double ai, const double* xr, const double* xi,
                  double* yr, double* yi) {
  for (std::size_t i = 0; i < n; ++i) {
    double pr = ar * xr[i] - ai * xi[i];
    double pi = ar * xi[i] + ai * xr[i];
    yr[i] = yr[i] + pr;
    yi[i] = yi[i] + pi;
  }
}

#if defined(__aarch64__)
void caxpy_neon(std::size_t n, double ar, double ai, const double* xr, const double* xi, double* yr,
                double* yi) {
  float64x2_t var = vdupq_n_f64(ar), vai = vdupq_n_f64(ai);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vxr = vld1q_f64(xr + i), vxi = vld1q_f64(xi + i);
    // mul then add, never fused, to stay bit-identical with the scalar path
    float64x2_t pr = vsubq_f64(vmulq_f64(var, vxr), vmulq_f64(vai, vxi));
    float64x2_t pi = vaddq_f64(vmulq_f64(var, vxi), vmulq_f64(vai, vxr));
    vst1q_f64(yr + i, vaddq_f64(vld1q_f64(yr + i), pr));
    vst1q_f64(yi + i, vaddq_f64(vld1q_f64(yi + i), pi));
  }
  if (i < n) caxpy_scalar(n - i, ar, ai, xr + i, xi + i, yr + i, yi + i);
}
#endif

namespace {

CaxpyFn select_caxpy(std::string& name) {
  const char* forced = std::getenv("HYPAR_KERNEL");
  if (forced && std::strcmp(forced, "scalar") == 0) {
    name = "scalar";
    return caxpy_scalar;
  }
#if defined(__x86_64__) || defined(_M_X64)
  bool want_avx2 = !forced || std::strcmp(forced, "avx2") == 0;
  if (want_avx2 && __builtin_cpu_supports("avx2")) {
    name = "avx2";
    return caxpy_avx2;
  }
#endif
#if defined(__aarch64__)
  bool want_neon = !forced || std::strcmp(forced, "neon") == 0;
  if (want_neon) {
    name = "neon";
    return caxpy_neon;
  }
#endif
  name = "scalar";
  return caxpy_scalar;
}

std::string g_active;

}  // namespace

const CaxpyFn caxpy = select_caxpy(g_active);

const std::string& active_kernel() { return g_active; }

}  // namespace hypar::kernels
