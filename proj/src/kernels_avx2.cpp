// AVX2 variant of the complex AXPY kernel.  This translation unit is the only
// one compiled with -mavx2; callers reach it through the runtime dispatcher.

#include "hypar/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace hypar::kernels {

void caxpy_avx2(std::size_t n, double ar, double ai, const double* xr, const double* xi, double* yr,
                double* yi) {
  __m256d var = _mm256_set1_pd(ar), vai = _mm256_set1_pd(ai);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vxr = _mm256_loadu_pd(xr + i), vxi = _mm256_loadu_pd(xi + i);
    // mul then add, never fused, to stay bit-identical with the scalar path
    __m256d pr = _mm256_sub_pd(_mm256_mul_pd(var, vxr), _mm256_mul_pd(vai, vxi));
    __m256d pi = _mm256_add_pd(_mm256_mul_pd(var, vxi), _mm256_mul_pd(vai, vxr));
    _mm256_storeu_pd(yr + i, _mm256_add_pd(_mm256_loadu_pd(yr + i), pr));
    _mm256_storeu_pd(yi + i, _mm256_add_pd(_mm256_loadu_pd(yi + i), pi));
  }
  for (; i < n; ++i) {
    double pr = ar * xr[i] - ai * xi[i];
    double pi = ar * xi[i] + ai * xr[i];
    yr[i] = yr[i] + pr;
    yi[i] = yi[i] + pi;
  }
}

}  // namespace hypar::kernels

#endif
