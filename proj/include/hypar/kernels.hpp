#pragma once

#include <cstddef>
#include <string>

namespace hypar::kernels {

// Hot inner loop of the field evaluator: complex AXPY over split re/im
// arrays,
//   y[i] += a * x[i],  i = 0..n-1.
//
// Every variant performs the identical sequence of IEEE multiply and add
// operations per element (no FMA), so all variants are bit-identical; the
// SIMD ones are just wider.  Selection happens once at startup from CPUID,
// overridable with HYPAR_KERNEL=scalar|avx2.
using CaxpyFn = void (*)(std::size_t n, double ar, double ai, const double* xr, const double* xi,
                         double* yr, double* yi);

void caxpy_scalar(std::size_t n, double ar, double ai, const double* xr, const double* xi,
                  double* yr, double* yi);
#if defined(__x86_64__) || defined(_M_X64)
void caxpy_avx2(std::size_t n, double ar, double ai, const double* xr, const double* xi, double* yr,
                double* yi);
#endif
#if defined(__aarch64__)
void caxpy_neon(std::size_t n, double ar, double ai, const double* xr, const double* xi, double* yr,
                double* yi);
#endif

// The dispatched entry point and the name of the variant behind it.
extern const CaxpyFn caxpy;
const std::string& active_kernel();

}  // namespace hypar::kernels
