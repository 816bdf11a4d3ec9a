#pragma once

// Data-parallel inner loops shared by every operator in the toolkit.
//
// Each kernel has a scalar reference implementation and an AVX2 variant. The
// variant is picked once at startup from the CPU feature flags; tests force
// either backend and check that they agree. Max-type kernels and the complex
// products are bit-identical across backends; sums agree to roundoff only
// because the lane order differs.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace shiftlog::simd {

using cplx = std::complex<double>;

enum class Backend { Scalar, Avx2 };

bool backend_supported(Backend backend);
Backend active_backend();
/// Throws std::invalid_argument if the CPU cannot run `backend`.
void force_backend(Backend backend);
std::string_view backend_name(Backend backend);

/// max_i a[i] * w[i]; 0 for empty input. Inputs are non-negative.
double max_weighted(std::span<const double> a, std::span<const double> w);

/// acc[i] += |z[i]|^2
void accumulate_abs2(std::span<double> acc, std::span<const cplx> z);

/// acc[i] = max(acc[i], |z[i]|)
void max_abs_into(std::span<double> acc, std::span<const cplx> z);

/// z[i] *= factor[i]
void multiply(std::span<cplx> z, std::span<const cplx> factor);

/// z[i] *= factor[i] for a real factor
void multiply_real(std::span<cplx> z, std::span<const double> factor);

/// sum_i |z[i]|^2
double sum_abs2(std::span<const cplx> z);

/// max_i |z[i]|
double max_abs(std::span<const cplx> z);

namespace scalar {
double max_weighted(const double* a, const double* w, std::size_t n);
void accumulate_abs2(double* acc, const cplx* z, std::size_t n);
void max_abs_into(double* acc, const cplx* z, std::size_t n);
void multiply(cplx* z, const cplx* factor, std::size_t n);
void multiply_real(cplx* z, const double* factor, std::size_t n);
double sum_abs2(const cplx* z, std::size_t n);
double max_abs(const cplx* z, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double max_weighted(const double* a, const double* w, std::size_t n);
void accumulate_abs2(double* acc, const cplx* z, std::size_t n);
void max_abs_into(double* acc, const cplx* z, std::size_t n);
void multiply(cplx* z, const cplx* factor, std::size_t n);
void multiply_real(cplx* z, const double* factor, std::size_t n);
double sum_abs2(const cplx* z, std::size_t n);
double max_abs(const cplx* z, std::size_t n);
}  // namespace avx2
#endif

}  // namespace shiftlog::simd
