#include "shiftlog/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

#define SHIFTLOG_AVX2 __attribute__((target("avx2")))

namespace shiftlog::simd::avx2 {

namespace {

// |z|^2 for four consecutive complex values, returned in index order.
SHIFTLOG_AVX2 inline __m256d abs2_x4(const cplx* z) {
  const double* p = reinterpret_cast<const double*>(z);
  const __m256d lo = _mm256_loadu_pd(p);
  const __m256d hi = _mm256_loadu_pd(p + 4);
  const __m256d s = _mm256_hadd_pd(_mm256_mul_pd(lo, lo), _mm256_mul_pd(hi, hi));
  // hadd leaves lanes as (0, 2, 1, 3)
  return _mm256_permute4x64_pd(s, 0b11011000);
}

SHIFTLOG_AVX2 inline double hmax(__m256d v) {
  const __m128d a = _mm256_castpd256_pd128(v);
  const __m128d b = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(a, b);
  const __m128d s = _mm_max_sd(m, _mm_unpackhi_pd(m, m));
  return _mm_cvtsd_f64(s);
}

inline double modulus(const cplx& z) {
  const double re = z.real();
  const double im = z.imag();
  return std::sqrt(re * re + im * im);
}

}  // namespace

SHIFTLOG_AVX2 double max_weighted(const double* a, const double* w, std::size_t n) {
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    best = _mm256_max_pd(_mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(w + i)), best);
  }
  double out = hmax(best);
  for (; i < n; ++i) {
    const double v = a[i] * w[i];
    out = v > out ? v : out;
  }
  return out;
}

SHIFTLOG_AVX2 void accumulate_abs2(double* acc, const cplx* z, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), abs2_x4(z + i)));
  }
  for (; i < n; ++i) {
    const double re = z[i].real();
    const double im = z[i].imag();
    acc[i] += re * re + im * im;
  }
}

SHIFTLOG_AVX2 void max_abs_into(double* acc, const cplx* z, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d m = _mm256_sqrt_pd(abs2_x4(z + i));
    _mm256_storeu_pd(acc + i, _mm256_max_pd(m, _mm256_loadu_pd(acc + i)));
  }
  for (; i < n; ++i) {
    const double m = modulus(z[i]);
    acc[i] = m > acc[i] ? m : acc[i];
  }
}

SHIFTLOG_AVX2 void multiply(cplx* z, const cplx* factor, std::size_t n) {
  double* p = reinterpret_cast<double*>(z);
  const double* f = reinterpret_cast<const double*>(factor);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(p + 2 * i);
    const __m256d c = _mm256_loadu_pd(f + 2 * i);
    const __m256d c_re = _mm256_movedup_pd(c);
    const __m256d c_im = _mm256_permute_pd(c, 0xF);
    const __m256d a_swap = _mm256_permute_pd(a, 0x5);
    const __m256d out = _mm256_addsub_pd(_mm256_mul_pd(a, c_re), _mm256_mul_pd(a_swap, c_im));
    _mm256_storeu_pd(p + 2 * i, out);
  }
  for (; i < n; ++i) {
    const double a = z[i].real();
    const double b = z[i].imag();
    const double c = factor[i].real();
    const double d = factor[i].imag();
    z[i] = cplx(a * c - b * d, a * d + b * c);
  }
}

SHIFTLOG_AVX2 void multiply_real(cplx* z, const double* factor, std::size_t n) {
  double* p = reinterpret_cast<double*>(z);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d f = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(factor + i)), 0b01010000);
    _mm256_storeu_pd(p + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(p + 2 * i), f));
  }
  for (; i < n; ++i) {
    z[i] = cplx(z[i].real() * factor[i], z[i].imag() * factor[i]);
  }
}

SHIFTLOG_AVX2 double sum_abs2(const cplx* z, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(z);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(p + 2 * i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
  return s;
}

SHIFTLOG_AVX2 double max_abs(const cplx* z, std::size_t n) {
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    best = _mm256_max_pd(_mm256_sqrt_pd(abs2_x4(z + i)), best);
  }
  double out = hmax(best);
  for (; i < n; ++i) {
    const double m = modulus(z[i]);
    out = m > out ? m : out;
  }
  return out;
}

}  // namespace shiftlog::simd::avx2

#endif
