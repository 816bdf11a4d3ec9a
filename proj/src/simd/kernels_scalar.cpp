#include "shiftlog/simd/kernels.hpp"

#include <cmath>

namespace shiftlog::simd::scalar {

namespace {
// Same operation order as the vector path: sqrt(re*re + im*im), no hypot.
inline double modulus(const cplx& z) {
  const double re = z.real();
  const double im = z.imag();
  return std::sqrt(re * re + im * im);
}
}  // namespace

double max_weighted(const double* a, const double* w, std::size_t n) {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = a[i] * w[i];
    best = v > best ? v : best;
  }
  return best;
}

void accumulate_abs2(double* acc, const cplx* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = z[i].real();
    const double im = z[i].imag();
    acc[i] += re * re + im * im;
  }
}

void max_abs_into(double* acc, const cplx* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double m = modulus(z[i]);
    acc[i] = m > acc[i] ? m : acc[i];
  }
}

void multiply(cplx* z, const cplx* factor, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = z[i].real();
    const double b = z[i].imag();
    const double c = factor[i].real();
    const double d = factor[i].imag();
    z[i] = cplx(a * c - b * d, a * d + b * c);
  }
}

void multiply_real(cplx* z, const double* factor, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = cplx(z[i].real() * factor[i], z[i].imag() * factor[i]);
  }
}

double sum_abs2(const cplx* z, std::size_t n) {
  // Four partial sums, mirroring the lane split of the vector path.
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    s0 += z[i].real() * z[i].real();
    s1 += z[i].imag() * z[i].imag();
    s2 += z[i + 1].real() * z[i + 1].real();
    s3 += z[i + 1].imag() * z[i + 1].imag();
  }
  double s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) s += z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
  return s;
}

double max_abs(const cplx* z, std::size_t n) {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = modulus(z[i]);
    best = m > best ? m : best;
  }
  return best;
}

}  // namespace shiftlog::simd::scalar
