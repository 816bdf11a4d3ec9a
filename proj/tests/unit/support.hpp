#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "shiftlog/field.hpp"

namespace testing {

using shiftlog::cplx;

inline std::vector<cplx> random_values(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& z : v) z = {g(rng), g(rng)};
  return v;
}

inline shiftlog::SampledField random_field(const shiftlog::GridSpec& grid, std::mt19937_64& rng) {
  return shiftlog::SampledField(grid, random_values(grid.size(), rng));
}

/// Field whose spectrum is random on grid frequencies with inner <= |xi| <= outer.
inline shiftlog::SampledField random_band_field(const shiftlog::GridSpec& grid, double inner, double outer,
                                                std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  shiftlog::ComplexBuffer c(grid.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double r = grid.frequency_radius(i);
    if (r >= inner && r <= outer) c[i] = {g(rng), g(rng)};
  }
  return shiftlog::inverse(shiftlog::Spectrum(grid, std::move(c), shiftlog::SupportCertificate{inner, outer}));
}

/// Textbook O(N^2) DFT with the physical normalisation, written independently
/// of the library.
inline std::vector<cplx> naive_transform(const shiftlog::GridSpec& grid, std::span<const cplx> f) {
  const std::size_t m = grid.samples;
  const double h = grid.period / static_cast<double>(m);
  std::vector<cplx> out(f.size());
  const double two_pi = 2.0 * std::numbers::pi;
  if (grid.dimension == 1) {
    for (std::size_t k = 0; k < m; ++k) {
      cplx s = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double ang = -two_pi * static_cast<double>((j * k) % m) / static_cast<double>(m);
        s += f[j] * cplx(std::cos(ang), std::sin(ang));
      }
      out[k] = s * h;
    }
    return out;
  }
  for (std::size_t k0 = 0; k0 < m; ++k0)
    for (std::size_t k1 = 0; k1 < m; ++k1) {
      cplx s = 0.0;
      for (std::size_t j0 = 0; j0 < m; ++j0)
        for (std::size_t j1 = 0; j1 < m; ++j1) {
          const double ang =
              -two_pi * static_cast<double>((j0 * k0 + j1 * k1) % m) / static_cast<double>(m);
          s += f[j0 * m + j1] * cplx(std::cos(ang), std::sin(ang));
        }
      out[k0 * m + k1] = s * h * h;
    }
  return out;
}

inline double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(std::span<const cplx> a) {
  double m = 0.0;
  for (const auto& z : a) m = std::max(m, std::abs(z));
  return m;
}

inline double rel_l2_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace testing
