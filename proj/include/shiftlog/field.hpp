#pragma once

// Periodic sampled fields on a d-dimensional torus of side L, their discrete
// spectra, and the norms used everywhere else.
//
// Conventions:
//   grid point j      x_j = j * L / M (per axis, row-major, axis 0 slowest)
//   grid frequency k  xi_k = k / L with k in (-M/2, M/2]
//   transform         F(xi_k) = (L/M)^d sum_j f(x_j) exp(-2 pi i x_j . xi_k)
//   inverse           f(x_j) = L^-d sum_k F(xi_k) exp(2 pi i x_j . xi_k)

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shiftlog/buffer.hpp"

namespace shiftlog {

struct GridSpec {
  int dimension = 1;
  std::size_t samples = 64;  // per axis
  double period = 1.0;

  /// Throws std::invalid_argument unless d in {1,2}, M a power of two >= 8, L > 0.
  void validate() const;

  std::size_t size() const;
  double spacing() const { return period / static_cast<double>(samples); }
  double cell_volume() const;
  /// Largest representable frequency magnitude per axis, M / (2L).
  double nyquist() const { return static_cast<double>(samples) / (2.0 * period); }

  /// Signed frequency index in (-M/2, M/2] of axis index i.
  long signed_index(std::size_t i) const;
  /// Minimum-image coordinate of axis index i, in (-L/2, L/2].
  double centered_coordinate(std::size_t i) const;
  /// Physical frequency vector of flat index `flat` (unused axes are 0).
  std::array<double, 2> frequency(std::size_t flat) const;
  double frequency_radius(std::size_t flat) const;
  /// Centered physical position of flat index `flat`.
  std::array<double, 2> position(std::size_t flat) const;

  bool operator==(const GridSpec& other) const = default;
};

/// Closed frequency annulus {inner <= |xi| <= outer}; inner = 0 means a ball.
struct SupportCertificate {
  double inner = 0.0;
  double outer = 0.0;

  bool empty() const { return inner > outer; }
  bool contains(double radius) const { return !empty() && radius >= inner && radius <= outer; }
  /// Support of a pointwise product of two spectra.
  SupportCertificate intersect(const SupportCertificate& other) const;
  /// Smallest annulus containing both.
  SupportCertificate hull(const SupportCertificate& other) const;
};

class SampledField {
 public:
  SampledField(GridSpec grid, ComplexBuffer values, std::optional<SupportCertificate> certificate = std::nullopt);
  SampledField(GridSpec grid, std::span<const cplx> values,
               std::optional<SupportCertificate> certificate = std::nullopt);

  static SampledField zeros(const GridSpec& grid);
  static SampledField constant(const GridSpec& grid, cplx value);

  /// Samples fn at the centered (minimum-image) grid positions.
  template <class Fn>
  static SampledField from_function(const GridSpec& grid, Fn&& fn) {
    grid.validate();
    ComplexBuffer values(grid.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto x = grid.position(i);
      values[i] = fn(std::span<const double>(x.data(), static_cast<std::size_t>(grid.dimension)));
    }
    return SampledField(grid, std::move(values));
  }

  const GridSpec& grid() const { return grid_; }
  std::span<const cplx> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  cplx operator[](std::size_t i) const { return values_[i]; }
  const std::optional<SupportCertificate>& certificate() const { return certificate_; }

  SampledField with_certificate(std::optional<SupportCertificate> certificate) const;
  SampledField scaled(cplx factor) const;
  /// Pointwise moduli.
  RealBuffer moduli() const;

 private:
  GridSpec grid_;
  ComplexBuffer values_;
  std::optional<SupportCertificate> certificate_;
};

class Spectrum {
 public:
  /// If a certificate is given every coefficient outside it must be exactly
  /// zero; otherwise std::invalid_argument is thrown.
  Spectrum(GridSpec grid, ComplexBuffer coefficients, std::optional<SupportCertificate> certificate = std::nullopt);

  const GridSpec& grid() const { return grid_; }
  std::span<const cplx> coefficients() const { return coefficients_; }
  std::size_t size() const { return coefficients_.size(); }
  cplx operator[](std::size_t i) const { return coefficients_[i]; }
  const std::optional<SupportCertificate>& certificate() const { return certificate_; }

  /// Largest modulus among coefficients outside the certificate (0 if none).
  double certificate_violation() const;

 private:
  GridSpec grid_;
  ComplexBuffer coefficients_;
  std::optional<SupportCertificate> certificate_;
};

/// Lebesgue exponent in [1, inf].
class LpIndex {
 public:
  explicit LpIndex(double p);
  static LpIndex infinity();
  /// Accepts "inf", an integer, a decimal or a fraction "a/b".
  static LpIndex parse(const std::string& text);

  bool is_infinite() const { return infinite_; }
  /// Throws std::logic_error for the infinite index.
  double value() const;
  /// 1/p, 0 for infinity.
  double reciprocal() const { return infinite_ ? 0.0 : 1.0 / p_; }
  std::string to_string() const;

 private:
  LpIndex() = default;
  double p_ = 1.0;
  bool infinite_ = false;
};

struct MixedNormSpec {
  LpIndex outer_p;
  LpIndex inner_q;
};

Spectrum transform(const SampledField& f);
SampledField inverse(const Spectrum& s);

/// Periodic convolution with quadrature weight (L/M)^d.
SampledField convolve(const SampledField& f, const SampledField& g);
/// Pointwise product of spectra; the certificate is the intersection.
Spectrum multiply(const Spectrum& a, const Spectrum& b);

/// x -> f(x - shift), applied as a phase on the spectrum.
SampledField phase_shift(const SampledField& f, std::span<const double> shift);
Spectrum phase_shift(const Spectrum& s, std::span<const double> shift);

/// exp(-2 pi i shift.xi) for every grid frequency.
ComplexBuffer shift_phases(const GridSpec& grid, std::span<const double> shift);

/// Quadrature (L/M)^d sum f.
cplx integrate(const SampledField& f);
double lp_norm(const SampledField& f, LpIndex p);
double lp_norm(const GridSpec& grid, std::span<const double> moduli, LpIndex p);
/// Inner l_q over the sequence pointwise, outer L_p.
double mixed_norm(std::span<const SampledField> fs, MixedNormSpec spec);

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* context);

}  // namespace shiftlog
