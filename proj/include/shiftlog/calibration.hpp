#pragma once

// Smooth radial Fourier-side profiles with hard support certificates, the
// Littlewood-Paley pair built from them, and band-limited functions assembled
// from translated and modulated profiles.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "shiftlog/field.hpp"

namespace shiftlog {

/// Smooth monotone step: 0 for t <= 0, 1 for t >= 1, C-infinity in between,
/// built from the mollifier ramp exp(-1/t).
double smooth_step(double t);

enum class ProfileKind { LowPass, Annular };

/// Radial profile with values in [0, 1].
///
/// LowPass(a, b): 1 for r <= a, 0 for r >= b.
/// Annular: LowPass(outer) - LowPass(inner) with inner.support <= outer.plateau,
/// so it is 0 for r <= inner.plateau, 1 between inner.support and
/// outer.plateau, and 0 for r >= outer.support.
class RadialProfile {
 public:
  static RadialProfile lowpass(double plateau, double support);
  static RadialProfile annular(double hole, double inner_plateau, double outer_plateau, double support);

  ProfileKind kind() const { return kind_; }
  double operator()(double radius) const;
  double at(std::span<const double> xi) const;

  /// Radius at which the profile first reaches 1 from outside (LowPass) or the
  /// inner edge of the outer plateau (Annular).
  double plateau_radius() const { return plateau_; }
  double support_radius() const { return support_; }
  /// Inner radius of the hole (0 for LowPass).
  double hole_radius() const { return kind_ == ProfileKind::Annular ? hole_ : 0.0; }
  /// Inner edge of the plateau annulus (Annular only; 0 for LowPass).
  double inner_plateau_radius() const { return kind_ == ProfileKind::Annular ? inner_plateau_ : 0.0; }
  SupportCertificate certificate() const;

  /// One-line key=value record with every parameter at full precision.
  std::string to_record() const;
  static RadialProfile from_record(const std::string& record);

  bool operator==(const RadialProfile&) const = default;

 private:
  RadialProfile() = default;
  ProfileKind kind_ = ProfileKind::LowPass;
  double plateau_ = 1.0;
  double support_ = 2.0;
  double hole_ = 0.0;
  double inner_plateau_ = 0.0;
};

RadialProfile make_lowpass(double plateau, double support);

struct ScaleRange {
  int min = 0;
  int max = 0;
  int count() const { return max - min + 1; }
};

/// phi_hat = LowPass(1, 2), psi_hat(r) = phi_hat(r) - phi_hat(2r).
struct LPPair {
  RadialProfile phi_hat;
  RadialProfile psi_hat;
  ScaleRange scales;

  double phi(double radius) const { return phi_hat(radius); }
  double psi(double radius) const { return psi_hat(radius); }
  /// sum over the scale range of psi(2^-l r).
  double partition_sum(double radius) const;
  /// Radii on which the truncated partition is claimed to be exactly 1:
  /// [2^(min+1), 2^max].
  std::array<double, 2> covered_band() const;
};

LPPair make_lp_pair(ScaleRange scales);

struct PartitionCheck {
  double max_defect = 0.0;
  double worst_radius = 0.0;
  std::size_t points = 0;
  int max_overlap = 0;  // most psi dilates nonzero at one radius
};

/// Sweeps `radial_points` log-spaced radii over the covered band and, if a grid
/// is given, every covered grid frequency.
PartitionCheck check_partition(const LPPair& pair, std::size_t radial_points, const GridSpec* grid = nullptr);

struct CounterexampleProfiles {
  RadialProfile eta_hat;   // plateau rho/2, support rho
  RadialProfile beta_hat;  // 1 on the plateau annulus, 0 off the support annulus
};

struct AnnulusRadii {
  double inner;
  double outer;
};

inline constexpr double kDefaultEtaRadius = 1.0 / 100.0;
inline constexpr AnnulusRadii kDefaultBetaPlateau{20.0 / 21.0, 21.0 / 20.0};
inline constexpr AnnulusRadii kDefaultBetaSupport{10.0 / 11.0, 11.0 / 10.0};

CounterexampleProfiles make_counterexample_profiles(double eta_radius = kDefaultEtaRadius,
                                                    AnnulusRadii beta_plateau = kDefaultBetaPlateau,
                                                    AnnulusRadii beta_support = kDefaultBetaSupport);

/// One spectral building block: weight * P(xi - center) * exp(-2 pi i (xi - center).translation),
/// i.e. weight * p(x - translation) * exp(2 pi i center.x) in physical space.
struct SpectralAtom {
  RadialProfile profile;
  std::array<double, 2> center{0.0, 0.0};
  std::array<double, 2> translation{0.0, 0.0};
  cplx weight{1.0, 0.0};
};

/// A finite sum of spectral atoms. Its spectrum is known analytically, so
/// dilations and translations are exact and the support is certified.
class BandLimitedFunction {
 public:
  explicit BandLimitedFunction(int dimension, std::vector<SpectralAtom> atoms = {});
  static BandLimitedFunction from_profile(int dimension, const RadialProfile& profile);

  int dimension() const { return dimension_; }
  std::span<const SpectralAtom> atoms() const { return atoms_; }
  void add(const SpectralAtom& atom);

  cplx spectrum(std::span<const double> xi) const;
  /// Annulus containing the support of every atom.
  SupportCertificate certificate() const;

  /// x -> g(x - by)
  BandLimitedFunction translated(std::array<double, 2> by) const;
  BandLimitedFunction scaled(cplx factor) const;
  /// Complex conjugate x -> conj(g(x)).
  BandLimitedFunction conjugated() const;

  /// g-hat(2^-scale xi) on every grid frequency, i.e. the spectrum of
  /// 2^(scale d) g(2^scale x). Exact zeros outside the dilated certificate.
  ComplexBuffer dilated_spectrum(const GridSpec& grid, int scale = 0) const;
  SupportCertificate dilated_certificate(int scale) const;

  /// Samples of the L-periodisation of g. Throws if the support reaches Nyquist.
  SampledField sample(const GridSpec& grid) const;
  /// Samples g(origin + u) for u on the centered window grid of the given
  /// spacing and size; values in FFT order (see GridSpec::position).
  SampledField sample_window(double spacing, std::size_t samples, std::array<double, 2> origin) const;

 private:
  int dimension_;
  std::vector<SpectralAtom> atoms_;
};

/// Physical-space field of a profile (real valued, profiles are radial).
SampledField profile_to_field(const RadialProfile& profile, const GridSpec& grid);

/// Throws std::invalid_argument naming the grid and radius if radius >= M/(2L).
void require_below_nyquist(const GridSpec& grid, double radius, const std::string& what);

}  // namespace shiftlog
