#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "shiftlog/calibration.hpp"

namespace shiftlog {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double fold(double turns) { return turns - std::nearbyint(turns); }

cplx unit_phase(double turns) {
  const double t = fold(turns);
  return {std::cos(kTwoPi * t), std::sin(kTwoPi * t)};
}

// Loose enough that roundoff in |xi - center| never places a nonzero value
// outside the certified annulus.
constexpr double kCertificateSlack = 1e-12;

}  // namespace

void require_below_nyquist(const GridSpec& grid, double radius, const std::string& what) {
  if (!(radius < grid.nyquist())) {
    throw std::invalid_argument(fmt::format("{}: spectral radius {} reaches the Nyquist limit {} of the grid (M={}, L={})",
                                            what, radius, grid.nyquist(), grid.samples, grid.period));
  }
}

BandLimitedFunction::BandLimitedFunction(int dimension, std::vector<SpectralAtom> atoms)
    : dimension_(dimension), atoms_(std::move(atoms)) {
  if (dimension_ != 1 && dimension_ != 2) {
    throw std::invalid_argument(fmt::format("band-limited function dimension must be 1 or 2, got {}", dimension));
  }
}

BandLimitedFunction BandLimitedFunction::from_profile(int dimension, const RadialProfile& profile) {
  return BandLimitedFunction(dimension, {SpectralAtom{profile}});
}

void BandLimitedFunction::add(const SpectralAtom& atom) { atoms_.push_back(atom); }

cplx BandLimitedFunction::spectrum(std::span<const double> xi) const {
  if (xi.size() != static_cast<std::size_t>(dimension_)) throw std::invalid_argument("spectrum: wrong dimension");
  cplx sum = 0.0;
  for (const auto& a : atoms_) {
    double r2 = 0.0, turns = 0.0;
    for (int ax = 0; ax < dimension_; ++ax) {
      const double dx = xi[ax] - a.center[ax];
      r2 += dx * dx;
      turns += fold(dx * a.translation[ax]);
    }
    const double r = std::sqrt(r2);
    if (r >= a.profile.support_radius()) continue;
    const double v = a.profile(r);
    if (v == 0.0) continue;
    sum += a.weight * v * unit_phase(-turns);
  }
  return sum;
}

SupportCertificate BandLimitedFunction::certificate() const {
  SupportCertificate out{1.0, 0.0};
  for (const auto& a : atoms_) {
    const double w = std::hypot(a.center[0], a.center[1]);
    const double ro = a.profile.support_radius();
    const double ri = a.profile.hole_radius();
    const double inner = std::max({0.0, w - ro, ri - w}) * (1.0 - kCertificateSlack);
    out = out.hull({inner, (w + ro) * (1.0 + kCertificateSlack)});
  }
  return out;
}

BandLimitedFunction BandLimitedFunction::translated(std::array<double, 2> by) const {
  BandLimitedFunction out = *this;
  for (auto& a : out.atoms_) {
    double turns = 0.0;
    for (int ax = 0; ax < dimension_; ++ax) {
      a.translation[ax] += by[ax];
      turns += fold(a.center[ax] * by[ax]);
    }
    a.weight *= unit_phase(-turns);
  }
  return out;
}

BandLimitedFunction BandLimitedFunction::scaled(cplx factor) const {
  BandLimitedFunction out = *this;
  for (auto& a : out.atoms_) a.weight *= factor;
  return out;
}

BandLimitedFunction BandLimitedFunction::conjugated() const {
  // conj(w p(x - t) e^{2 pi i c.x}) = conj(w) p(x - t) e^{-2 pi i c.x} for real radial p.
  BandLimitedFunction out = *this;
  for (auto& a : out.atoms_) {
    a.weight = std::conj(a.weight);
    a.center = {-a.center[0], -a.center[1]};
  }
  return out;
}

SupportCertificate BandLimitedFunction::dilated_certificate(int scale) const {
  const SupportCertificate c = certificate();
  if (c.empty()) return c;
  return {std::ldexp(c.inner, scale), std::ldexp(c.outer, scale)};
}

ComplexBuffer BandLimitedFunction::dilated_spectrum(const GridSpec& grid, int scale) const {
  grid.validate();
  if (grid.dimension != dimension_) {
    throw std::invalid_argument(
        fmt::format("grid dimension {} does not match function dimension {}", grid.dimension, dimension_));
  }
  const std::size_t m = grid.samples;
  const std::size_t n = grid.size();
  ComplexBuffer out(n);
  const SupportCertificate cert = dilated_certificate(scale);
  if (cert.empty()) return out;

  // Per axis integer frequency index k; the scaled frequency is 2^-scale k / L.
  // The phase (2^-scale k / L - c) t is split as k (2^-scale t) / L - c t so that
  // dyadic translations contribute exactly.
  for (const auto& a : atoms_) {
    const double support = a.profile.support_radius();
    const double center_turns = fold(a.center[0] * a.translation[0]) + fold(a.center[1] * a.translation[1]);
    const double t0 = std::ldexp(a.translation[0], -scale);
    const double t1 = std::ldexp(a.translation[1], -scale);
    for (std::size_t i = 0; i < n; ++i) {
      const long k0 = grid.signed_index(dimension_ == 1 ? i : i / m);
      const double dx0 = std::ldexp(static_cast<double>(k0) / grid.period, -scale) - a.center[0];
      double r2 = dx0 * dx0;
      double turns = fold(static_cast<double>(k0) * t0 / grid.period);
      if (dimension_ == 2) {
        const long k1 = grid.signed_index(i % m);
        const double dx1 = std::ldexp(static_cast<double>(k1) / grid.period, -scale) - a.center[1];
        r2 += dx1 * dx1;
        turns += fold(static_cast<double>(k1) * t1 / grid.period);
      }
      const double r = std::sqrt(r2);
      if (r >= support) continue;
      const double v = a.profile(r);
      if (v == 0.0) continue;
      out[i] += a.weight * v * unit_phase(center_turns - turns);
    }
  }
  return out;
}

SampledField BandLimitedFunction::sample(const GridSpec& grid) const {
  const SupportCertificate cert = certificate();
  if (!cert.empty()) require_below_nyquist(grid, cert.outer, "sample");
  return inverse(Spectrum(grid, dilated_spectrum(grid, 0), cert));
}

SampledField BandLimitedFunction::sample_window(double spacing, std::size_t samples,
                                                std::array<double, 2> origin) const {
  const GridSpec window{dimension_, samples, spacing * static_cast<double>(samples)};
  return translated({-origin[0], -origin[1]}).sample(window);
}

SampledField profile_to_field(const RadialProfile& profile, const GridSpec& grid) {
  const SampledField f = BandLimitedFunction::from_profile(grid.dimension, profile).sample(grid);
  ComplexBuffer real(f.size());
  for (std::size_t i = 0; i < real.size(); ++i) real[i] = f[i].real();
  return SampledField(grid, std::move(real), f.certificate());
}

}  // namespace shiftlog
