#include "shiftlog/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "fft.hpp"
#include "shiftlog/simd/kernels.hpp"

namespace shiftlog {

namespace {

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

void check_finite(std::span<const cplx> values, const char* what) {
  for (const cplx& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw std::invalid_argument(fmt::format("{}: non-finite sample", what));
    }
  }
}

// Fractional part of shift * k / L folded into [-1/2, 1/2].
double reduced_turns(double shift, long k, double period) {
  const double t = shift * static_cast<double>(k) / period;
  return t - std::nearbyint(t);
}

}  // namespace

void GridSpec::validate() const {
  if (dimension != 1 && dimension != 2) {
    throw std::invalid_argument(fmt::format("grid dimension must be 1 or 2, got {}", dimension));
  }
  if (samples < 8 || !is_power_of_two(samples)) {
    throw std::invalid_argument(fmt::format("samples per axis must be a power of two >= 8, got {}", samples));
  }
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw std::invalid_argument(fmt::format("grid period must be positive, got {}", period));
  }
}

std::size_t GridSpec::size() const { return dimension == 1 ? samples : samples * samples; }

double GridSpec::cell_volume() const {
  const double h = spacing();
  return dimension == 1 ? h : h * h;
}

long GridSpec::signed_index(std::size_t i) const {
  const auto m = static_cast<long>(samples);
  const auto k = static_cast<long>(i);
  return k <= m / 2 ? k : k - m;
}

double GridSpec::centered_coordinate(std::size_t i) const {
  return static_cast<double>(signed_index(i)) * spacing();
}

std::array<double, 2> GridSpec::frequency(std::size_t flat) const {
  if (dimension == 1) return {static_cast<double>(signed_index(flat)) / period, 0.0};
  return {static_cast<double>(signed_index(flat / samples)) / period,
          static_cast<double>(signed_index(flat % samples)) / period};
}

double GridSpec::frequency_radius(std::size_t flat) const {
  if (dimension == 1) return std::abs(static_cast<double>(signed_index(flat))) / period;
  const auto k0 = static_cast<double>(signed_index(flat / samples));
  const auto k1 = static_cast<double>(signed_index(flat % samples));
  return std::sqrt(k0 * k0 + k1 * k1) / period;
}

std::array<double, 2> GridSpec::position(std::size_t flat) const {
  if (dimension == 1) return {centered_coordinate(flat), 0.0};
  return {centered_coordinate(flat / samples), centered_coordinate(flat % samples)};
}

SupportCertificate SupportCertificate::intersect(const SupportCertificate& other) const {
  return {std::max(inner, other.inner), std::min(outer, other.outer)};
}

SupportCertificate SupportCertificate::hull(const SupportCertificate& other) const {
  if (empty()) return other;
  if (other.empty()) return *this;
  return {std::min(inner, other.inner), std::max(outer, other.outer)};
}

SampledField::SampledField(GridSpec grid, ComplexBuffer values, std::optional<SupportCertificate> certificate)
    : grid_(grid), values_(std::move(values)), certificate_(certificate) {
  grid_.validate();
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument(
        fmt::format("field has {} samples, grid needs {}", values_.size(), grid_.size()));
  }
  check_finite(values_, "SampledField");
}

SampledField::SampledField(GridSpec grid, std::span<const cplx> values,
                           std::optional<SupportCertificate> certificate)
    : SampledField(grid, ComplexBuffer(values.begin(), values.end()), certificate) {}

SampledField SampledField::zeros(const GridSpec& grid) {
  grid.validate();
  return SampledField(grid, ComplexBuffer(grid.size()), SupportCertificate{1.0, 0.0});
}

SampledField SampledField::constant(const GridSpec& grid, cplx value) {
  grid.validate();
  return SampledField(grid, ComplexBuffer(grid.size(), value), SupportCertificate{0.0, 0.0});
}

SampledField SampledField::with_certificate(std::optional<SupportCertificate> certificate) const {
  SampledField out = *this;
  out.certificate_ = certificate;
  return out;
}

SampledField SampledField::scaled(cplx factor) const {
  ComplexBuffer out(values_.begin(), values_.end());
  for (cplx& v : out) v *= factor;
  return SampledField(grid_, std::move(out), certificate_);
}

RealBuffer SampledField::moduli() const {
  RealBuffer out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(values_[i]);
  return out;
}

Spectrum::Spectrum(GridSpec grid, ComplexBuffer coefficients, std::optional<SupportCertificate> certificate)
    : grid_(grid), coefficients_(std::move(coefficients)), certificate_(certificate) {
  grid_.validate();
  if (coefficients_.size() != grid_.size()) {
    throw std::invalid_argument(
        fmt::format("spectrum has {} coefficients, grid needs {}", coefficients_.size(), grid_.size()));
  }
  check_finite(coefficients_, "Spectrum");
  if (certificate_ && certificate_violation() != 0.0) {
    throw std::invalid_argument(fmt::format("spectrum is nonzero outside its certificate [{}, {}]",
                                            certificate_->inner, certificate_->outer));
  }
}

double Spectrum::certificate_violation() const {
  if (!certificate_) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < coefficients_.size(); ++i) {
    if (!certificate_->contains(grid_.frequency_radius(i))) worst = std::max(worst, std::abs(coefficients_[i]));
  }
  return worst;
}

LpIndex::LpIndex(double p) : p_(p) {
  if (std::isinf(p) && p > 0) {
    infinite_ = true;
    p_ = 0.0;
    return;
  }
  if (!(p >= 1.0)) throw std::invalid_argument(fmt::format("Lebesgue exponent must be >= 1, got {}", p));
}

LpIndex LpIndex::infinity() {
  LpIndex out;
  out.infinite_ = true;
  out.p_ = 0.0;
  return out;
}

LpIndex LpIndex::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return infinity();
  std::size_t used = 0;
  if (auto slash = text.find('/'); slash != std::string::npos) {
    const double num = std::stod(text.substr(0, slash), &used);
    const double den = std::stod(text.substr(slash + 1));
    if (den == 0.0) throw std::invalid_argument("zero denominator in exponent " + text);
    return LpIndex(num / den);
  }
  const double p = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("cannot parse exponent '" + text + "'");
  return LpIndex(p);
}

double LpIndex::value() const {
  if (infinite_) throw std::logic_error("infinite exponent has no finite value");
  return p_;
}

std::string LpIndex::to_string() const { return infinite_ ? "inf" : fmt::format("{}", p_); }

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* context) {
  if (!(a == b)) {
    throw std::invalid_argument(fmt::format("{}: grid mismatch (d={}, M={}, L={} vs d={}, M={}, L={})", context,
                                            a.dimension, a.samples, a.period, b.dimension, b.samples, b.period));
  }
}

Spectrum transform(const SampledField& f) {
  const GridSpec& grid = f.grid();
  ComplexBuffer out(grid.size());
  detail::dft(grid, f.values().data(), out.data(), -1);
  const double w = grid.cell_volume();
  for (cplx& c : out) c *= w;
  // Certified fields may carry roundoff outside the annulus after the DFT;
  // restore the exact zeros the certificate promises.
  if (f.certificate()) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!f.certificate()->contains(grid.frequency_radius(i))) out[i] = 0.0;
    }
  }
  return Spectrum(grid, std::move(out), f.certificate());
}

SampledField inverse(const Spectrum& s) {
  const GridSpec& grid = s.grid();
  ComplexBuffer out(grid.size());
  detail::dft(grid, s.coefficients().data(), out.data(), +1);
  const double w = grid.dimension == 1 ? 1.0 / grid.period : 1.0 / (grid.period * grid.period);
  for (cplx& c : out) c *= w;
  return SampledField(grid, std::move(out), s.certificate());
}

Spectrum multiply(const Spectrum& a, const Spectrum& b) {
  require_same_grid(a.grid(), b.grid(), "multiply");
  ComplexBuffer out(a.coefficients().begin(), a.coefficients().end());
  simd::multiply(out, b.coefficients());
  std::optional<SupportCertificate> cert;
  if (a.certificate() && b.certificate()) {
    cert = a.certificate()->intersect(*b.certificate());
  } else if (a.certificate()) {
    cert = a.certificate();
  } else if (b.certificate()) {
    cert = b.certificate();
  }
  return Spectrum(a.grid(), std::move(out), cert);
}

SampledField convolve(const SampledField& f, const SampledField& g) {
  require_same_grid(f.grid(), g.grid(), "convolve");
  return inverse(multiply(transform(f), transform(g)));
}

ComplexBuffer shift_phases(const GridSpec& grid, std::span<const double> shift) {
  if (shift.size() != static_cast<std::size_t>(grid.dimension)) {
    throw std::invalid_argument(
        fmt::format("shift has {} components, grid dimension is {}", shift.size(), grid.dimension));
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const std::size_t m = grid.samples;
  ComplexBuffer out(grid.size());
  if (grid.dimension == 1) {
    for (std::size_t i = 0; i < m; ++i) {
      const double t = reduced_turns(shift[0], grid.signed_index(i), grid.period);
      out[i] = cplx(std::cos(two_pi * t), -std::sin(two_pi * t));
    }
    return out;
  }
  std::vector<double> t1(m);
  for (std::size_t j = 0; j < m; ++j) t1[j] = reduced_turns(shift[1], grid.signed_index(j), grid.period);
  for (std::size_t i = 0; i < m; ++i) {
    const double t0 = reduced_turns(shift[0], grid.signed_index(i), grid.period);
    for (std::size_t j = 0; j < m; ++j) {
      double t = t0 + t1[j];
      t -= std::nearbyint(t);
      out[i * m + j] = cplx(std::cos(two_pi * t), -std::sin(two_pi * t));
    }
  }
  return out;
}

Spectrum phase_shift(const Spectrum& s, std::span<const double> shift) {
  ComplexBuffer out(s.coefficients().begin(), s.coefficients().end());
  simd::multiply(out, shift_phases(s.grid(), shift));
  return Spectrum(s.grid(), std::move(out), s.certificate());
}

SampledField phase_shift(const SampledField& f, std::span<const double> shift) {
  if (std::all_of(shift.begin(), shift.end(), [](double a) { return a == 0.0; }) &&
      shift.size() == static_cast<std::size_t>(f.grid().dimension)) {
    return f;
  }
  return inverse(phase_shift(transform(f), shift));
}

cplx integrate(const SampledField& f) {
  cplx sum = 0.0;
  for (const cplx& v : f.values()) sum += v;
  return sum * f.grid().cell_volume();
}

double lp_norm(const GridSpec& grid, std::span<const double> moduli, LpIndex p) {
  if (moduli.size() != grid.size()) throw std::invalid_argument("lp_norm: sample count does not match grid");
  if (p.is_infinite()) {
    double m = 0.0;
    for (double v : moduli) m = std::max(m, v);
    return m;
  }
  const double e = p.value();
  double sum = 0.0;
  if (e == 1.0) {
    for (double v : moduli) sum += v;
  } else if (e == 2.0) {
    for (double v : moduli) sum += v * v;
  } else {
    for (double v : moduli) sum += std::pow(v, e);
  }
  return std::pow(sum * grid.cell_volume(), 1.0 / e);
}

double lp_norm(const SampledField& f, LpIndex p) {
  if (p.is_infinite()) return simd::max_abs(f.values());
  if (p.value() == 2.0) return std::sqrt(simd::sum_abs2(f.values()) * f.grid().cell_volume());
  const RealBuffer m = f.moduli();
  return lp_norm(f.grid(), m, p);
}

double mixed_norm(std::span<const SampledField> fs, MixedNormSpec spec) {
  if (fs.empty()) throw std::invalid_argument("mixed_norm: empty sequence");
  const GridSpec& grid = fs.front().grid();
  for (const auto& f : fs) require_same_grid(grid, f.grid(), "mixed_norm");

  RealBuffer pointwise(grid.size(), 0.0);
  if (spec.inner_q.is_infinite()) {
    for (const auto& f : fs) simd::max_abs_into(pointwise, f.values());
  } else if (spec.inner_q.value() == 2.0) {
    for (const auto& f : fs) simd::accumulate_abs2(pointwise, f.values());
    for (double& v : pointwise) v = std::sqrt(v);
  } else {
    const double q = spec.inner_q.value();
    for (const auto& f : fs) {
      const auto vals = f.values();
      for (std::size_t i = 0; i < vals.size(); ++i) pointwise[i] += std::pow(std::abs(vals[i]), q);
    }
    for (double& v : pointwise) v = std::pow(v, 1.0 / q);
  }
  return lp_norm(grid, pointwise, spec.outer_p);
}

}  // namespace shiftlog
