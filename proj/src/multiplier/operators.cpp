#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "shiftlog/lp_ops.hpp"
#include "shiftlog/multiplier.hpp"

namespace shiftlog {

namespace {

void check_inputs(std::span<const SampledField> fs, std::size_t expected, int dimension, const char* context) {
  if (fs.size() != expected) {
    throw std::invalid_argument(fmt::format("{}: expected {} inputs, got {}", context, expected, fs.size()));
  }
  for (const auto& f : fs) {
    require_same_grid(fs.front().grid(), f.grid(), context);
    if (f.grid().dimension != dimension) throw std::invalid_argument(fmt::format("{}: dimension mismatch", context));
  }
}

SupportCertificate active_band(const BandLimitedFunction& g, int scale, const Spectrum& f_hat) {
  const SupportCertificate dilated = g.dilated_certificate(scale);
  return f_hat.certificate() ? dilated.intersect(*f_hat.certificate()) : dilated;
}

// Direct n = 2, d = 1 quadrature. The kernel is enumerated on the base
// windows; `shear` maps a base lattice point to the point where the handle
// takes that value (identity or the transpose involution).
template <class Shear>
cplx direct_form(const SampledKernel& base, std::span<const SampledField> fs, Shear shear) {
  if (base.n() != 2 || base.dimension() != 1) throw std::invalid_argument("lambda_form_direct needs n = 2, d = 1");
  check_inputs(fs, 3, 1, "lambda_form_direct");
  const GridSpec& grid = fs.front().grid();
  const double h = grid.spacing();
  if (std::abs(base.lattice().spacing - h) > 1e-12 * h) {
    throw std::invalid_argument("lambda_form_direct: kernel lattice spacing must equal the grid spacing");
  }
  const long m = static_cast<long>(grid.samples);
  const long w = static_cast<long>(base.lattice().samples);
  auto wrap = [m](long i) { return static_cast<std::size_t>(((i % m) + m) % m); };
  auto centered = [w](long i) { return i <= w / 2 ? i : i - w; };
  const auto& origins = base.lattice().origins;

  cplx total = 0.0;
  for (long a = 0; a < w; ++a) {
    for (long b = 0; b < w; ++b) {
      const std::array<long, 2> z{origins[0][0] + centered(a), origins[1][0] + centered(b)};
      const cplx k = base.at(z);
      if (k == 0.0) continue;
      const std::array<long, 2> y = shear(z);
      cplx inner = 0.0;
      for (long x = 0; x < m; ++x) inner += fs[0][wrap(x - y[0])] * fs[1][wrap(x - y[1])] * fs[2][wrap(x)];
      total += k * inner;
    }
  }
  return total * h * h * h;
}

}  // namespace

cplx lambda_form_direct(const SampledKernel& kernel, std::span<const SampledField> fs) {
  return direct_form(kernel, fs, [](const std::array<long, 2>& z) { return z; });
}

cplx lambda_form_direct(const TransposedKernel& kernel, std::span<const SampledField> fs) {
  return direct_form(kernel.base(), fs, [&](const std::array<long, 2>& z) {
    const auto y = kernel.shear(z);
    return std::array<long, 2>{y[0], y[1]};
  });
}

SampledField apply_T(const TensorKernel& kernel, std::span<const SampledField> fs, DyadicRange range) {
  range.validate();
  check_inputs(fs, static_cast<std::size_t>(kernel.n()), kernel.dimension(), "apply_T");
  const GridSpec& grid = fs.front().grid();
  std::vector<Spectrum> spectra;
  spectra.reserve(fs.size());
  for (const auto& f : fs) spectra.push_back(transform(f));

  ComplexBuffer total(grid.size());
  for (int l = range.min; l <= range.max; ++l) {
    for (const auto& term : kernel.terms()) {
      bool vanishes = false;
      for (int k = 0; k < kernel.n() && !vanishes; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const SupportCertificate active = active_band(term[uk], l, spectra[uk]);
        if (active.empty()) {
          vanishes = true;
        } else {
          require_below_nyquist(grid, active.outer, fmt::format("apply_T factor {} at scale {}", k + 1, l));
        }
      }
      if (vanishes) continue;
      ComplexBuffer product(grid.size(), cplx(1.0));
      for (int k = 0; k < kernel.n(); ++k) {
        const auto uk = static_cast<std::size_t>(k);
        ComplexBuffer coeffs = term[uk].dilated_spectrum(grid, l);
        const auto f_hat = spectra[uk].coefficients();
        for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] *= f_hat[i];
        const SampledField piece = inverse(Spectrum(grid, std::move(coeffs)));
        for (std::size_t i = 0; i < product.size(); ++i) product[i] *= piece[i];
      }
      for (std::size_t i = 0; i < total.size(); ++i) total[i] += product[i];
    }
  }
  return SampledField(grid, std::move(total));
}

cplx lambda_form(const TensorKernel& kernel, std::span<const SampledField> fs, DyadicRange range) {
  check_inputs(fs, static_cast<std::size_t>(kernel.n()) + 1, kernel.dimension(), "lambda_form");
  const SampledField t = apply_T(kernel, fs.first(fs.size() - 1), range);
  const SampledField& last = fs.back();
  ComplexBuffer product(t.size());
  for (std::size_t i = 0; i < product.size(); ++i) product[i] = t[i] * last[i];
  return integrate(SampledField(t.grid(), std::move(product)));
}

cplx shifted_form(std::span<const SampledField> fs, int s, int t, int tau, std::span<const std::array<double, 2>> shifts,
                  DyadicRange range) {
  range.validate();
  if (fs.size() < 3) throw std::invalid_argument("shifted_form needs at least three inputs");
  check_inputs(fs, fs.size(), fs.front().grid().dimension, "shifted_form");
  const int count = static_cast<int>(fs.size());
  auto in_range = [count](int k) { return k >= 1 && k <= count; };
  if (!in_range(s) || !in_range(t) || !in_range(tau) || s == t) {
    throw std::invalid_argument(fmt::format("shifted_form: slots s = {}, t = {}, tau = {} invalid for {} inputs", s, t,
                                            tau, count));
  }
  if (shifts.size() != fs.size()) throw std::invalid_argument("shifted_form: one shift per input needed");

  const RadialProfile lowpass = RadialProfile::lowpass(1.0, 2.0);
  const RadialProfile annular = RadialProfile::annular(0.5, 1.0, 1.0, 2.0);
  const GridSpec& grid = fs.front().grid();
  std::vector<Spectrum> spectra;
  for (const auto& f : fs) spectra.push_back(transform(f));

  cplx total = 0.0;
  for (int l = range.min; l <= range.max; ++l) {
    ComplexBuffer product(grid.size(), cplx(1.0));
    for (int k = 1; k <= count; ++k) {
      const auto uk = static_cast<std::size_t>(k - 1);
      const ShiftedDyadicOp op{k == s || k == t ? annular : lowpass, l,
                               k == tau ? std::array<double, 2>{0.0, 0.0} : shifts[uk]};
      const SampledField piece = dyadic_piece(spectra[uk], op);
      for (std::size_t i = 0; i < product.size(); ++i) product[i] *= piece[i];
    }
    total += integrate(SampledField(grid, std::move(product)));
  }
  return total;
}

}  // namespace shiftlog
