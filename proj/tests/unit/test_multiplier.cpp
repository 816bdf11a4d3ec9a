#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "shiftlog/lp_ops.hpp"
#include "shiftlog/multiplier.hpp"
#include "support.hpp"

using namespace shiftlog;

namespace {

BandLimitedFunction bump(double center, double radius, double translation = 0.0, cplx weight = 1.0) {
  return BandLimitedFunction(
      1, {SpectralAtom{RadialProfile::lowpass(radius / 2.0, radius), {center, 0.0}, {translation, 0.0}, weight}});
}

TensorKernel two_slot_kernel() {
  return TensorKernel(1, {{bump(0.6, 0.3, 0.5), bump(-0.8, 0.25, -1.25, cplx(0.3, 0.7))}});
}

double window_mass(const SampledField& w, double h) {
  double s = 0.0;
  for (const cplx& z : w.values()) s += std::abs(z);
  return s * h;
}

std::vector<SampledField> band_inputs(const GridSpec& grid, std::size_t count, double inner, double outer,
                                      std::mt19937_64& rng) {
  std::vector<SampledField> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(testing::random_band_field(grid, inner, outer, rng));
  return out;
}

}  // namespace

TEST_CASE("D_0 of a rank-one kernel is the product of factor masses") {
  const TensorKernel k = two_slot_kernel();
  const SampledKernel s(k, k.default_lattice(0.25, 256));
  const DLambdaResult d0 = d_lambda(s, 0.0);
  CHECK(d0.exact);
  const double h = s.lattice().spacing;
  const double oracle = window_mass(s.window(0, 0), h) * window_mass(s.window(0, 1), h);
  CHECK(std::abs(d0.value - oracle) <= 1e-8 * oracle);
}

TEST_CASE("D_lambda is monotone in lambda and bracketed") {
  const TensorKernel k = two_slot_kernel();
  const SampledKernel s(k, k.default_lattice(0.25, 256));
  double previous = 0.0;
  for (double lambda : {0.0, 0.25, 0.5, 1.0, 2.0}) {
    const DLambdaResult exact = d_lambda(s, lambda, {DLambdaMethod::Exact});
    const DLambdaResult bracket = d_lambda(s, lambda, {DLambdaMethod::Bracket});
    CHECK(exact.value >= previous);
    CHECK(bracket.lower <= exact.value * (1.0 + 1e-12));
    CHECK(exact.value <= bracket.upper * (1.0 + 1e-12));
    CHECK(bracket.relative_width() < 0.10);
    previous = exact.value;
  }
}

TEST_CASE("three-slot bracket contains the exact sum") {
  const TensorKernel k(1, {{bump(0.7, 0.3, 2.0), bump(0.9, 0.3, -3.0), bump(-1.1, 0.4, 0.75)}});
  const SampledKernel s(k, k.default_lattice(0.25, 64));
  for (double lambda : {0.0, 1.0, 1.5}) {
    const DLambdaResult exact = d_lambda(s, lambda);
    const DLambdaResult bracket = d_lambda(s, lambda, {DLambdaMethod::Bracket});
    CHECK(exact.exact);
    CHECK(bracket.lower <= exact.value * (1.0 + 1e-12));
    CHECK(exact.value <= bracket.upper * (1.0 + 1e-12));
  }
}

TEST_CASE("D_lambda of a centred unit-mass bump stays within the weight range on its window") {
  const TensorKernel k(1, {{bump(0.0, 0.5), bump(0.0, 0.5)}});
  const SampledKernel s(k, k.default_lattice(0.25, 128));
  const double d0 = d_lambda(s, 0.0).value;
  const double reach = 0.25 * 64.0 * std::sqrt(2.0);
  for (double lambda : {0.5, 1.0, 3.0}) {
    const double d = d_lambda(s, lambda).value / d0;
    CHECK(d >= 1.0);
    CHECK(d <= std::pow(std::log(std::numbers::e + reach), lambda));
  }
}

TEST_CASE("d_lambda rejects bad arguments") {
  const TensorKernel k = two_slot_kernel();
  const SampledKernel s(k, k.default_lattice(0.25, 64));
  CHECK_THROWS_AS(d_lambda(s, -0.5), std::invalid_argument);
  const TensorKernel two_terms(1, {{bump(0.6, 0.3), bump(0.8, 0.3)}, {bump(0.5, 0.3), bump(0.9, 0.3)}});
  const SampledKernel st(two_terms, two_terms.default_lattice(0.25, 64));
  CHECK_THROWS_AS(d_lambda(st, 1.0, {DLambdaMethod::Bracket}), std::invalid_argument);
  CHECK(d_lambda(st, 1.0).exact);
  const TensorKernel wide(2, {{BandLimitedFunction(2, {SpectralAtom{RadialProfile::lowpass(0.2, 0.4), {1.0, 0.0}}}),
                               BandLimitedFunction(2, {SpectralAtom{RadialProfile::lowpass(0.2, 0.4), {0.0, 1.0}}})}});
  const SampledKernel sw(wide, wide.default_lattice(0.25, 32));
  CHECK_THROWS_AS(d_lambda(sw, 1.0, {DLambdaMethod::Exact}), std::invalid_argument);
  CHECK_FALSE(d_lambda(sw, 1.0).exact);
}

TEST_CASE("transposed kernel is the sheared base kernel") {
  const TensorKernel k = two_slot_kernel();
  const SampledKernel s(k, k.default_lattice(0.25, 128));
  const TransposedKernel t1 = transpose_kernel(s, 1);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> pick(-40, 40);
  for (int i = 0; i < 100; ++i) {
    const std::array<long, 2> y{pick(rng), pick(rng)};
    const std::array<long, 2> z{-y[0], y[1] - y[0]};
    REQUIRE(t1.at(y) == s.at(z));
  }
  CHECK_THROWS_AS(transpose_kernel(s, 0), std::invalid_argument);
  CHECK_THROWS_AS(transpose_kernel(s, 3), std::invalid_argument);
  CHECK(std::abs(t1.shear_norm() - (1.0 + std::sqrt(5.0)) / 2.0) < 1e-12);
}

TEST_CASE("transposes preserve D_0 and keep D_lambda comparable") {
  const TensorKernel k = two_slot_kernel();
  const SampledKernel s(k, k.default_lattice(0.25, 256));
  const double d0 = d_lambda(s, 0.0).value;
  for (int j = 1; j <= 2; ++j) {
    const TransposedKernel t = transpose_kernel(s, j);
    CHECK(std::abs(d_lambda(t, 0.0).value - d0) <= 1e-6 * d0);
    const double ratio = d_lambda(t, 1.0).value / d_lambda(s, 1.0).value;
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
  }
}

TEST_CASE("apply_T at one scale matches direct convolutions") {
  const GridSpec grid{1, 512, 64.0};
  std::mt19937_64 rng(11);
  const TensorKernel k(1, {{bump(1.0, 0.3, 0.5), bump(-1.0, 0.4, 2.0, cplx(0.0, 1.0)), bump(1.2, 0.5)}});
  const auto fs = band_inputs(grid, 3, 0.5, 1.5, rng);
  const SampledField t = apply_T(k, fs, {0, 0});
  ComplexBuffer direct(grid.size(), cplx(1.0));
  for (int j = 0; j < 3; ++j) {
    const SampledField piece = convolve(k.terms()[0][static_cast<std::size_t>(j)].sample(grid), fs[static_cast<std::size_t>(j)]);
    for (std::size_t i = 0; i < direct.size(); ++i) direct[i] *= piece[i];
  }
  CHECK(testing::max_abs_diff(t.values(), direct) <= 1e-12 * testing::max_abs(direct));
}

TEST_CASE("apply_T is linear in each slot") {
  const GridSpec grid{1, 256, 32.0};
  std::mt19937_64 rng(12);
  const TensorKernel k(1, {{bump(1.0, 0.4), bump(0.8, 0.4, 1.0)}, {bump(0.9, 0.3, -0.5), bump(1.1, 0.3)}});
  const DyadicRange range{-1, 1};
  for (int slot = 0; slot < 2; ++slot) {
    auto fs = band_inputs(grid, 2, 0.0, 1.5, rng);
    const SampledField other = testing::random_band_field(grid, 0.0, 1.5, rng);
    const cplx a(0.7, -1.3), b(-0.4, 0.2);
    const SampledField base = apply_T(k, fs, range);
    std::vector<SampledField> alt = fs;
    alt[static_cast<std::size_t>(slot)] = other;
    const SampledField with_other = apply_T(k, alt, range);
    ComplexBuffer mix(grid.size());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * fs[static_cast<std::size_t>(slot)][i] + b * other[i];
    alt[static_cast<std::size_t>(slot)] = SampledField(grid, mix);
    const SampledField combined = apply_T(k, alt, range);
    ComplexBuffer expect(grid.size());
    for (std::size_t i = 0; i < expect.size(); ++i) expect[i] = a * base[i] + b * with_other[i];
    CHECK(testing::max_abs_diff(combined.values(), expect) <= 1e-12 * testing::max_abs(expect));

    alt[static_cast<std::size_t>(slot)] = fs[static_cast<std::size_t>(slot)].scaled(a);
    const SampledField scaled = apply_T(k, alt, range);
    for (std::size_t i = 0; i < expect.size(); ++i) expect[i] = a * base[i];
    CHECK(testing::max_abs_diff(scaled.values(), expect) <= 1e-12 * testing::max_abs(expect));
  }
}

TEST_CASE("apply_T skips scales whose spectra miss the inputs") {
  const GridSpec grid{1, 512, 64.0};
  std::mt19937_64 rng(13);
  const TensorKernel k(1, {{bump(1.0, 0.1), bump(1.0, 0.1)}});
  const auto fs = band_inputs(grid, 2, 0.9, 1.1, rng);
  const SampledField single = apply_T(k, fs, {0, 0});
  const SampledField many = apply_T(k, fs, {-3, 3});
  CHECK(testing::max_abs_diff(single.values(), many.values()) <= 1e-10 * testing::max_abs(single.values()));
}

TEST_CASE("apply_T names the scale that reaches Nyquist") {
  const GridSpec grid{1, 64, 16.0};  // Nyquist 2
  std::mt19937_64 rng(14);
  const TensorKernel k(1, {{bump(1.0, 0.3), bump(1.0, 0.3)}});
  const std::vector<SampledField> fs{testing::random_field(grid, rng), testing::random_field(grid, rng)};
  CHECK_NOTHROW(apply_T(k, fs, {0, 0}));
  try {
    apply_T(k, fs, {0, 1});
    FAIL("expected a Nyquist error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("scale 1") != std::string::npos);
  }
  CHECK_THROWS_AS(apply_T(k, std::span<const SampledField>(fs).first(1), {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(apply_T(k, fs, {1, 0}), std::invalid_argument);
}

TEST_CASE("lambda_form agrees with a pointwise quadrature") {
  const GridSpec grid{1, 256, 32.0};
  std::mt19937_64 rng(15);
  const TensorKernel k(1, {{bump(1.0, 0.4, 0.25), bump(-0.7, 0.4, 1.0)}});
  auto fs = band_inputs(grid, 3, 0.0, 1.5, rng);
  const DyadicRange range{-1, 1};
  const SampledField t = apply_T(k, std::span<const SampledField>(fs).first(2), range);
  cplx oracle = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) oracle += t[i] * fs[2][i];
  oracle *= grid.spacing();
  const cplx value = lambda_form(k, fs, range);
  CHECK(std::abs(value - oracle) <= 1e-12 * std::abs(oracle));

  fs[2] = SampledField::zeros(grid);
  CHECK(lambda_form(k, fs, range) == cplx(0.0));
}

TEST_CASE("lambda_form of real kernels and real inputs is real") {
  const GridSpec grid{1, 256, 32.0};
  std::mt19937_64 rng(16);
  const TensorKernel k(1, {{bump(0.0, 1.0), bump(0.0, 1.2, 0.5)}});
  std::vector<SampledField> fs;
  for (int i = 0; i < 3; ++i) {
    const SampledField f = testing::random_band_field(grid, 0.0, 1.0, rng);
    ComplexBuffer re(grid.size());
    for (std::size_t j = 0; j < re.size(); ++j) re[j] = f[j].real();
    fs.emplace_back(grid, std::move(re));
  }
  const cplx value = lambda_form(k, fs, {-1, 0});
  CHECK(std::abs(value.imag()) < 1e-10);
  CHECK(std::abs(value.real()) > 1e-6);
}

TEST_CASE("direct form reproduces the spectral form and the transpose swap") {
  const GridSpec grid{1, 64, 16.0};
  std::mt19937_64 rng(17);
  const TensorKernel k(1, {{bump(0.8, 0.5, 0.5), bump(-0.6, 0.6, -1.0)}});
  const auto fs = band_inputs(grid, 3, 0.0, 1.5, rng);
  const SampledKernel full(k, KernelLattice{grid.spacing(), grid.samples, {{0, 0}, {0, 0}}});
  const cplx spectral = lambda_form(k, fs, {0, 0});
  const cplx direct = lambda_form_direct(full, fs);
  CHECK(std::abs(spectral - direct) <= 1e-10 * std::abs(spectral));

  const SampledKernel local(k, k.default_lattice(grid.spacing(), 64));
  const cplx base = lambda_form_direct(local, fs);
  for (int j = 1; j <= 2; ++j) {
    std::vector<SampledField> swapped = fs;
    std::swap(swapped[static_cast<std::size_t>(j - 1)], swapped[2]);
    const cplx moved = lambda_form_direct(transpose_kernel(local, j), swapped);
    CHECK(std::abs(moved - base) <= 1e-4 * std::abs(base));
  }
  const SampledKernel coarse(k, k.default_lattice(1.5 * grid.spacing(), 32));
  CHECK_THROWS_AS(lambda_form_direct(coarse, fs), std::invalid_argument);
}

TEST_CASE("shifted_form vanishes when every scale product has no zero frequency") {
  const GridSpec grid{1, 512, 64.0};
  std::mt19937_64 rng(18);
  // One-sided spectra: every product of pieces has positive frequencies only.
  const auto fs = band_inputs(grid, 3, 0.0, 1.5, rng);
  std::vector<SampledField> positive;
  for (const auto& f : fs) {
    const Spectrum s = transform(f);
    ComplexBuffer c(s.size());
    for (std::size_t i = 0; i < c.size(); ++i)
      if (grid.frequency(i)[0] > 0.2) c[i] = s[i];
    positive.push_back(inverse(Spectrum(grid, std::move(c), SupportCertificate{0.2, 1.5})));
  }
  const std::vector<std::array<double, 2>> zero(3, {0.0, 0.0});
  const cplx v = shifted_form(positive, 1, 2, 3, zero, {-2, 2});
  CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("shifted_form at one scale equals the explicit integrand") {
  const GridSpec grid{1, 512, 64.0};
  std::mt19937_64 rng(19);
  const auto fs = band_inputs(grid, 4, 0.0, 1.8, rng);
  const std::vector<std::array<double, 2>> shifts{{{3.3, 0.0}, {-1.7, 0.0}, {0.4, 0.0}, {9.0, 0.0}}};
  const int s = 1, t = 3, tau = 4;
  for (int l : {0, 1}) {
    const cplx value = shifted_form(fs, s, t, tau, shifts, {l, l});
    ComplexBuffer product(grid.size(), cplx(1.0));
    for (int k = 1; k <= 4; ++k) {
      const Spectrum f_hat = transform(fs[static_cast<std::size_t>(k - 1)]);
      const double y = k == tau ? 0.0 : shifts[static_cast<std::size_t>(k - 1)][0];
      ComplexBuffer c(grid.size());
      for (std::size_t i = 0; i < c.size(); ++i) {
        const double xi = grid.frequency(i)[0];
        const double r = std::abs(std::ldexp(xi, -l));
        // phi-hat: 1 below 1, 0 beyond 2; psi-hat = phi-hat(xi) - phi-hat(2 xi).
        const RadialProfile phi = RadialProfile::lowpass(1.0, 2.0);
        const double m = (k == s || k == t) ? phi(r) - phi(2.0 * r) : phi(r);
        const double angle = -2.0 * std::numbers::pi * std::ldexp(y, -l) * xi;
        c[i] = f_hat[i] * m * cplx(std::cos(angle), std::sin(angle));
      }
      const SampledField piece = inverse(Spectrum(grid, std::move(c)));
      for (std::size_t i = 0; i < product.size(); ++i) product[i] *= piece[i];
    }
    cplx oracle = 0.0;
    for (const cplx& z : product) oracle += z;
    oracle *= grid.spacing();
    CHECK(std::abs(value - oracle) <= 1e-10 * std::abs(oracle));
  }
  CHECK_THROWS_AS(shifted_form(fs, 1, 1, 4, shifts, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(shifted_form(fs, 1, 2, 5, shifts, {0, 0}), std::invalid_argument);
}
