#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "shiftlog/counterexample.hpp"
#include "support.hpp"

using namespace shiftlog;

namespace {

const CxConstraint& find(const std::vector<CxConstraint>& cs, const std::string& name) {
  const auto it = std::find_if(cs.begin(), cs.end(), [&](const CxConstraint& c) { return c.name == name; });
  REQUIRE(it != cs.end());
  return *it;
}

// Identity preset on the smallest grid with 2^zeta_N below Nyquist (L = 64),
// optionally refined.
CxConfig small_identity(int count, int refine = 0) {
  CxConfig cfg = CxConfig::identity_mode(count);
  cfg.grid = GridSpec{1, std::size_t{1} << (cfg.zeta.back() + 8 + refine), 64.0};
  cfg.kernel_samples = 512;
  return cfg;
}

}  // namespace

TEST_CASE("schedules and presets") {
  CHECK(CxConfig::linear_schedule(3, 4) == std::vector<int>{4, 8, 12});
  CHECK(CxConfig::linear_schedule(2, 1, 4) == std::vector<int>{5, 6});
  CHECK_THROWS_AS(CxConfig::linear_schedule(0, 1), std::invalid_argument);
  const CxConfig id = CxConfig::identity_mode(6);
  CHECK(id.range().min == 4);
  CHECK(id.range().max == 11);
  CHECK(id.weight_exponent() == doctest::Approx(0.5));
  const CxConfig sep = CxConfig::separation_mode(3);
  CHECK(sep.grid->samples == (std::size_t{1} << 22));
  CHECK(predicted_ratio_slope(sep) == doctest::Approx(0.0));
  CxConfig low = sep;
  low.lambda = 0.25;
  CHECK(predicted_ratio_slope(low) == doctest::Approx(0.25));
}

TEST_CASE("reference geometry passes every support constraint symbolically") {
  for (int count : {1, 3, 5}) {
    const auto cs = validate_config(CxConfig::reference_geometry(count));
    for (const auto& c : cs) CHECK_MESSAGE(c.pass, c.name << ": " << c.detail);
    CHECK(constraints_hold(cs));
  }
}

TEST_CASE("identity preset passes the frequency constraints and flags overlapping bumps") {
  const auto cs = validate_config(CxConfig::identity_mode(6));
  CHECK(constraints_hold(cs));
  const CxConstraint& sep = find(cs, "physical_separation");
  CHECK_FALSE(sep.pass);
  CHECK_FALSE(sep.blocking);
  CHECK(sep.detail.find("overlapping") != std::string::npos);
  CHECK(find(cs, "period_fit").pass);
  CHECK(find(validate_config(CxConfig::separation_mode(3)), "physical_separation").pass);
}

TEST_CASE("unit-step schedule with rho = 1/8 breaks the plateau conditions") {
  CxConfig cfg;
  cfg.zeta = CxConfig::linear_schedule(6, 1);
  cfg.eta_radius = 0.125;
  cfg.grid = GridSpec{1, std::size_t{1} << 18, 256.0};
  const auto cs = validate_config(cfg);
  CHECK_FALSE(constraints_hold(cs));
  CHECK_FALSE(find(cs, "eta_inside_beta_plateau").pass);
  CHECK_FALSE(find(cs, "eta_plateau_covers_beta").pass);
  CHECK(find(cs, "eta_supports_disjoint").pass);
  CHECK(find(cs, "below_nyquist").pass);
  CHECK(find(cs, "physical_separation").detail.find("overlapping") != std::string::npos);
  CHECK_THROWS_AS(build_kernel(cfg), CxValidationError);
}

TEST_CASE("repeated schedule entries are rejected") {
  CxConfig cfg = CxConfig::identity_mode(3);
  cfg.zeta = {5, 6, 6};
  const auto cs = validate_config(cfg);
  CHECK_FALSE(find(cs, "eta_supports_disjoint").pass);
  CHECK_FALSE(find(cs, "schedule_increasing").pass);
  try {
    build_inputs(cfg);
    FAIL("expected a validation error");
  } catch (const CxValidationError& e) {
    CHECK(e.violations().size() >= 2);
  }
  CxConfig bad_slots = CxConfig::identity_mode(2);
  bad_slots.t = 4;
  CHECK_FALSE(find(validate_config(bad_slots), "slots").pass);
}

TEST_CASE("inputs are single packets, conjugate mirrors and vanish at the origin") {
  const CxConfig cfg = small_identity(1);
  const GridSpec& grid = *cfg.grid;
  const auto fs = build_inputs(cfg);
  REQUIRE(fs.size() == 3);
  const Spectrum fs_hat = transform(fs[0]);
  const Spectrum ft_hat = transform(fs[1]);
  const double centre = 32.0;
  const ComplexBuffer analytic = build_functions(cfg).inputs[0].dilated_spectrum(grid);
  double mirror = 0.0, scale = 0.0, outside = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double xi = grid.frequency(i)[0];
    if (std::abs(xi - centre) > cfg.eta_radius) {
      REQUIRE(analytic[i] == cplx(0.0));
      outside = std::max(outside, std::abs(fs_hat[i]));
    }
    const std::size_t j = (grid.samples - i) % grid.samples;
    mirror = std::max(mirror, std::abs(ft_hat[j] - std::conj(fs_hat[i])));
    scale = std::max(scale, std::abs(fs_hat[i]));
  }
  CHECK(fs_hat[0] == cplx(0.0));
  CHECK(ft_hat[0] == cplx(0.0));
  CHECK(mirror <= 1e-12 * scale);
  CHECK(outside <= 1e-12 * scale);
  for (const char* p : {"1", "2", "3", "4", "inf"}) {
    const LpIndex idx = LpIndex::parse(p);
    CHECK(std::abs(lp_norm(fs[0], idx) - lp_norm(fs[1], idx)) <= 1e-10 * lp_norm(fs[0], idx));
  }
}

TEST_CASE("kernel factors carry the annular bump and the low-pass bump") {
  const CxConfig cfg = small_identity(2);
  const TensorKernel k = build_kernel(cfg);
  REQUIRE(k.rank_one());
  const auto& term = k.terms()[0];
  const CounterexampleProfiles prof = make_counterexample_profiles(cfg.eta_radius);
  for (double xi : {0.5, 0.93, 1.0, 1.07, 1.2}) {
    const std::array<double, 1> at{xi};
    CHECK(std::abs(std::abs(term[0].spectrum(at)) - prof.beta_hat(xi)) < 1e-15);
    CHECK(std::abs(std::abs(term[1].spectrum(at)) - prof.beta_hat(xi)) < 1e-15);
  }
  CHECK(term[2].certificate().outer == doctest::Approx(cfg.eta_radius).epsilon(1e-10));

  CxConfig two = cfg;
  two.n = 2;
  const TensorKernel k2 = build_kernel(two);
  CHECK(k2.n() == 2);
  CHECK(k2.joint_support_within(0.5, 2.0));
}

TEST_CASE("frequency orthogonality is exact") {
  for (int count : {1, 3, 6}) {
    const OrthogonalityResult r = orthogonality_check(small_identity(count));
    CHECK(r.max_violation < 1e-14);
    CHECK(r.off_scale_max == 0.0);
  }
}

TEST_CASE("T collapses to N eta^2 beta at two resolutions") {
  for (int count : {2, 4}) {
    const CxReport coarse = run_counterexample(small_identity(count));
    const CxReport fine = run_counterexample(small_identity(count, 1));
    CHECK(coarse.identity_error < 1e-8);
    CHECK(fine.identity_error < 1e-8);
    const double floor = 1e-15;
    const double a = std::max(coarse.identity_error, floor), b = std::max(fine.identity_error, floor);
    CHECK(std::max(a, b) <= 10.0 * std::min(a, b));
  }
}

TEST_CASE("single-packet report is finite and positive") {
  const CxReport r = run_counterexample(small_identity(1));
  CHECK(r.count == 1);
  CHECK(std::isfinite(r.ratio));
  CHECK(r.ratio > 0.0);
  CHECK(r.output_norm > 0.0);
  CHECK(r.d_lambda.value > 0.0);
  for (double v : r.input_norms) CHECK(v > 0.0);
}

TEST_CASE("ratio is unchanged by rescaling the inputs") {
  CxConfig cfg = small_identity(2);
  const CxReport base = run_counterexample(cfg);
  cfg.input_scales = {2.0, 0.5, 3.0};
  const CxReport scaled = run_counterexample(cfg);
  CHECK(std::abs(scaled.ratio - base.ratio) <= 1e-10 * base.ratio);
  CHECK(scaled.identity_error < 1e-8);
}

TEST_CASE("separated trains grow like N^(1/4) in L4") {
  double first = 0.0;
  for (int count : {1, 2}) {
    CxConfig cfg = CxConfig::separation_mode(count);
    cfg.grid = GridSpec{1, std::size_t{1} << 18, 500.0};
    cfg.kernel_samples = 512;
    const CxReport r = run_counterexample(cfg);
    const double normalised = r.input_norms[0] / std::pow(count, 0.25);
    if (count == 1) first = normalised;
    CHECK(normalised / first >= 0.5);
    CHECK(normalised / first <= 2.0);
    CHECK(normalised >= 0.25);
    CHECK(r.identity_error < 1e-8);
  }
}

TEST_CASE("ratio fit recovers synthetic power laws") {
  std::vector<std::pair<double, double>> pts;
  for (double n : {1.0, 2.0, 3.0, 5.0}) pts.emplace_back(n, 0.7 * std::pow(n, 0.25));
  const FitResult fit = ratio_growth_fit(pts);
  CHECK(std::abs(fit.exponent - 0.25) < 1e-9);
  CHECK(fit.residual < 1e-12);
  const std::vector<std::pair<double, double>> two{{1.0, 1.0}, {2.0, 1.0}, {2.0, 1.1}};
  CHECK_THROWS_AS(ratio_growth_fit(two), std::invalid_argument);
  const std::vector<std::pair<double, double>> negative{{1.0, 1.0}, {2.0, -1.0}, {3.0, 1.0}};
  CHECK_THROWS_AS(ratio_growth_fit(negative), std::invalid_argument);
}
