// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when any
// criterion fails. Pass a list of criterion numbers to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "shiftlog/calibration.hpp"
#include "shiftlog/cli.hpp"
#include "shiftlog/counterexample.hpp"
#include "shiftlog/exponents.hpp"
#include "shiftlog/lp_ops.hpp"
#include "shiftlog/multiplier.hpp"
#include "shiftlog/rng.hpp"
#include "shiftlog/shifted_lab.hpp"

using namespace shiftlog;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit;  // seconds; 0 for none
  std::function<Outcome()> run;
};

Rational R(std::int64_t a, std::int64_t b = 1) { return Rational(a, b); }

double number(const cli::Report& r, const std::string& key) {
  const auto v = r.value("result", key);
  if (!v) throw std::runtime_error("report has no result." + key);
  return std::stod(*v);
}

cli::CommandOutput run(const std::string& command, const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  cli::Config config;
  for (const auto& [k, v] : overrides) config.set(k, v);
  return cli::run_command(command, config);
}

// Random full point of n+1 nonnegative rationals summing to one, common
// denominator at most 64. Ties and zeros are frequent.
std::vector<Rational> random_full_point(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> den_dist(n + 1, 64);
  const int den = den_dist(rng);
  std::uniform_int_distribution<int> cut(0, den);
  std::vector<int> cuts(static_cast<std::size_t>(n));
  for (auto& c : cuts) c = cut(rng);
  std::sort(cuts.begin(), cuts.end());
  std::vector<Rational> point;
  int prev = 0;
  for (int c : cuts) {
    point.push_back(R(c - prev, den));
    prev = c;
  }
  point.push_back(R(den - prev, den));
  return point;
}

double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Outcome partition() {
  const auto out = run("partition");
  const double radial = number(out.report, "radial_max_defect");
  const double grid = number(out.report, "grid_max_defect");
  const double worst = std::max(radial, grid);
  return {out.status == 0 && worst < 1e-12, fmt::format("max defect {:.3g} (radial and grid sweeps)", worst)};
}

Outcome change_of_variables() {
  const auto out = run("changevars");
  const double l2 = number(out.report, "l2_max_discrepancy");
  const double l3 = number(out.report, "l3_max_discrepancy");
  const bool pass = number(out.report, "l2_configs") == 100 && l2 < 1e-10 && l3 < 1e-9;
  return {pass, fmt::format("100 configs max {:.3g}; L3 variant max {:.3g}", l2, l3)};
}

Outcome shift_identity() {
  const GridSpec grid{1, 1024, 32.0};
  const LPPair pair = make_lp_pair({-2, 4});
  SplitMix64 rng(3);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const SampledField f = random_band_field(grid, 0.0, 15.0, SplitMix64(rng(), 0));
    const int scale = -2 + static_cast<int>(rng() % 7);
    const double y = 80.0 * rng.uniform() - 40.0;
    const RadialProfile& prof = trial % 2 ? pair.phi_hat : pair.psi_hat;
    const SampledField shifted = dyadic_piece(f, {prof, scale, {y, 0.0}});
    const double by[1] = {std::ldexp(y, -scale)};
    const SampledField moved = phase_shift(dyadic_piece(f, {prof, scale, {}}), by);
    worst = std::max(worst, max_abs_diff(shifted.values(), moved.values()));
  }
  return {worst < 1e-11, fmt::format("50 cases, max abs error {:.3g}", worst)};
}

Outcome cancellation() {
  double worst = 0.0, off = 0.0;
  for (int count : {2, 4, 6}) {
    const OrthogonalityResult r = orthogonality_check(CxConfig::identity_mode(count));
    worst = std::max(worst, r.max_violation);
    off = std::max(off, r.off_scale_max);
  }
  return {worst < 1e-14 && off == 0.0, fmt::format("max violation {:.3g}, off-scale max {:.3g}", worst, off)};
}

Outcome identity() {
  double worst = 0.0;
  for (int count : {2, 4, 6}) {
    const CxConfig cfg = CxConfig::identity_mode(count);
    if (cfg.grid->samples != (std::size_t{1} << 18)) return {false, "identity preset is not on M = 2^18"};
    worst = std::max(worst, run_counterexample(cfg).identity_error);
  }
  return {worst < 1e-8, fmt::format("N in {{2, 4, 6}}, max relative L2 error {:.3g}", worst)};
}

Outcome exponent_oracle() {
  std::mt19937_64 rng(6);
  int mismatches = 0, oracle_misses = 0;
  for (int n = 2; n <= 5; ++n) {
    for (int trial = 0; trial < 1000; ++trial) {
      auto point = random_full_point(n, rng);
      const PTuple pt = PTuple::from_full_point(point);
      const Rational sharp = sharp_lambda(pt);
      if (sharp != brute_lambda(pt)) ++mismatches;
      std::sort(point.begin(), point.end());
      if (sharp != 1 - point[0] - point[1]) ++oracle_misses;
    }
  }
  bool special = true;
  for (int n = 2; n <= 5; ++n) {
    const std::vector<Rational> equal(static_cast<std::size_t>(n + 1), R(1, n + 1));
    special = special && sharp_lambda(PTuple::from_full_point(equal)) == R(n - 1, n + 1);
    for (int v = 0; v <= n; ++v) {
      std::vector<Rational> vertex(static_cast<std::size_t>(n + 1), R(0));
      vertex[static_cast<std::size_t>(v)] = R(1);
      special = special && sharp_lambda(PTuple::from_full_point(vertex)) == R(1);
    }
  }
  return {mismatches == 0 && oracle_misses == 0 && special,
          fmt::format("4000 tuples: {} brute mismatches, {} oracle mismatches; equal and vertex points {}",
                      mismatches, oracle_misses, special ? "exact" : "wrong")};
}

Outcome split_identities() {
  std::mt19937_64 rng(7);
  int checked = 0, failures = 0, with_gamma = 0;
  while (checked < 500) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const PTuple pt = PTuple::from_full_point(random_full_point(n, rng));
    const int s = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n + 1));
    const int t = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n + 1));
    if (s == t) continue;
    const SplitPlan plan = select_split(pt, s, t);
    if (plan.kind == SplitKind::DoublePrime) continue;
    ++checked;
    Rational sum = pt.r(s);
    for (int k : plan.j0) sum += pt.r(k);
    bool ok = plan.inv_q0 && sum + *plan.inv_q0 == R(1, 2);
    if (plan.gamma) {
      ++with_gamma;
      // gamma q0 = p_alpha, written with reciprocals.
      ok = ok && plan.alpha && *plan.gamma * pt.r(*plan.alpha) == *plan.inv_q0;
    }
    if (!ok) ++failures;
  }
  return {failures == 0, fmt::format("500 admissible tuples ({} with a split slot), {} failures", with_gamma, failures)};
}

Outcome hierarchy() {
  std::mt19937_64 rng(8);
  int tuples = 0, failures = 0;
  for (int n = 2; n <= 5; ++n) {
    for (int trial = 0; trial < 250; ++trial, ++tuples) {
      const PTuple pt = PTuple::from_full_point(random_full_point(n, rng));
      const int m = n + 1;
      const Rational top = lambda_prime(pt);
      for (int s = 1; s <= m; ++s)
        for (int t = 1; t <= m; ++t) {
          if (s == t) continue;
          if (m > 2) {
            for (int tau = 1; tau <= m; ++tau) {
              if (tau == s || tau == t) continue;
              // Only the largest remaining slot is a valid tau for the bound.
              if (tau == largest_remaining(pt, s, t) && lambda_st_prime(pt, s, t, tau) > top) ++failures;
            }
          }
          if (pt.r(s) >= R(1, 2) && lambda_st_dprime(pt, s, t) > pt.r(s)) ++failures;
        }
    }
  }
  return {failures == 0, fmt::format("{} tuples, all ordered pairs, {} violations", tuples, failures)};
}

Outcome hardy_ratio() {
  const GridSpec grid{1, 2048, 32.0};
  const LPPair pair = make_lp_pair({-4, 4});
  double lo = 1e300, hi = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const SampledField f = random_band_field(grid, 0.25, 8.0, SplitMix64(9, i));
    const double ratio = lp_norm(square_function(f, pair), LpIndex(2.0)) / lp_norm(f, LpIndex(2.0));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return {lo >= 0.70 && hi <= 1.01, fmt::format("50 fields, ratios in [{:.4f}, {:.4f}]", lo, hi)};
}

Outcome growth() {
  const auto maximal = run("growth");
  const double exponent = number(maximal.report, "fitted_exponent");
  const auto square = run("growth", {{"growth.operator", "square"}});
  const double spread = number(square.report, "max_over_baseline");
  const bool pass = exponent >= 0.35 && exponent <= 0.65 && spread <= 3.0;
  return {pass, fmt::format("maximal exponent {:.4f}; square max/baseline {:.4f}", exponent, spread)};
}

Outcome max_infinity() {
  GrowthExperiment e;
  e.kind = GrowthOperator::ShiftedMaximal;
  e.p = LpIndex::infinity();
  e.grid = {1, std::size_t{1} << 20, 131072.0};
  e.scales = {-2, 4};
  for (int j = 4; j <= 14; ++j) e.shifts.push_back(std::ldexp(1.0, j));
  const GrowthReport r = run_growth(e);
  double worst = 0.0;
  for (const auto& p : r.proxies) worst = std::max(worst, std::abs(p.value - 1.0));
  return {worst < 1e-10 && r.warnings.empty(), fmt::format("11 shifts, max |ratio - 1| {:.3g}", worst)};
}

Outcome peetre() {
  const auto out = run("peetre");
  const auto v = [&](const std::string& k) { return number(out.report, "sigma_2." + k); };
  const bool pass = out.status == 0;
  return {pass, fmt::format("sigma = 2: cube ratio {:.4f} -> {:.4f}, Fefferman-Stein {:.4f} -> {:.4f}",
                            v("cube_ratio"), v("cube_ratio_refined"), v("fefferman_stein"),
                            v("fefferman_stein_refined"))};
}

Outcome d_lambda_checks() {
  const auto bump = [](double center, double radius, double translation, cplx weight) {
    return BandLimitedFunction(
        1, {SpectralAtom{RadialProfile::lowpass(radius / 2.0, radius), {center, 0.0}, {translation, 0.0}, weight}});
  };
  const TensorKernel k(1, {{bump(0.6, 0.3, 0.5, 1.0), bump(-0.8, 0.25, -1.25, cplx(0.3, 0.7))}});
  const SampledKernel s(k, k.default_lattice(0.25, 256));
  const double h = s.lattice().spacing;
  // Brute ||K||_1 over the product lattice.
  const auto& w0 = s.window(0, 0).values();
  const auto& w1 = s.window(0, 1).values();
  double l1 = 0.0;
  for (const cplx& a : w0)
    for (const cplx& b : w1) l1 += std::abs(a * b);
  l1 *= h * h;
  const DLambdaResult d0 = d_lambda(s, 0.0);
  const double d0_error = std::abs(d0.value - l1) / l1;

  bool monotone = d0.exact;
  double previous = 0.0;
  for (double lambda : {0.0, 0.25, 0.5, 1.0, 2.0}) {
    const double v = d_lambda(s, lambda).value;
    monotone = monotone && v >= previous;
    previous = v;
  }
  double transpose_error = 0.0;
  for (int j = 1; j <= 2; ++j) {
    transpose_error = std::max(transpose_error, std::abs(d_lambda(transpose_kernel(s, j), 0.0).value - d0.value) / d0.value);
  }
  return {d0.exact && d0_error < 1e-8 && monotone && transpose_error < 1e-6,
          fmt::format("D0 vs ||K||_1 {:.3g}, monotone {}, transpose D0 error {:.3g}", d0_error, monotone,
                      transpose_error)};
}

Outcome plan() {
  const InterpolationPlan p = interpolation_plan(PTuple({R(1, 3), R(1, 3), R(1, 3)}));
  if (!p.reachable || p.steps.size() != 2) return {false, "plan is not a two-step schedule"};
  // Fold the steps by hand.
  std::vector<Rational> point = p.steps.front().from;
  Rational e = p.steps.front().from_exponent;
  for (const auto& step : p.steps) {
    for (std::size_t i = 0; i < point.size(); ++i) point[i] = (1 - step.theta) * point[i] + step.theta * step.vertex[i];
    e = (1 - step.theta) * e + step.theta * step.vertex_exponent;
  }
  const bool pass = p.steps[0].theta == R(1, 2) && p.steps[1].theta == R(1, 3) && p.final_exponent == R(1) &&
                    point == p.target && e == R(1);
  return {pass, fmt::format("theta = ({}, {}), final exponent {}, folded point {}", to_string(p.steps[0].theta),
                            to_string(p.steps[1].theta), to_string(p.final_exponent),
                            point == p.target ? "matches" : "differs")};
}

Outcome ratio_fit() {
  std::string detail;
  bool pass = true;
  for (const auto& offset : {R(0), R(-1, 4)}) {
    std::vector<std::pair<double, double>> pairs;
    double predicted = 0.0;
    for (int count : {1, 2, 3}) {
      CxConfig cfg = CxConfig::separation_mode(count);
      cfg.exponents = {"4", "4", "4"};
      cfg.lambda = boost::rational_cast<double>(sharp_lambda(cfg.p_tuple()) + offset);
      if (cfg.grid->samples > (std::size_t{1} << 22)) return {false, "grid above 2^22"};
      const CxReport r = run_counterexample(cfg);
      pairs.emplace_back(static_cast<double>(count), r.ratio);
      predicted = predicted_ratio_slope(cfg);
    }
    const double slope = ratio_growth_fit(pairs).exponent;
    const bool ok = offset == R(0) ? std::abs(slope) <= 0.3 : (slope >= -0.05 && slope <= 0.55);
    pass = pass && ok;
    detail += fmt::format("{}lambda {} slope {:.4f} (predicted {:.2f})", detail.empty() ? "" : "; ",
                          offset == R(0) ? "sharp" : "sharp - 1/4", slope, predicted);
  }
  return {pass, detail};
}

Outcome determinism() {
  const std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> runs{
      {"partition", {}},
      {"changevars", {{"changevars.configs", "20"}}},
      {"peetre", {}},
      {"lambda", {{"lambda.p", "3 4 6 inf"}}},
      {"plan", {}},
      {"counterexample", {{"counterexample.counts", "2 3 4"}}},
      {"growth",
       {{"grid.samples", "16384"}, {"grid.period", "4096"}, {"scales.max", "12"}, {"growth.shifts", "16 32 64 128"},
        {"run.seed", "42"}}}};
  int identical = 0;
  std::string differing;
  for (const auto& [command, overrides] : runs) {
    const auto a = run(command, overrides);
    const auto b = run(command, overrides);
    const bool same = a.report.text() == b.report.text() && a.csv.has_value() == b.csv.has_value() &&
                      (!a.csv || a.csv->text() == b.csv->text());
    if (same) {
      ++identical;
    } else {
      differing += " " + command;
    }
  }
  return {identical == static_cast<int>(runs.size()),
          fmt::format("{}/{} commands byte-identical{}", identical, runs.size(),
                      differing.empty() ? "" : "; differing:" + differing)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "partition of unity", 1.0, partition},
      {2, "change of variables", 30.0, change_of_variables},
      {3, "shift identity", 0.0, shift_identity},
      {4, "counterexample cancellation", 0.0, cancellation},
      {5, "counterexample identity", 60.0, identity},
      {6, "exponent oracle", 5.0, exponent_oracle},
      {7, "split plan identities", 0.0, split_identities},
      {8, "lambda hierarchy", 0.0, hierarchy},
      {9, "square-function L2 ratio", 0.0, hardy_ratio},
      {10, "shifted growth fits", 300.0, growth},
      {11, "shifted maximal at p = inf", 0.0, max_infinity},
      {12, "Peetre and Fefferman-Stein stability", 0.0, peetre},
      {13, "D_lambda", 0.0, d_lambda_checks},
      {14, "interpolation plan", 0.0, plan},
      {15, "counterexample ratio fit", 600.0, ratio_fit},
      {16, "determinism", 0.0, determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0.0 && seconds >= c.time_limit) {
      o.pass = false;
      o.detail += fmt::format("; over the {} s limit", c.time_limit);
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), o.detail.c_str(),
                seconds);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
