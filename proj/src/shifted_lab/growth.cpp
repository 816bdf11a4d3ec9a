#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "shiftlog/rng.hpp"
#include "shiftlog/shifted_lab.hpp"

namespace shiftlog {

namespace {

ProxyResult proxy_from(GrowthOperator kind, LpIndex p, double y, std::span<const SampledField> bank,
                       const LPPair& pair, std::span<const double> denominators) {
  ProxyResult out;
  bool any = false;
  for (std::size_t i = 0; i < bank.size(); ++i) {
    if (!(denominators[i] > 0.0)) {
      out.skipped.push_back(i);
      continue;
    }
    const double r = lp_norm(shifted_operator(kind, bank[i], pair, y), p) / denominators[i];
    if (!any || r > out.value) {
      out.value = r;
      out.worst = i;
      any = true;
    }
  }
  if (!any) throw std::invalid_argument("operator_norm_proxy: every bank element has a zero unshifted norm");
  return out;
}

std::vector<double> unshifted_norms(GrowthOperator kind, LpIndex p, std::span<const SampledField> bank,
                                    const LPPair& pair) {
  std::vector<double> out;
  out.reserve(bank.size());
  for (const auto& f : bank) out.push_back(lp_norm(shifted_operator(kind, f, pair, 0.0), p));
  return out;
}

bool is_grid_multiple(double value, double spacing) {
  const double q = value / spacing;
  return q == std::nearbyint(q);
}

}  // namespace

SampledField random_band_field(const GridSpec& grid, double inner, double outer, SplitMix64 rng) {
  std::normal_distribution<double> gauss;
  ComplexBuffer coeffs(grid.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const double r = grid.frequency_radius(i);
    if (r >= inner && r <= outer) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      coeffs[i] = {re, im};
    }
  }
  return inverse(Spectrum(grid, std::move(coeffs), SupportCertificate{inner, outer}));
}

std::string to_string(GrowthOperator kind) {
  return kind == GrowthOperator::ShiftedSquare ? "square" : "maximal";
}

GrowthOperator parse_growth_operator(const std::string& text) {
  if (text == "square") return GrowthOperator::ShiftedSquare;
  if (text == "maximal" || text == "max") return GrowthOperator::ShiftedMaximal;
  throw std::invalid_argument("unknown operator '" + text + "' (expected square or maximal)");
}

TestBank make_bank(const GridSpec& grid, const BankSpec& spec) {
  grid.validate();
  if (!(spec.band_inner >= 0.0 && spec.band_inner < spec.band_outer)) {
    throw std::invalid_argument(fmt::format("bank band [{}, {}] is empty", spec.band_inner, spec.band_outer));
  }
  if (!(spec.bump_radius > 0.0) || spec.bump_center - spec.bump_radius < 0.0) {
    throw std::invalid_argument("bank bump needs radius > 0 and center >= radius");
  }
  TestBank bank;
  const RadialProfile bump_profile = make_lowpass(spec.bump_radius / 2.0, spec.bump_radius);
  BandLimitedFunction bump(grid.dimension, {SpectralAtom{bump_profile, {spec.bump_center, 0.0}, {}, 1.0}});
  bank.fields.push_back(bump.sample(grid));
  bank.labels.push_back("bump");

  if (spec.train_length > 0) {
    BandLimitedFunction train(grid.dimension);
    for (int j = 0; j < spec.train_length; ++j) {
      train.add(SpectralAtom{bump_profile, {spec.bump_center, 0.0}, {std::ldexp(1.0, j) / spec.bump_radius, 0.0}, 1.0});
    }
    bank.fields.push_back(train.sample(grid));
    bank.labels.push_back("train");
  }

  for (std::size_t i = 0; i < spec.random_fields; ++i) {
    require_below_nyquist(grid, spec.band_outer, "bank random field");
    bank.fields.push_back(random_band_field(grid, spec.band_inner, spec.band_outer, SplitMix64(spec.seed, i)));
    bank.labels.push_back(fmt::format("random{}", i));
  }
  return bank;
}

SampledField shifted_operator(GrowthOperator kind, const SampledField& f, const LPPair& pair, double y) {
  const std::array<double, 2> shift{y, 0.0};
  return kind == GrowthOperator::ShiftedSquare ? square_function(f, pair, shift) : maximal_function(f, pair, shift);
}

ProxyResult operator_norm_proxy(GrowthOperator kind, LpIndex p, double y, std::span<const SampledField> bank,
                                const LPPair& pair) {
  if (bank.empty()) throw std::invalid_argument("operator_norm_proxy: empty bank");
  const auto den = unshifted_norms(kind, p, bank, pair);
  return proxy_from(kind, p, y, bank, pair, den);
}

FitResult fit_log_exponent(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 4) throw std::invalid_argument(fmt::format("fit needs >= 4 points, got {}", pairs.size()));
  double lo = std::abs(pairs.front().first);
  double hi = lo;
  for (const auto& [y, r] : pairs) {
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument(fmt::format("fit: ratio {} is not positive", r));
    lo = std::min(lo, std::abs(y));
    hi = std::max(hi, std::abs(y));
  }
  if (!(lo > 0.0) || hi < 8.0 * lo) {
    throw std::invalid_argument(fmt::format("fit: shifts span [{}, {}], need at least three octaves", lo, hi));
  }
  std::vector<double> xs, vs;
  for (const auto& [y, r] : pairs) {
    xs.push_back(std::log(std::log(std::numbers::e + std::abs(y))));
    vs.push_back(std::log(r));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, mv = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    mv += vs[i];
  }
  mx /= n;
  mv /= n;
  double sxx = 0.0, sxv = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxv += (xs[i] - mx) * (vs[i] - mv);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit: degenerate abscissas");
  FitResult out;
  out.exponent = sxv / sxx;
  out.intercept = mv - out.exponent * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = vs[i] - (out.intercept + out.exponent * xs[i]);
    ss += e * e;
  }
  out.residual = std::sqrt(ss / n);
  out.ratios.assign(pairs.begin(), pairs.end());
  return out;
}

void GrowthExperiment::validate() const {
  grid.validate();
  if (shifts.size() < 4) throw std::invalid_argument("growth experiment needs at least four shifts");
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    if (!(shifts[i] > 0.0)) throw std::invalid_argument("shift ladder entries must be positive");
    if (i > 0 && !(shifts[i] > shifts[i - 1])) throw std::invalid_argument("shift ladder must be strictly increasing");
  }
  if (scales.min >= scales.max) throw std::invalid_argument("scale range needs min < max");
  const LPPair pair = make_lp_pair(scales);
  const auto covered = pair.covered_band();
  auto inside = [&](double a, double b) { return a >= covered[0] && b <= covered[1]; };
  if (!inside(bank.bump_center - bank.bump_radius, bank.bump_center + bank.bump_radius)) {
    throw std::invalid_argument(fmt::format("bump band [{}, {}] leaves the covered octaves [{}, {}]",
                                            bank.bump_center - bank.bump_radius,
                                            bank.bump_center + bank.bump_radius, covered[0], covered[1]));
  }
  if (bank.random_fields > 0 && !inside(bank.band_inner, bank.band_outer)) {
    throw std::invalid_argument(fmt::format("random band [{}, {}] leaves the covered octaves [{}, {}]",
                                            bank.band_inner, bank.band_outer, covered[0], covered[1]));
  }
  const double reach = std::ldexp(shifts.back(), -scales.min);
  const double margin = 4.0 / bank.bump_radius;
  if (reach + margin > grid.period) {
    throw std::invalid_argument(fmt::format(
        "largest shift moves the coarsest piece by {} which with a margin of {} exceeds the period {}", reach, margin,
        grid.period));
  }
}

double predicted_growth_exponent(GrowthOperator kind, LpIndex p) {
  return kind == GrowthOperator::ShiftedSquare ? std::abs(0.5 - p.reciprocal()) : p.reciprocal();
}

GrowthReport run_growth(const GrowthExperiment& experiment) {
  experiment.validate();
  const LPPair pair = make_lp_pair(experiment.scales);
  const TestBank bank = make_bank(experiment.grid, experiment.bank);
  GrowthReport report;
  if (experiment.p.is_infinite()) {
    const double h = experiment.grid.spacing();
    for (double y : experiment.shifts)
      for (int l = experiment.scales.min; l <= experiment.scales.max; ++l) {
        if (!is_grid_multiple(std::ldexp(y, -l), h)) {
          report.warnings.push_back(fmt::format(
              "shift {} at scale {} is not a whole number of grid cells; the discrete sup is approximate", y, l));
          break;
        }
      }
  }
  const auto den = unshifted_norms(experiment.kind, experiment.p, bank.fields, pair);
  for (std::size_t i = 0; i < den.size(); ++i) {
    if (!(den[i] > 0.0)) report.warnings.push_back("bank element " + bank.labels[i] + " has zero norm; skipped");
  }
  std::vector<std::pair<double, double>> pairs;
  for (double y : experiment.shifts) {
    report.proxies.push_back(proxy_from(experiment.kind, experiment.p, y, bank.fields, pair, den));
    pairs.emplace_back(y, report.proxies.back().value);
  }
  report.fit = fit_log_exponent(pairs);
  report.predicted = predicted_growth_exponent(experiment.kind, experiment.p);
  report.gap = report.fit.exponent - report.predicted;
  report.pass = std::abs(report.gap) <= experiment.tolerance;
  return report;
}

}  // namespace shiftlog
