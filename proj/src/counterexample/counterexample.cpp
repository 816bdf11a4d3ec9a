#include "shiftlog/counterexample.hpp"

#include <algorithm>
#include <cmath>

#include <boost/rational.hpp>
#include <fmt/format.h>

namespace shiftlog {

namespace {

double as_double(const Rational& r) { return boost::rational_cast<double>(r); }

double pow2(int e) { return std::ldexp(1.0, e); }

CxConstraint make(std::string name, bool pass, std::string detail, bool blocking = true) {
  return CxConstraint{std::move(name), pass, blocking, std::move(detail)};
}

void require_valid(const CxConfig& cfg) {
  std::vector<CxConstraint> bad;
  for (auto& c : validate_config(cfg))
    if (c.blocking && !c.pass) bad.push_back(std::move(c));
  if (!bad.empty()) throw CxValidationError(std::move(bad));
}

const GridSpec& require_grid(const CxConfig& cfg, const char* what) {
  if (!cfg.grid) throw std::invalid_argument(fmt::format("{} needs a grid", what));
  return *cfg.grid;
}

double input_scale(const CxConfig& cfg, int slot) {
  return cfg.input_scales.empty() ? 1.0 : cfg.input_scales.at(static_cast<std::size_t>(slot - 1));
}

}  // namespace

PTuple CxConfig::p_tuple() const {
  if (exponents.empty()) {
    return PTuple(std::vector<Rational>(static_cast<std::size_t>(n), Rational(1, n + 1)));
  }
  if (static_cast<int>(exponents.size()) != n) {
    throw std::invalid_argument(fmt::format("counterexample: {} exponents given for n = {}", exponents.size(), n));
  }
  return PTuple::from_exponents(exponents);
}

double CxConfig::weight_exponent() const { return lambda ? *lambda : as_double(sharp_lambda(p_tuple())); }

DyadicRange CxConfig::range() const {
  if (zeta.empty()) throw std::invalid_argument("counterexample: empty schedule");
  return {zeta.front() - 1, zeta.back() + 1};
}

std::vector<int> CxConfig::linear_schedule(int count, int step, int offset) {
  if (count < 1) throw std::invalid_argument("schedule needs N >= 1");
  std::vector<int> out;
  for (int k = 1; k <= count; ++k) out.push_back(offset + step * k);
  return out;
}

CxConfig CxConfig::identity_mode(int count) {
  CxConfig cfg;
  cfg.zeta = linear_schedule(count, 1, 4);
  cfg.eta_radius = 0.125;
  cfg.grid = GridSpec{1, std::size_t{1} << 18, 64.0};
  return cfg;
}

CxConfig CxConfig::separation_mode(int count) {
  CxConfig cfg;
  cfg.zeta = linear_schedule(count, 4);
  cfg.eta_radius = 0.25;
  cfg.grid = GridSpec{1, std::size_t{1} << 22, 500.0};
  cfg.exponents = {"4", "4", "4"};
  return cfg;
}

CxConfig CxConfig::reference_geometry(int count) {
  CxConfig cfg;
  cfg.zeta = linear_schedule(count, 10);
  cfg.eta_radius = 1.0 / 100.0;
  return cfg;
}

bool constraints_hold(const std::vector<CxConstraint>& constraints) {
  return std::all_of(constraints.begin(), constraints.end(), [](const CxConstraint& c) { return !c.blocking || c.pass; });
}

CxValidationError::CxValidationError(std::vector<CxConstraint> violations)
    : std::invalid_argument([&] {
        std::string msg = "counterexample configuration violates:";
        for (const auto& v : violations) msg += fmt::format(" [{}: {}]", v.name, v.detail);
        return msg;
      }()),
      violations_(std::move(violations)) {}

std::vector<CxConstraint> validate_config(const CxConfig& cfg) {
  std::vector<CxConstraint> out;
  const bool slots_ok = cfg.n >= 2 && cfg.s >= 1 && cfg.s < cfg.t && cfg.t <= cfg.n;
  out.push_back(make("slots", slots_ok, fmt::format("n = {}, s = {}, t = {}", cfg.n, cfg.s, cfg.t)));
  const bool nonempty = !cfg.zeta.empty();
  out.push_back(make("schedule_nonempty", nonempty, fmt::format("N = {}", cfg.zeta.size())));
  const double rho = cfg.eta_radius;
  out.push_back(make("eta_radius", rho > 0.0 && std::isfinite(rho), fmt::format("rho = {}", rho)));
  bool profiles_ok = true;
  std::string profile_detail = "beta annuli nested";
  try {
    make_counterexample_profiles(rho > 0.0 ? rho : 1.0, cfg.beta_plateau, cfg.beta_support);
  } catch (const std::invalid_argument& e) {
    profiles_ok = false;
    profile_detail = e.what();
  }
  out.push_back(make("beta_annuli", profiles_ok, profile_detail));
  if (!nonempty || !(rho > 0.0) || !profiles_ok) return out;

  const auto& z = cfg.zeta;
  bool increasing = true;
  for (std::size_t k = 1; k < z.size(); ++k) increasing = increasing && z[k] > z[k - 1];
  out.push_back(make("schedule_increasing", increasing, fmt::format("zeta = [{}]", fmt::join(z, ", "))));

  // Shifted eta supports |xi - 2^zeta_k| <= rho are closed balls; disjoint iff
  // the centres are more than 2 rho apart.
  double closest = INFINITY;
  for (std::size_t a = 0; a < z.size(); ++a)
    for (std::size_t b = a + 1; b < z.size(); ++b) closest = std::min(closest, std::abs(pow2(z[b]) - pow2(z[a])));
  out.push_back(make("eta_supports_disjoint", closest > 2.0 * rho,
                     z.size() < 2 ? "single packet"
                                  : fmt::format("closest centres {} apart, need > {}", closest, 2.0 * rho)));

  const double lowest = pow2(*std::min_element(z.begin(), z.end())) - rho;
  out.push_back(make("spectra_away_from_origin", lowest > 0.0, fmt::format("lowest packet frequency {}", lowest)));

  // Each packet sits on the plateau of its own dilate of beta_hat.
  bool plateau = true;
  std::string plateau_detail = "every packet on its plateau";
  for (int zk : z) {
    const double c = pow2(zk);
    if (!(c - rho >= c * cfg.beta_plateau.inner && c + rho <= c * cfg.beta_plateau.outer)) {
      plateau = false;
      plateau_detail = fmt::format("packet [{}, {}] leaves plateau [{}, {}] at zeta = {}", c - rho, c + rho,
                                   c * cfg.beta_plateau.inner, c * cfg.beta_plateau.outer, zk);
      break;
    }
  }
  out.push_back(make("eta_inside_beta_plateau", plateau, plateau_detail));

  // ... and misses the open support of every other dilate in the range.
  const DyadicRange range = cfg.range();
  bool missed = true;
  std::string missed_detail = fmt::format("scales [{}, {}]", range.min, range.max);
  for (int zk : z) {
    const double lo = pow2(zk) - rho, hi = pow2(zk) + rho;
    for (int l = range.min; l <= range.max && missed; ++l) {
      if (l == zk) continue;
      const double a = pow2(l) * cfg.beta_support.inner, b = pow2(l) * cfg.beta_support.outer;
      if (!(hi <= a || lo >= b)) {
        missed = false;
        missed_detail = fmt::format("packet at zeta = {} meets the beta support at scale {}", zk, l);
      }
    }
  }
  out.push_back(make("eta_outside_other_scales", missed, missed_detail));

  // Scales outside the range miss every packet.
  const double f_lo = pow2(z.front()) - rho, f_hi = pow2(z.back()) + rho;
  const bool covered = pow2(range.max + 1) * cfg.beta_support.inner >= f_hi &&
                       pow2(range.min - 1) * cfg.beta_support.outer <= f_lo;
  out.push_back(make("range_complete", covered, "scales outside the range vanish on the packets"));

  if (cfg.n >= 3) {
    // eta_hat(2^-l xi) = 1 on supp beta_hat for every l = zeta_k.
    const double need = cfg.beta_support.outer;
    const double have = pow2(z.front()) * rho / 2.0;
    out.push_back(make("eta_plateau_covers_beta", have >= need,
                       fmt::format("2^zeta_1 rho / 2 = {}, need >= {}", have, need)));
  }

  if (cfg.grid) {
    const GridSpec& g = *cfg.grid;
    bool grid_ok = true;
    std::string grid_detail = fmt::format("M = {}, L = {}", g.samples, g.period);
    try {
      g.validate();
    } catch (const std::invalid_argument& e) {
      grid_ok = false;
      grid_detail = e.what();
    }
    out.push_back(make("grid", grid_ok && g.dimension == 1, grid_detail));
    if (grid_ok) {
      const double top = std::max(f_hi, cfg.beta_support.outer);
      out.push_back(make("below_nyquist", top < g.nyquist(),
                         fmt::format("highest frequency {} against Nyquist {}", top, g.nyquist())));
      const double width = 2.0 / rho;
      double gap = INFINITY;
      for (std::size_t a = 0; a < z.size(); ++a)
        for (std::size_t b = a + 1; b < z.size(); ++b)
          gap = std::min(gap, std::abs(pow2(z.back() - z[a]) - pow2(z.back() - z[b])));
      out.push_back(make("physical_separation", gap >= width,
                         gap >= width ? fmt::format("bumps {} apart", gap)
                                      : fmt::format("overlapping: bumps {} apart, width {}", gap, width),
                         false));
      const double span = pow2(z.back() - z.front()) - 1.0;
      out.push_back(make("period_fit", span + 2.0 * width <= g.period,
                         fmt::format("train span {} plus margin {} against period {}", span, 2.0 * width, g.period),
                         false));
    }
  }
  return out;
}

CxFunctions build_functions(const CxConfig& cfg) {
  require_valid(cfg);
  const CounterexampleProfiles prof = make_counterexample_profiles(cfg.eta_radius, cfg.beta_plateau, cfg.beta_support);
  const int last = cfg.zeta.back();
  BandLimitedFunction train(1);
  for (int zk : cfg.zeta) train.add(SpectralAtom{prof.eta_hat, {pow2(zk), 0.0}, {-pow2(last - zk), 0.0}, 1.0});
  CxFunctions out{{}, BandLimitedFunction::from_profile(1, prof.eta_hat),
                  BandLimitedFunction::from_profile(1, prof.beta_hat)};
  for (int k = 1; k <= cfg.n; ++k) {
    const BandLimitedFunction f = k == cfg.s ? train : k == cfg.t ? train.conjugated() : out.beta;
    out.inputs.push_back(f.scaled(input_scale(cfg, k)));
  }
  return out;
}

std::vector<SampledField> build_inputs(const CxConfig& cfg) {
  const GridSpec& grid = require_grid(cfg, "build_inputs");
  const CxFunctions fns = build_functions(cfg);
  std::vector<SampledField> out;
  for (const auto& f : fns.inputs) out.push_back(f.sample(grid));
  return out;
}

TensorKernel build_kernel(const CxConfig& cfg) {
  const CxFunctions fns = build_functions(cfg);
  const double shift = pow2(cfg.zeta.back());
  TensorKernel::Term term;
  for (int k = 1; k <= cfg.n; ++k) term.push_back(k == cfg.s || k == cfg.t ? fns.beta.translated({shift, 0.0}) : fns.eta);
  return TensorKernel(1, {std::move(term)});
}

OrthogonalityResult orthogonality_check(const CxConfig& cfg) {
  const GridSpec& grid = require_grid(cfg, "orthogonality_check");
  require_valid(cfg);
  const CounterexampleProfiles prof = make_counterexample_profiles(cfg.eta_radius, cfg.beta_plateau, cfg.beta_support);
  const DyadicRange range = cfg.range();
  OrthogonalityResult out;
  for (int zk : cfg.zeta) {
    const double c = pow2(zk);
    const long first = static_cast<long>(std::floor((c - cfg.eta_radius) * grid.period));
    const long last = static_cast<long>(std::ceil((c + cfg.eta_radius) * grid.period));
    for (int l = range.min; l <= range.max; ++l) {
      for (long i = first; i <= last; ++i) {
        const double xi = static_cast<double>(i) / grid.period;
        const double packet = prof.eta_hat(std::abs(xi - c));
        const double product = prof.beta_hat(std::abs(std::ldexp(xi, -l))) * packet;
        const double expected = l == zk ? packet : 0.0;
        const double v = std::abs(product - expected);
        out.max_violation = std::max(out.max_violation, v);
        if (l != zk) out.off_scale_max = std::max(out.off_scale_max, std::abs(product));
      }
    }
  }
  return out;
}

CxReport run_counterexample(const CxConfig& cfg) {
  const GridSpec& grid = require_grid(cfg, "run_counterexample");
  CxReport report;
  report.constraints = validate_config(cfg);
  if (!constraints_hold(report.constraints)) require_valid(cfg);
  report.count = cfg.count();
  report.lambda = cfg.weight_exponent();
  const PTuple pt = cfg.p_tuple();

  const CxFunctions fns = build_functions(cfg);
  const TensorKernel kernel = build_kernel(cfg);
  std::vector<SampledField> inputs;
  for (const auto& f : fns.inputs) inputs.push_back(f.sample(grid));
  report.orthogonality = orthogonality_check(cfg);

  const SampledField t = apply_T(kernel, inputs, cfg.range());
  {
    const SampledField eta = fns.eta.sample(grid);
    const SampledField beta = fns.beta.sample(grid);
    double scale = static_cast<double>(cfg.count());
    for (int k = 1; k <= cfg.n; ++k) scale *= input_scale(cfg, k);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      cplx closed = scale * eta[i] * eta[i];
      for (int j = 0; j < cfg.n - 2; ++j) closed *= beta[i];
      num += std::norm(t[i] - closed);
      den += std::norm(closed);
    }
    if (!(den > 0.0)) throw std::invalid_argument("run_counterexample: closed form vanishes identically");
    report.identity_error = std::sqrt(num / den);
  }

  Rational total = 0;
  double product = 1.0;
  for (int k = 1; k <= cfg.n; ++k) {
    const Rational r = pt.r(k);
    total += r;
    const LpIndex p = r == Rational(0) ? LpIndex::infinity() : LpIndex(as_double(1 / r));
    report.input_norms.push_back(lp_norm(inputs[static_cast<std::size_t>(k - 1)], p));
    product *= report.input_norms.back();
  }
  const LpIndex out_index = total == Rational(0) ? LpIndex::infinity() : LpIndex(as_double(1 / total));
  report.output_norm = lp_norm(t, out_index);

  const SampledKernel sampled(kernel, kernel.default_lattice(cfg.kernel_spacing, cfg.kernel_samples));
  report.d_lambda = d_lambda(sampled, report.lambda);
  report.ratio = report.output_norm / (report.d_lambda.value * product);
  return report;
}

double predicted_ratio_slope(const CxConfig& cfg) {
  const PTuple pt = cfg.p_tuple();
  return 1.0 - as_double(pt.r(cfg.s)) - as_double(pt.r(cfg.t)) - cfg.weight_exponent();
}

FitResult ratio_growth_fit(std::span<const std::pair<double, double>> count_ratio) {
  std::vector<double> ns;
  for (const auto& [n, r] : count_ratio) {
    if (!(n >= 1.0)) throw std::invalid_argument(fmt::format("ratio fit: N = {} must be >= 1", n));
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument(fmt::format("ratio fit: ratio {} not positive", r));
    if (std::find(ns.begin(), ns.end(), n) == ns.end()) ns.push_back(n);
  }
  if (ns.size() < 3) throw std::invalid_argument("ratio fit needs at least three distinct N");
  const double k = static_cast<double>(count_ratio.size());
  double mx = 0.0, mv = 0.0;
  for (const auto& [n, r] : count_ratio) {
    mx += std::log(n);
    mv += std::log(r);
  }
  mx /= k;
  mv /= k;
  double sxx = 0.0, sxv = 0.0;
  for (const auto& [n, r] : count_ratio) {
    sxx += (std::log(n) - mx) * (std::log(n) - mx);
    sxv += (std::log(n) - mx) * (std::log(r) - mv);
  }
  FitResult out;
  out.exponent = sxv / sxx;
  out.intercept = mv - out.exponent * mx;
  double ss = 0.0;
  for (const auto& [n, r] : count_ratio) {
    const double e = std::log(r) - out.intercept - out.exponent * std::log(n);
    ss += e * e;
  }
  out.residual = std::sqrt(ss / k);
  out.ratios.assign(count_ratio.begin(), count_ratio.end());
  return out;
}

}  // namespace shiftlog
