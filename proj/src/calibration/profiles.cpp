#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "shiftlog/calibration.hpp"

namespace shiftlog {

namespace {

double ramp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double lowpass_value(double r, double plateau, double support) {
  if (r <= plateau) return 1.0;
  if (r >= support) return 0.0;
  return smooth_step((support - r) / (support - plateau));
}

}  // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = ramp(t);
  const double b = ramp(1.0 - t);
  return a / (a + b);
}

RadialProfile RadialProfile::lowpass(double plateau, double support) {
  if (!(plateau > 0.0) || !(plateau < support) || !std::isfinite(support)) {
    throw std::invalid_argument(
        fmt::format("lowpass profile needs 0 < plateau < support, got plateau={} support={}", plateau, support));
  }
  RadialProfile p;
  p.kind_ = ProfileKind::LowPass;
  p.plateau_ = plateau;
  p.support_ = support;
  return p;
}

RadialProfile RadialProfile::annular(double hole, double inner_plateau, double outer_plateau, double support) {
  if (!(hole > 0.0) || !(hole < inner_plateau) || !(inner_plateau <= outer_plateau) || !(outer_plateau < support) ||
      !std::isfinite(support)) {
    throw std::invalid_argument(fmt::format(
        "annular profile needs 0 < hole < inner_plateau <= outer_plateau < support, got {} {} {} {}", hole,
        inner_plateau, outer_plateau, support));
  }
  RadialProfile p;
  p.kind_ = ProfileKind::Annular;
  p.hole_ = hole;
  p.inner_plateau_ = inner_plateau;
  p.plateau_ = outer_plateau;
  p.support_ = support;
  return p;
}

double RadialProfile::operator()(double radius) const {
  const double outer = lowpass_value(radius, plateau_, support_);
  if (kind_ == ProfileKind::LowPass) return outer;
  return outer - lowpass_value(radius, hole_, inner_plateau_);
}

double RadialProfile::at(std::span<const double> xi) const {
  double s = 0.0;
  for (double v : xi) s += v * v;
  return (*this)(std::sqrt(s));
}

SupportCertificate RadialProfile::certificate() const { return {hole_radius(), support_}; }

std::string RadialProfile::to_record() const {
  if (kind_ == ProfileKind::LowPass) {
    return fmt::format("kind=lowpass plateau={:.17g} support={:.17g} bridge=exp_inverse", plateau_, support_);
  }
  return fmt::format(
      "kind=annular hole={:.17g} inner_plateau={:.17g} outer_plateau={:.17g} support={:.17g} bridge=exp_inverse",
      hole_, inner_plateau_, plateau_, support_);
}

RadialProfile RadialProfile::from_record(const std::string& record) {
  std::map<std::string, std::string> kv;
  std::istringstream in(record);
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("malformed profile record token '" + token + "'");
    kv[token.substr(0, eq)] = token.substr(eq + 1);
  }
  auto number = [&](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument(fmt::format("profile record lacks '{}'", key));
    return std::stod(it->second);
  };
  if (kv["bridge"] != "exp_inverse") throw std::invalid_argument("unknown profile bridge '" + kv["bridge"] + "'");
  if (kv["kind"] == "lowpass") return lowpass(number("plateau"), number("support"));
  if (kv["kind"] == "annular") {
    return annular(number("hole"), number("inner_plateau"), number("outer_plateau"), number("support"));
  }
  throw std::invalid_argument("unknown profile kind '" + kv["kind"] + "'");
}

RadialProfile make_lowpass(double plateau, double support) { return RadialProfile::lowpass(plateau, support); }

double LPPair::partition_sum(double radius) const {
  double sum = 0.0;
  for (int l = scales.min; l <= scales.max; ++l) sum += psi(std::ldexp(radius, -l));
  return sum;
}

std::array<double, 2> LPPair::covered_band() const {
  return {std::ldexp(1.0, scales.min + 1), std::ldexp(1.0, scales.max)};
}

LPPair make_lp_pair(ScaleRange scales) {
  if (!(scales.min < scales.max)) {
    throw std::invalid_argument(fmt::format("scale range needs min < max, got [{}, {}]", scales.min, scales.max));
  }
  // The inner lowpass (1/2, 1) evaluates to exactly phi_hat(2r), so the dilates
  // of psi_hat telescope.
  return {RadialProfile::lowpass(1.0, 2.0), RadialProfile::annular(0.5, 1.0, 1.0, 2.0), scales};
}

PartitionCheck check_partition(const LPPair& pair, std::size_t radial_points, const GridSpec* grid) {
  PartitionCheck out;
  const auto [lo, hi] = pair.covered_band();
  auto visit = [&](double r) {
    const double defect = std::abs(pair.partition_sum(r) - 1.0);
    if (defect > out.max_defect || out.points == 0) {
      out.max_defect = defect;
      out.worst_radius = r;
    }
    int active = 0;
    for (int l = pair.scales.min; l <= pair.scales.max; ++l) active += pair.psi(std::ldexp(r, -l)) != 0.0;
    out.max_overlap = std::max(out.max_overlap, active);
    ++out.points;
  };
  if (radial_points >= 2) {
    const double step = std::log(hi / lo) / static_cast<double>(radial_points - 1);
    for (std::size_t i = 0; i < radial_points; ++i) {
      visit(std::min(hi, lo * std::exp(step * static_cast<double>(i))));
    }
  }
  if (grid != nullptr) {
    for (std::size_t i = 0; i < grid->size(); ++i) {
      const double r = grid->frequency_radius(i);
      if (r >= lo && r <= hi) visit(r);
    }
  }
  return out;
}

CounterexampleProfiles make_counterexample_profiles(double eta_radius, AnnulusRadii beta_plateau,
                                                    AnnulusRadii beta_support) {
  if (!(eta_radius > 0.0) || !std::isfinite(eta_radius)) {
    throw std::invalid_argument(fmt::format("eta radius must be positive, got {}", eta_radius));
  }
  if (!(beta_support.inner > 0.0)) {
    throw std::invalid_argument("beta support must stay away from the origin (inner radius > 0)");
  }
  if (!(beta_support.inner < beta_plateau.inner)) {
    throw std::invalid_argument(fmt::format("beta plateau inner radius {} must exceed support inner radius {}",
                                            beta_plateau.inner, beta_support.inner));
  }
  if (!(beta_plateau.inner <= beta_plateau.outer)) {
    throw std::invalid_argument("beta plateau annulus is empty");
  }
  if (!(beta_plateau.outer < beta_support.outer)) {
    throw std::invalid_argument(fmt::format("beta plateau outer radius {} must be below support outer radius {}",
                                            beta_plateau.outer, beta_support.outer));
  }
  return {RadialProfile::lowpass(eta_radius / 2.0, eta_radius),
          RadialProfile::annular(beta_support.inner, beta_plateau.inner, beta_plateau.outer, beta_support.outer)};
}

}  // namespace shiftlog
