#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "shiftlog/multiplier.hpp"

namespace shiftlog {

namespace {

double log_weight(double radius, double lambda) {
  if (lambda == 0.0) return 1.0;
  return std::pow(std::log(std::numbers::e + radius), lambda);
}

long centered_offset(std::size_t i, std::size_t m) {
  return i <= m / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(m);
}

// Lattice coordinates (per slot, d = 1) to the point at which the weight is
// evaluated: identity, or the shear of a transposed kernel.
struct PointMap {
  int shear_slot = 0;  // 0 means identity, else 1-based j

  double radius2(std::span<const long> y) const {
    double r2 = 0.0;
    if (shear_slot == 0) {
      for (long v : y) r2 += static_cast<double>(v) * static_cast<double>(v);
      return r2;
    }
    const long yj = y[static_cast<std::size_t>(shear_slot - 1)];
    for (std::size_t k = 0; k < y.size(); ++k) {
      const long z = static_cast<int>(k) == shear_slot - 1 ? -yj : y[k] - yj;
      r2 += static_cast<double>(z) * static_cast<double>(z);
    }
    return r2;
  }
};

std::uint64_t enumeration_size(const SampledKernel& kernel) {
  std::uint64_t total = 1;
  const std::uint64_t per_slot = static_cast<std::uint64_t>(std::pow(kernel.lattice().samples, kernel.dimension()));
  for (int k = 0; k < kernel.n(); ++k) {
    if (total > (std::uint64_t{1} << 62) / per_slot) return std::uint64_t{1} << 62;
    total *= per_slot;
  }
  return total;
}

// Direct lattice sum for d = 1 and n in {2, 3}. |K| is evaluated for the
// sampled kernel and the weight at the (possibly sheared) point.
double exact_sum(const SampledKernel& kernel, double lambda, const PointMap& map) {
  const int n = kernel.n();
  const std::size_t m = kernel.lattice().samples;
  const double h = kernel.lattice().spacing;
  const std::size_t terms = kernel.term_count();

  std::vector<long> base(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) base[static_cast<std::size_t>(k)] = kernel.lattice().origins[static_cast<std::size_t>(k)][0];

  auto value = [&](std::span<const std::size_t> idx) {
    if (terms == 1) {
      double v = 1.0;
      for (int k = 0; k < n; ++k) v *= std::abs(kernel.window(0, k)[idx[static_cast<std::size_t>(k)]]);
      return v;
    }
    cplx sum = 0.0;
    for (std::size_t t = 0; t < terms; ++t) {
      cplx prod = 1.0;
      for (int k = 0; k < n; ++k) prod *= kernel.window(t, k)[idx[static_cast<std::size_t>(k)]];
      sum += prod;
    }
    return std::abs(sum);
  };

  double total = 0.0;
  std::array<std::size_t, 3> idx{};
  std::array<long, 3> y{};
  auto visit = [&]() {
    const double v = value(std::span<const std::size_t>(idx.data(), static_cast<std::size_t>(n)));
    if (v == 0.0) return;
    const double r = h * std::sqrt(map.radius2(std::span<const long>(y.data(), static_cast<std::size_t>(n))));
    total += v * log_weight(r, lambda);
  };
  for (idx[0] = 0; idx[0] < m; ++idx[0]) {
    y[0] = base[0] + centered_offset(idx[0], m);
    for (idx[1] = 0; idx[1] < m; ++idx[1]) {
      y[1] = base[1] + centered_offset(idx[1], m);
      if (n == 2) {
        visit();
        continue;
      }
      for (idx[2] = 0; idx[2] < m; ++idx[2]) {
        y[2] = base[2] + centered_offset(idx[2], m);
        visit();
      }
    }
  }
  return total * std::pow(h, n);
}

// Radial histogram of squared radius with geometric bins s0 q^i. Slot 0 holds
// s = 0 exactly; slot i + 1 holds bin i.
class RadialHistogram {
 public:
  RadialHistogram(double s0, double q) : s0_(s0), log_q_(std::log(q)) {}

  double edge(std::size_t slot) const { return slot == 0 ? 0.0 : s0_ * std::exp(log_q_ * static_cast<double>(slot - 1)); }

  std::size_t floor_slot(double s) const {
    if (s <= 0.0) return 0;
    if (s < s0_) throw std::logic_error("radial histogram: radius below the first bin");
    std::size_t slot = static_cast<std::size_t>(std::floor(std::log(s / s0_) / log_q_)) + 1;
    while (slot > 1 && edge(slot) > s) --slot;
    while (edge(slot + 1) <= s) ++slot;
    return slot;
  }

  std::size_t ceil_slot(double s) const {
    if (s <= 0.0) return 0;
    std::size_t slot = floor_slot(s);
    while (edge(slot) < s) ++slot;
    return slot;
  }

  void add(std::size_t slot, double mass) {
    if (slot >= mass_.size()) mass_.resize(slot + 1, 0.0);
    mass_[slot] += mass;
  }

  const std::vector<double>& masses() const { return mass_; }

 private:
  double s0_;
  double log_q_;
  std::vector<double> mass_;
};

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
};

// Per-slot |g_k| mass by squared radius, combined slot by slot; the lower
// histogram always rounds the summed squared radius down to a bin edge and
// the upper one rounds it up, so the two weighted sums bracket the lattice sum.
Bracket bracket_sum(const SampledKernel& kernel, double lambda, double bin_ratio, double radius_factor) {
  if (kernel.term_count() != 1) throw std::invalid_argument("d_lambda bracket path needs a rank-one kernel");
  if (!(bin_ratio > 1.0)) throw std::invalid_argument("d_lambda: bin ratio must exceed 1");
  const int n = kernel.n();
  const int d = kernel.dimension();
  const std::size_t m = kernel.lattice().samples;
  const double h = kernel.lattice().spacing;
  const RadialHistogram shape(0.5, bin_ratio * bin_ratio);  // squared radius in lattice units

  RadialHistogram lower = shape, upper = shape;
  for (int k = 0; k < n; ++k) {
    RadialHistogram lo_k = shape, hi_k = shape;
    const SampledField& w = kernel.window(0, k);
    const auto& origin = kernel.lattice().origins[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double v = std::abs(w[i]);
      if (v == 0.0) continue;
      double s = 0.0;
      if (d == 1) {
        const double y = static_cast<double>(origin[0] + centered_offset(i, m));
        s = y * y;
      } else {
        const double y0 = static_cast<double>(origin[0] + centered_offset(i / m, m));
        const double y1 = static_cast<double>(origin[1] + centered_offset(i % m, m));
        s = y0 * y0 + y1 * y1;
      }
      lo_k.add(shape.floor_slot(s), v);
      hi_k.add(shape.ceil_slot(s), v);
    }
    if (k == 0) {
      lower = lo_k;
      upper = hi_k;
      continue;
    }
    auto combine = [&](const RadialHistogram& a, const RadialHistogram& b, bool round_up) {
      RadialHistogram out = shape;
      const auto& ma = a.masses();
      const auto& mb = b.masses();
      std::vector<std::size_t> nb;
      for (std::size_t j = 0; j < mb.size(); ++j)
        if (mb[j] != 0.0) nb.push_back(j);
      for (std::size_t i = 0; i < ma.size(); ++i) {
        if (ma[i] == 0.0) continue;
        for (std::size_t j : nb) {
          const double s = shape.edge(i) + shape.edge(j);
          out.add(round_up ? shape.ceil_slot(s) : shape.floor_slot(s), ma[i] * mb[j]);
        }
      }
      return out;
    };
    lower = combine(lower, lo_k, false);
    upper = combine(upper, hi_k, true);
  }

  Bracket out;
  const auto& ml = lower.masses();
  for (std::size_t i = 0; i < ml.size(); ++i) {
    if (ml[i] != 0.0) out.lower += ml[i] * log_weight(h * std::sqrt(shape.edge(i)) / radius_factor, lambda);
  }
  const auto& mu = upper.masses();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] != 0.0) out.upper += mu[i] * log_weight(h * std::sqrt(shape.edge(i)) * radius_factor, lambda);
  }
  const double cell = std::pow(h, n * d);
  out.lower *= cell;
  out.upper *= cell;
  return out;
}

DLambdaResult evaluate(const SampledKernel& kernel, double lambda, const DLambdaOptions& options, int shear_slot,
                       double shear_norm) {
  if (!(lambda >= 0.0)) throw std::invalid_argument(fmt::format("d_lambda needs lambda >= 0, got {}", lambda));
  const bool exact_possible = kernel.n() * kernel.dimension() <= 3;
  const bool within_budget = enumeration_size(kernel) <= options.exact_budget;
  bool use_exact = false;
  switch (options.method) {
    case DLambdaMethod::Exact:
      if (!exact_possible) throw std::invalid_argument("d_lambda exact path needs n d <= 3");
      use_exact = true;
      break;
    case DLambdaMethod::Bracket:
      use_exact = false;
      break;
    case DLambdaMethod::Auto:
      use_exact = exact_possible && within_budget;
      break;
  }
  DLambdaResult out;
  if (use_exact) {
    out.value = exact_sum(kernel, lambda, PointMap{shear_slot});
    out.lower = out.upper = out.value;
    out.exact = true;
    return out;
  }
  const Bracket b = bracket_sum(kernel, lambda, options.bin_ratio, shear_norm);
  out.lower = b.lower;
  out.upper = b.upper;
  out.value = 0.5 * (b.lower + b.upper);
  if (out.relative_width() > options.max_relative_width) {
    throw std::runtime_error(fmt::format(
        "d_lambda bracket [{}, {}] is wider than {:.0f}% of its value; use a smaller n d, a finer bin ratio or a "
        "kernel eligible for the exact path",
        b.lower, b.upper, 100.0 * options.max_relative_width));
  }
  return out;
}

}  // namespace

DLambdaResult d_lambda(const SampledKernel& kernel, double lambda, const DLambdaOptions& options) {
  return evaluate(kernel, lambda, options, 0, 1.0);
}

DLambdaResult d_lambda(const TransposedKernel& kernel, double lambda, const DLambdaOptions& options) {
  // D_lambda(K^j) = sum_z |K(z)| w(|A z|) since A is an involution of
  // determinant +-1 mapping the lattice onto itself.
  return evaluate(kernel.base(), lambda, options, kernel.slot(), kernel.shear_norm());
}

}  // namespace shiftlog
