#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "shiftlog/shifted_lab.hpp"

namespace shiftlog {

namespace {

// 2^(l d) u(2^l x) on the same grid: the dilate of a periodic field is a
// strided reading of its samples.
ComplexBuffer dilate_by_resampling(const SampledField& u, int scale) {
  const GridSpec& grid = u.grid();
  const std::size_t m = grid.samples;
  const std::size_t stride = std::size_t{1} << scale;
  const double factor = std::ldexp(1.0, scale * grid.dimension);
  ComplexBuffer out(grid.size());
  if (grid.dimension == 1) {
    for (std::size_t j = 0; j < m; ++j) out[j] = factor * u[(stride * j) % m];
    return out;
  }
  for (std::size_t j0 = 0; j0 < m; ++j0)
    for (std::size_t j1 = 0; j1 < m; ++j1) out[j0 * m + j1] = factor * u[((stride * j0) % m) * m + (stride * j1) % m];
  return out;
}

SampledField translate(const SampledField& g, std::array<double, 2> by) {
  return phase_shift(g, std::span<const double>(by.data(), static_cast<std::size_t>(g.grid().dimension)));
}

bool real_positive(const SampledField& g) {
  return std::all_of(g.values().begin(), g.values().end(),
                     [](const cplx& z) { return z.real() > 0.0 && z.imag() == 0.0; });
}

double power_sum(std::span<const cplx> values, double p) {
  double s = 0.0;
  if (p == 2.0) {
    for (const cplx& z : values) s += std::norm(z);
  } else {
    for (const cplx& z : values) s += std::pow(std::abs(z), p);
  }
  return s;
}

}  // namespace

ChangeOfVariablesResult change_of_variables_check(std::span<const SampledField> gs,
                                                  std::span<const std::array<double, 2>> ys, std::size_t k0,
                                                  ScaleRange scales, LpIndex p) {
  if (gs.empty()) throw std::invalid_argument("change_of_variables_check: no factors");
  if (ys.size() != gs.size()) throw std::invalid_argument("change_of_variables_check: one shift per factor needed");
  if (k0 >= gs.size()) throw std::invalid_argument(fmt::format("change_of_variables_check: k0 = {} out of range", k0));
  if (scales.min < 0 || scales.min > scales.max) {
    throw std::invalid_argument("change_of_variables_check: scales must satisfy 0 <= min <= max");
  }
  if (p.is_infinite()) throw std::invalid_argument("change_of_variables_check: p must be finite");
  const double e = p.value();
  if (e != std::nearbyint(e)) throw std::invalid_argument("change_of_variables_check: p must be an integer");
  const bool even = std::fmod(e, 2.0) == 0.0;

  const GridSpec& grid = gs.front().grid();
  double band = 0.0;
  for (const auto& g : gs) {
    require_same_grid(grid, g.grid(), "change_of_variables_check");
    if (!g.certificate()) throw std::invalid_argument("change_of_variables_check: every factor needs a certificate");
    band = std::max(band, g.certificate()->outer);
    if (!even && !real_positive(g)) {
      throw std::invalid_argument("change_of_variables_check: odd p needs real positive factors");
    }
  }
  require_below_nyquist(grid, band, "change_of_variables_check factor");
  // Highest frequency of |product|^p at the finest scale, in grid index units.
  const double top = e * static_cast<double>(gs.size()) * std::ldexp(band, scales.max) * grid.period;
  if (!(top < static_cast<double>(grid.samples))) {
    throw std::invalid_argument(fmt::format(
        "change_of_variables_check: p-th power of the product reaches frequency index {} >= M = {}", top,
        grid.samples));
  }

  std::vector<SampledField> lhs_factors, rhs_factors;
  for (std::size_t k = 0; k < gs.size(); ++k) {
    lhs_factors.push_back(translate(gs[k], ys[k]));
    rhs_factors.push_back(k == k0 ? gs[k] : translate(gs[k], {ys[k][0] - ys[k0][0], ys[k][1] - ys[k0][1]}));
  }

  double lhs = 0.0, rhs = 0.0;
  for (int l = scales.min; l <= scales.max; ++l) {
    ComplexBuffer a(grid.size(), cplx(1.0));
    ComplexBuffer b(grid.size(), cplx(1.0));
    for (std::size_t k = 0; k < gs.size(); ++k) {
      const ComplexBuffer da = dilate_by_resampling(lhs_factors[k], l);
      const ComplexBuffer db = dilate_by_resampling(rhs_factors[k], l);
      for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] *= da[i];
        b[i] *= db[i];
      }
    }
    lhs += power_sum(a, e);
    rhs += power_sum(b, e);
  }
  ChangeOfVariablesResult out;
  out.lhs = std::pow(lhs * grid.cell_volume(), 1.0 / e);
  out.rhs = std::pow(rhs * grid.cell_volume(), 1.0 / e);
  const double diff = std::abs(out.lhs - out.rhs);
  out.absolute = out.lhs == 0.0;
  out.discrepancy = out.absolute ? diff : diff / out.lhs;
  return out;
}

}  // namespace shiftlog
