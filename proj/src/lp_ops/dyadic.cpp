#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "shiftlog/lp_ops.hpp"
#include "shiftlog/simd/kernels.hpp"

namespace shiftlog {

namespace {

SupportCertificate dilated_profile_support(const RadialProfile& profile, int scale) {
  const SupportCertificate c = profile.certificate();
  return {std::ldexp(c.inner, scale), std::ldexp(c.outer, scale)};
}

bool is_zero_shift(const std::array<double, 2>& y) { return y[0] == 0.0 && y[1] == 0.0; }

}  // namespace

ComplexBuffer dyadic_multiplier(const GridSpec& grid, const ShiftedDyadicOp& op) {
  grid.validate();
  ComplexBuffer out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op.profile(std::ldexp(grid.frequency_radius(i), -op.scale));
  if (!is_zero_shift(op.shift)) {
    const std::array<double, 2> s{std::ldexp(op.shift[0], -op.scale), std::ldexp(op.shift[1], -op.scale)};
    simd::multiply(out, shift_phases(grid, std::span<const double>(s.data(), grid.dimension)));
  }
  return out;
}

void check_dyadic_nyquist(const GridSpec& grid, const ShiftedDyadicOp& op,
                          const std::optional<SupportCertificate>& input) {
  SupportCertificate active = dilated_profile_support(op.profile, op.scale);
  if (input) active = active.intersect(*input);
  if (active.empty()) return;
  if (!(active.outer < grid.nyquist())) {
    throw std::invalid_argument(fmt::format(
        "dyadic piece at scale {}: active spectral radius {} reaches Nyquist {} (M={}, L={})", op.scale,
        active.outer, grid.nyquist(), grid.samples, grid.period));
  }
}

SampledField dyadic_piece(const Spectrum& f_hat, const ShiftedDyadicOp& op) {
  const GridSpec& grid = f_hat.grid();
  check_dyadic_nyquist(grid, op, f_hat.certificate());
  ComplexBuffer coeffs(f_hat.coefficients().begin(), f_hat.coefficients().end());
  simd::multiply(coeffs, dyadic_multiplier(grid, op));
  SupportCertificate cert = dilated_profile_support(op.profile, op.scale);
  if (f_hat.certificate()) cert = cert.intersect(*f_hat.certificate());
  return inverse(Spectrum(grid, std::move(coeffs), cert));
}

SampledField dyadic_piece(const SampledField& f, const ShiftedDyadicOp& op) { return dyadic_piece(transform(f), op); }

SampledField square_function(const SampledField& f, const LPPair& pair, std::array<double, 2> shift) {
  const Spectrum f_hat = transform(f);
  RealBuffer acc(f.size(), 0.0);
  for (int l = pair.scales.min; l <= pair.scales.max; ++l) {
    const SampledField piece = dyadic_piece(f_hat, {pair.psi_hat, l, shift});
    simd::accumulate_abs2(acc, piece.values());
  }
  ComplexBuffer out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = std::sqrt(acc[i]);
  return SampledField(f.grid(), std::move(out));
}

SampledField maximal_function(const SampledField& f, const LPPair& pair, std::array<double, 2> shift) {
  const Spectrum f_hat = transform(f);
  RealBuffer acc(f.size(), 0.0);
  for (int l = pair.scales.min; l <= pair.scales.max; ++l) {
    const SampledField piece = dyadic_piece(f_hat, {pair.phi_hat, l, shift});
    simd::max_abs_into(acc, piece.values());
  }
  return SampledField(f.grid(), ComplexBuffer(acc.begin(), acc.end()));
}

DyadicCubeSet::DyadicCubeSet(const GridSpec& grid, int scale) : grid_(grid), scale_(scale), cells_(0) {
  grid_.validate();
  const double side = std::ldexp(1.0, -scale);
  const double cells = side / grid_.spacing();
  const double rounded = std::nearbyint(cells);
  if (rounded < 1.0 || std::abs(cells - rounded) > 1e-9 * cells) {
    throw std::invalid_argument(fmt::format("dyadic cubes of side 2^{} are not a whole number of grid cells (h={})",
                                            -scale, grid_.spacing()));
  }
  cells_ = static_cast<std::size_t>(rounded);
  if (grid_.samples % cells_ != 0) {
    throw std::invalid_argument(
        fmt::format("dyadic cubes of side 2^{} do not tile the period {}", -scale, grid_.period));
  }
}

std::size_t DyadicCubeSet::count() const {
  const std::size_t per_axis = cubes_per_axis();
  return grid_.dimension == 1 ? per_axis : per_axis * per_axis;
}

std::size_t DyadicCubeSet::cube_of(std::size_t flat) const {
  if (grid_.dimension == 1) return flat / cells_;
  const std::size_t m = grid_.samples;
  return (flat / m / cells_) * cubes_per_axis() + (flat % m) / cells_;
}

std::vector<double> DyadicCubeSet::block_sums(std::span<const double> values) const {
  if (values.size() != grid_.size()) throw std::invalid_argument("block_sums: value count does not match grid");
  std::vector<double> out(count(), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) out[cube_of(i)] += values[i];
  return out;
}

double bmo_norm(const SampledField& f, const LPPair& pair) {
  const GridSpec& grid = f.grid();
  const double log_period = std::log2(grid.period);
  if (std::abs(log_period - std::nearbyint(log_period)) > 1e-12) {
    throw std::invalid_argument(fmt::format("bmo_norm needs a power-of-two period, got {}", grid.period));
  }
  const Spectrum f_hat = transform(f);
  std::vector<RealBuffer> energy;
  for (int l = pair.scales.min; l <= pair.scales.max; ++l) {
    RealBuffer e(f.size(), 0.0);
    simd::accumulate_abs2(e, dyadic_piece(f_hat, {pair.psi_hat, l, {}}).values());
    energy.push_back(std::move(e));
  }

  // Cube sides run from one cell up to the whole period; side 2^-k keeps the
  // scales l >= k. Sweeping from small to large cubes only ever adds scales.
  const int top = static_cast<int>(std::nearbyint(log_period));
  const int finest = top - static_cast<int>(std::log2(static_cast<double>(grid.samples)));
  RealBuffer cumulative(f.size(), 0.0);
  int next_scale = pair.scales.max;
  double best = 0.0;
  for (int k = -finest; k >= -top; --k) {
    while (next_scale >= pair.scales.min && next_scale >= k) {
      const RealBuffer& e = energy[static_cast<std::size_t>(next_scale - pair.scales.min)];
      for (std::size_t i = 0; i < e.size(); ++i) cumulative[i] += e[i];
      --next_scale;
    }
    const DyadicCubeSet cubes(grid, k);
    const double volume = std::pow(std::ldexp(1.0, -k), grid.dimension);
    for (double s : cubes.block_sums(cumulative)) best = std::max(best, s * grid.cell_volume() / volume);
  }
  return std::sqrt(best);
}

}  // namespace shiftlog
