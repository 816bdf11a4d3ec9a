#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "shiftlog/lp_ops.hpp"
#include "shiftlog/simd/kernels.hpp"

namespace shiftlog {

namespace {

// Weight (1 + 2^k |z|)^-sigma for every grid offset z (minimum image).
RealBuffer peetre_weights(const GridSpec& grid, double sigma, int k) {
  RealBuffer w(grid.size());
  const double scale = std::ldexp(1.0, k);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto z = grid.position(i);
    w[i] = std::pow(1.0 + scale * std::hypot(z[0], z[1]), -sigma);
  }
  return w;
}

// reversed[u] = a[(-u) mod M] for u in [0, 2M), so that a[(i - j) mod M]
// for j = 0..M-1 is the contiguous slice starting at (M - i) mod M.
RealBuffer reversed_doubled(std::span<const double> a) {
  const std::size_t m = a.size();
  RealBuffer out(2 * m);
  for (std::size_t u = 0; u < 2 * m; ++u) out[u] = a[(m - u % m) % m];
  return out;
}

}  // namespace

SampledField peetre_max(const SampledField& f, double sigma, int k) {
  if (!(sigma > 0.0)) throw std::invalid_argument(fmt::format("peetre_max needs sigma > 0, got {}", sigma));
  const GridSpec& grid = f.grid();
  const std::size_t m = grid.samples;
  const RealBuffer w = peetre_weights(grid, sigma, k);
  const RealBuffer mod = f.moduli();
  ComplexBuffer out(grid.size());

  if (grid.dimension == 1) {
    const RealBuffer rev = reversed_doubled(mod);
    for (std::size_t i = 0; i < m; ++i) {
      out[i] = simd::max_weighted(std::span<const double>(rev.data() + (m - i) % m, m), w);
    }
    return SampledField(grid, std::move(out));
  }

  std::vector<RealBuffer> rows(m);
  for (std::size_t r = 0; r < m; ++r) rows[r] = reversed_doubled(std::span<const double>(mod.data() + r * m, m));
  for (std::size_t i0 = 0; i0 < m; ++i0) {
    for (std::size_t i1 = 0; i1 < m; ++i1) {
      double best = 0.0;
      for (std::size_t j0 = 0; j0 < m; ++j0) {
        const RealBuffer& row = rows[(i0 + m - j0) % m];
        const double v = simd::max_weighted(std::span<const double>(row.data() + (m - i1) % m, m),
                                            std::span<const double>(w.data() + j0 * m, m));
        best = std::max(best, v);
      }
      out[i0 * m + i1] = best;
    }
  }
  return SampledField(grid, std::move(out));
}

CubeRatio peetre_cube_ratio(const SampledField& f, double sigma, int k, const DyadicCubeSet& cubes) {
  require_same_grid(f.grid(), cubes.grid(), "peetre_cube_ratio");
  if (cubes.scale() != k) {
    throw std::invalid_argument(fmt::format("cube scale {} does not match Peetre scale {}", cubes.scale(), k));
  }
  const SampledField pm = peetre_max(f, sigma, k);
  std::vector<double> hi(cubes.count(), 0.0);
  std::vector<double> lo(cubes.count(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < pm.size(); ++i) {
    const std::size_t c = cubes.cube_of(i);
    const double v = pm[i].real();
    hi[c] = std::max(hi[c], v);
    lo[c] = std::min(lo[c], v);
  }
  CubeRatio out;
  for (std::size_t c = 0; c < hi.size(); ++c) {
    if (hi[c] == 0.0) continue;
    if (lo[c] == 0.0) {
      out.infinite = true;
      out.ratio = std::numeric_limits<double>::infinity();
      out.worst_cube = c;
      return out;
    }
    const double r = hi[c] / lo[c];
    if (r > out.ratio) {
      out.ratio = r;
      out.worst_cube = c;
    }
  }
  return out;
}

double fefferman_stein_ratio(std::span<const SampledField> fs, int first_scale, double sigma, LpIndex p,
                             LpIndex q) {
  if (fs.empty()) throw std::invalid_argument("fefferman_stein_ratio: empty sequence");
  const MixedNormSpec spec{p, q};
  const double den = mixed_norm(fs, spec);
  if (den == 0.0) throw std::invalid_argument("fefferman_stein_ratio: zero denominator");
  std::vector<SampledField> maxed;
  maxed.reserve(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) {
    maxed.push_back(peetre_max(fs[i], sigma, first_scale + static_cast<int>(i)));
  }
  return mixed_norm(maxed, spec) / den;
}

}  // namespace shiftlog
