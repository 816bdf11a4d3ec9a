#pragma once

// Shifted dyadic convolution operators and the square, maximal, BMO and
// Peetre-type functionals built on them.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "shiftlog/calibration.hpp"
#include "shiftlog/field.hpp"

namespace shiftlog {

/// Convolution with 2^(l d) Phi(2^l x - y), i.e. the spectrum is multiplied by
/// Phi_hat(2^-l xi) exp(-2 pi i 2^-l y.xi).
struct ShiftedDyadicOp {
  RadialProfile profile;
  int scale = 0;
  std::array<double, 2> shift{0.0, 0.0};
};

/// The spectral multiplier of `op` on every grid frequency.
ComplexBuffer dyadic_multiplier(const GridSpec& grid, const ShiftedDyadicOp& op);

/// Throws if the part of the dilated profile that meets the input spectrum
/// reaches Nyquist. Without an input certificate the whole dilated support
/// must fit.
void check_dyadic_nyquist(const GridSpec& grid, const ShiftedDyadicOp& op,
                          const std::optional<SupportCertificate>& input);

SampledField dyadic_piece(const SampledField& f, const ShiftedDyadicOp& op);
SampledField dyadic_piece(const Spectrum& f_hat, const ShiftedDyadicOp& op);

/// (sum_l |psi_l^y * f|^2)^(1/2) over pair.scales.
SampledField square_function(const SampledField& f, const LPPair& pair, std::array<double, 2> shift = {});
/// sup_l |phi_l^y * f| over pair.scales.
SampledField maximal_function(const SampledField& f, const LPPair& pair, std::array<double, 2> shift = {});

/// Dyadic cubes of side 2^-scale anchored at the origin of the period.
class DyadicCubeSet {
 public:
  /// Throws unless 2^-scale is a whole number of grid cells that tiles the period.
  DyadicCubeSet(const GridSpec& grid, int scale);

  const GridSpec& grid() const { return grid_; }
  int scale() const { return scale_; }
  std::size_t cells_per_side() const { return cells_; }
  std::size_t cubes_per_axis() const { return grid_.samples / cells_; }
  std::size_t count() const;
  /// Index of the cube containing grid point `flat`.
  std::size_t cube_of(std::size_t flat) const;
  /// Sum of `values` over each cube.
  std::vector<double> block_sums(std::span<const double> values) const;

 private:
  GridSpec grid_;
  int scale_;
  std::size_t cells_;
};

/// Supremum over grid-aligned dyadic cubes P of
/// ((1/|P|) int_P sum_{l >= -log2 side(P)} |psi_l * f|^2)^(1/2).
/// Requires a power-of-two period.
double bmo_norm(const SampledField& f, const LPPair& pair);

/// sup_z |f(x - z)| / (1 + 2^k |z|)^sigma over grid points z, torus distance.
SampledField peetre_max(const SampledField& f, double sigma, int k);

struct CubeRatio {
  double ratio = 1.0;
  bool infinite = false;
  std::size_t worst_cube = 0;
};

/// Largest sup/inf of peetre_max(f, sigma, k) over the cubes.
CubeRatio peetre_cube_ratio(const SampledField& f, double sigma, int k, const DyadicCubeSet& cubes);

/// mixed_norm({peetre_max(f_i, sigma, first_scale + i)}) / mixed_norm({f_i}).
double fefferman_stein_ratio(std::span<const SampledField> fs, int first_scale, double sigma, LpIndex p, LpIndex q);

}  // namespace shiftlog
