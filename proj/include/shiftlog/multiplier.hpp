#pragma once

// Tensor-structured kernels K(y_1, ..., y_n) = sum_terms prod_k g_k(y_k), the
// n-linear operator T built from their dyadic dilates, the (n+1)-linear form,
// transposed kernels, and the logarithmically weighted kernel size D_lambda.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "shiftlog/calibration.hpp"
#include "shiftlog/field.hpp"

namespace shiftlog {

struct DyadicRange {
  int min = 0;
  int max = 0;
  void validate() const;
};

/// Common lattice on which every factor of a kernel is sampled for quadrature:
/// slot k is sampled at origin_k + j * spacing for j in the centered window of
/// `samples` points per axis. Origins are multiples of the spacing.
struct KernelLattice {
  double spacing = 0.25;
  std::size_t samples = 256;
  std::vector<std::array<long, 2>> origins;  // per slot, in lattice units
};

class TensorKernel {
 public:
  using Term = std::vector<BandLimitedFunction>;

  /// Every term has n >= 2 factors of the same dimension.
  TensorKernel(int dimension, std::vector<Term> terms);

  int n() const { return n_; }
  int dimension() const { return dimension_; }
  std::span<const Term> terms() const { return terms_; }
  bool rank_one() const { return terms_.size() == 1; }

  /// Annulus containing the joint spectrum: for each term the product of the
  /// factor annuli lies in sqrt(sum inner^2) <= |xi| <= sqrt(sum outer^2).
  SupportCertificate joint_certificate() const;
  /// Whether the joint certificate sits inside {inner <= |xi| <= outer}.
  bool joint_support_within(double inner = 0.5, double outer = 2.0) const;

  /// Lattice with the given spacing and window size whose origins are the
  /// mean atom translation of each slot, rounded to the lattice.
  KernelLattice default_lattice(double spacing, std::size_t samples) const;

 private:
  int dimension_;
  int n_;
  std::vector<Term> terms_;
};

/// Factor windows of a kernel sampled on a lattice; evaluates K at lattice
/// points (zero outside the windows).
class SampledKernel {
 public:
  SampledKernel(const TensorKernel& kernel, KernelLattice lattice);

  int n() const { return n_; }
  int dimension() const { return dimension_; }
  const KernelLattice& lattice() const { return lattice_; }
  std::size_t term_count() const { return windows_.size(); }
  /// Samples of factor `slot` of term `term`, FFT-ordered window.
  const SampledField& window(std::size_t term, int slot) const;

  /// K at the lattice point with integer coordinates `point` (n * d entries,
  /// slot-major).
  cplx at(std::span<const long> point) const;

 private:
  int dimension_;
  int n_;
  KernelLattice lattice_;
  std::vector<std::vector<SampledField>> windows_;
};

/// K^j(y) = K(y_1 - y_j, ..., -y_j, ..., y_n - y_j) for 1 <= j <= n. The map
/// is an integer shear of determinant +-1 and its own inverse. Holds its own
/// copy of the sampled kernel.
class TransposedKernel {
 public:
  TransposedKernel(SampledKernel base, int j);

  const SampledKernel& base() const { return base_; }
  int slot() const { return j_; }
  cplx at(std::span<const long> point) const;
  /// Spectral norm of the shear acting on R^(n d).
  double shear_norm() const;
  /// Applies the shear to a lattice point.
  std::vector<long> shear(std::span<const long> point) const;

 private:
  SampledKernel base_;
  int j_;
};

TransposedKernel transpose_kernel(const SampledKernel& kernel, int j);

enum class DLambdaMethod { Auto, Exact, Bracket };

struct DLambdaOptions {
  DLambdaMethod method = DLambdaMethod::Auto;
  /// Exact path only when n d <= 3 and the lattice enumeration stays below this.
  std::uint64_t exact_budget = std::uint64_t{1} << 26;
  /// Geometric ratio between radial histogram bins.
  double bin_ratio = 1.01;
  /// Bracket paths throw if (upper - lower) / upper exceeds this.
  double max_relative_width = 0.10;
};

struct DLambdaResult {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool exact = false;
  double relative_width() const { return upper > 0.0 ? (upper - lower) / upper : 0.0; }
};

/// Quadrature of |K(y)| log(e + |y|)^lambda over the lattice windows.
DLambdaResult d_lambda(const SampledKernel& kernel, double lambda, const DLambdaOptions& options = {});
DLambdaResult d_lambda(const TransposedKernel& kernel, double lambda, const DLambdaOptions& options = {});

/// T(f_1, ..., f_n)(x) = sum over scales and terms of prod_k (g_{k,l} * f_k)(x)
/// with g_{k,l} = 2^(l d) g_k(2^l .). Scales where some factor's dilated
/// spectrum misses its input are exactly zero and skipped; every other scale
/// must stay below Nyquist.
SampledField apply_T(const TensorKernel& kernel, std::span<const SampledField> fs, DyadicRange range);

/// integral of T(f_1, ..., f_n) f_{n+1}.
cplx lambda_form(const TensorKernel& kernel, std::span<const SampledField> fs, DyadicRange range);

/// Single-scale form sum_x sum_y K(y) f_1(x - y_1) f_2(x - y_2) f_3(x) h^3 by
/// direct summation over the kernel lattice, for n = 2, d = 1 and a lattice
/// spacing equal to the grid spacing. Inputs are read periodically.
cplx lambda_form_direct(const SampledKernel& kernel, std::span<const SampledField> fs);
cplx lambda_form_direct(const TransposedKernel& kernel, std::span<const SampledField> fs);

/// Sum over scales of integral prod_{k != tau} (Phi_{k,l}^{y_k} * f_k) (Phi_{tau,l} * f_tau)
/// with Phi = psi on the pair (s, t) and phi elsewhere. Slots are 1-based over
/// n + 1 inputs; the shift of slot tau is ignored.
cplx shifted_form(std::span<const SampledField> fs, int s, int t, int tau,
                  std::span<const std::array<double, 2>> shifts, DyadicRange range);

}  // namespace shiftlog
