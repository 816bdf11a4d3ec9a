#pragma once

// Measuring how shifted square and maximal operators grow with the shift, and
// checking the change-of-variables identity that removes one shift from a
// product of shifted dyadic dilates.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shiftlog/calibration.hpp"
#include "shiftlog/field.hpp"
#include "shiftlog/lp_ops.hpp"
#include "shiftlog/rng.hpp"

namespace shiftlog {

enum class GrowthOperator { ShiftedSquare, ShiftedMaximal };

std::string to_string(GrowthOperator kind);
/// "square" or "maximal".
GrowthOperator parse_growth_operator(const std::string& text);

/// Inputs for a growth experiment. Every element is certified band-limited
/// inside [band_inner, band_outer] or the bump band.
struct BankSpec {
  std::size_t random_fields = 4;
  double band_inner = 0.75;
  double band_outer = 1.25;
  /// Modulated bump: lowpass(rho/2, rho) spectrum centred at frequency bump_center.
  double bump_center = 1.0;
  double bump_radius = 0.25;
  /// Extra element: this many copies of the bump at translations 2^j / bump_radius.
  int train_length = 0;
  std::uint64_t seed = 1;
};

/// Complex normal coefficients on every grid frequency with inner <= |xi| <= outer.
SampledField random_band_field(const GridSpec& grid, double inner, double outer, SplitMix64 rng);

struct TestBank {
  std::vector<SampledField> fields;
  std::vector<std::string> labels;
};

TestBank make_bank(const GridSpec& grid, const BankSpec& spec);

/// Shifted square or maximal function of f with shift y e_1.
SampledField shifted_operator(GrowthOperator kind, const SampledField& f, const LPPair& pair, double y);

struct ProxyResult {
  double value = 0.0;
  std::size_t worst = 0;
  std::vector<std::size_t> skipped;
};

/// max over the bank of ||A^y f||_p / ||A^0 f||_p. Elements with a zero
/// denominator are skipped and listed; throws if every element is skipped.
ProxyResult operator_norm_proxy(GrowthOperator kind, LpIndex p, double y, std::span<const SampledField> bank,
                                const LPPair& pair);

struct FitResult {
  double exponent = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  std::vector<std::pair<double, double>> ratios;
};

/// Least-squares slope of log(ratio) against log(log(e + |y|)). Needs at least
/// four pairs with max|y| / min|y| >= 8 and positive ratios.
FitResult fit_log_exponent(std::span<const std::pair<double, double>> pairs);

struct GrowthExperiment {
  GrowthOperator kind = GrowthOperator::ShiftedMaximal;
  LpIndex p{2.0};
  std::vector<double> shifts;
  BankSpec bank;
  GridSpec grid;
  ScaleRange scales;
  /// Allowed |fitted - predicted|.
  double tolerance = 0.15;

  /// Throws std::invalid_argument on a malformed experiment.
  void validate() const;
};

/// |1/2 - 1/p| for the square function, 1/p for the maximal function.
double predicted_growth_exponent(GrowthOperator kind, LpIndex p);

struct GrowthReport {
  FitResult fit;
  std::vector<ProxyResult> proxies;
  double predicted = 0.0;
  double gap = 0.0;
  bool pass = false;
  std::vector<std::string> warnings;
};

GrowthReport run_growth(const GrowthExperiment& experiment);

struct ChangeOfVariablesResult {
  double lhs = 0.0;
  double rhs = 0.0;
  /// |lhs - rhs| / lhs, or the absolute difference when lhs == 0.
  double discrepancy = 0.0;
  bool absolute = false;
};

/// Both sides of the change-of-variables identity for the L_p(l_p) norm of
/// the scale sequence: {prod_k g_{k,l}^{y_k}} against
/// {g_{k0,l} prod_{k != k0} g_{k,l}^{y_k - y_k0}}, with
/// g_{k,l}^y(x) = 2^(l d) g_k(2^l x - y). Scales must be nonnegative (dilation
/// by resampling) and every input needs a support certificate small enough
/// that the p-th power of the product is integrated exactly. For p other than
/// an even integer every input must be real and strictly positive.
ChangeOfVariablesResult change_of_variables_check(std::span<const SampledField> gs,
                                                  std::span<const std::array<double, 2>> ys, std::size_t k0,
                                                  ScaleRange scales, LpIndex p = LpIndex(2.0));

}  // namespace shiftlog
