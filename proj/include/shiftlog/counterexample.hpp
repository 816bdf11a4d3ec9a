#pragma once

// Sharpness construction: modulated bump trains in two slots, a fixed
// annular bump elsewhere, and a kernel whose dyadic dilates pick out one
// packet per scale so that T collapses to N eta^2 beta^(n-2).

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shiftlog/calibration.hpp"
#include "shiftlog/exponents.hpp"
#include "shiftlog/field.hpp"
#include "shiftlog/multiplier.hpp"
#include "shiftlog/shifted_lab.hpp"

namespace shiftlog {

struct CxConfig {
  int n = 3;
  int s = 1;  // 1-based, s < t <= n
  int t = 2;
  /// Strictly increasing modulation exponents; N = zeta.size().
  std::vector<int> zeta;
  double eta_radius = 0.125;
  AnnulusRadii beta_plateau = kDefaultBetaPlateau;
  AnnulusRadii beta_support = kDefaultBetaSupport;
  /// No grid: symbolic validation only.
  std::optional<GridSpec> grid;
  /// Exponents p_1..p_n as text; empty means p_k = n + 1 for every slot.
  std::vector<std::string> exponents;
  /// D_lambda weight exponent; defaults to the sharp exponent of the tuple.
  std::optional<double> lambda;
  /// Quadrature lattice for D_lambda.
  double kernel_spacing = 0.25;
  std::size_t kernel_samples = 2048;
  /// Optional per-slot input multipliers (empty: all one).
  std::vector<double> input_scales;

  int count() const { return static_cast<int>(zeta.size()); }
  PTuple p_tuple() const;
  double weight_exponent() const;
  /// Scales [zeta_1 - 1, zeta_N + 1].
  DyadicRange range() const;

  static std::vector<int> linear_schedule(int count, int step, int offset = 0);
  /// zeta_k = k + 4, rho = 1/8, L = 64, M = 2^18.
  static CxConfig identity_mode(int count);
  /// zeta_k = 4k, rho = 1/4, L = 500, M = 2^22, p = 4 in every slot.
  static CxConfig separation_mode(int count);
  /// zeta_k = 10k, rho = 1/100, no grid.
  static CxConfig reference_geometry(int count);
};

struct CxConstraint {
  std::string name;
  bool pass = true;
  /// Blocking constraints make the construction invalid; the rest are flags.
  bool blocking = true;
  std::string detail;
};

std::vector<CxConstraint> validate_config(const CxConfig& cfg);
bool constraints_hold(const std::vector<CxConstraint>& constraints);

class CxValidationError : public std::invalid_argument {
 public:
  explicit CxValidationError(std::vector<CxConstraint> violations);
  const std::vector<CxConstraint>& violations() const { return violations_; }

 private:
  std::vector<CxConstraint> violations_;
};

struct CxFunctions {
  std::vector<BandLimitedFunction> inputs;  // f_1..f_n
  BandLimitedFunction eta;
  BandLimitedFunction beta;
};

/// Analytic inputs; throws CxValidationError on blocking violations.
CxFunctions build_functions(const CxConfig& cfg);
/// Sampled inputs on the configured grid.
std::vector<SampledField> build_inputs(const CxConfig& cfg);
TensorKernel build_kernel(const CxConfig& cfg);

struct OrthogonalityResult {
  double max_violation = 0.0;
  /// Largest |beta_hat(2^-l xi) eta_hat(xi - 2^zeta_k)| over l != zeta_k.
  double off_scale_max = 0.0;
};

OrthogonalityResult orthogonality_check(const CxConfig& cfg);

struct CxReport {
  int count = 0;
  double lambda = 0.0;
  double identity_error = 0.0;
  OrthogonalityResult orthogonality;
  std::vector<double> input_norms;  // ||f_k||_{p_k}
  double output_norm = 0.0;         // ||T||_p, 1/p = sum 1/p_k
  DLambdaResult d_lambda;
  double ratio = 0.0;
  std::vector<CxConstraint> constraints;
};

CxReport run_counterexample(const CxConfig& cfg);

/// 1 - 1/p_s - 1/p_t - lambda.
double predicted_ratio_slope(const CxConfig& cfg);

/// Least-squares slope of log(ratio) against log N over >= 3 distinct N.
FitResult ratio_growth_fit(std::span<const std::pair<double, double>> count_ratio);

}  // namespace shiftlog
