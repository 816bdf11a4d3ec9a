#pragma once

// Exact rational arithmetic for the logarithmic exponents attached to a tuple
// of Lebesgue exponents, the split selection used to move a shift off a square
// function, and the vertex interpolation schedule.
//
// Indices are 1-based throughout. Slot n+1 is the dual exponent p', so the
// "full point" (1/p_1, ..., 1/p_n, 1/p') sums to one. An infinite exponent is
// reciprocal 0.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace shiftlog {

using Rational = boost::rational<std::int64_t>;

std::string to_string(const Rational& r);
/// Accepts "a", "a/b" or a plain decimal "1.25".
Rational parse_rational(const std::string& text);

class PTuple {
 public:
  /// reciprocals[k-1] = 1/p_k. Throws unless n >= 2, each in [0,1], sum <= 1.
  explicit PTuple(std::vector<Rational> reciprocals);
  /// Exponents as text: "4", "4/3", "inf".
  static PTuple from_exponents(std::span<const std::string> exponents);
  /// Full point of n+1 coordinates summing to one; the last is 1/p'.
  static PTuple from_full_point(std::span<const Rational> point);

  int n() const { return static_cast<int>(reciprocals_.size()); }
  /// Reciprocal in slot k, 1 <= k <= n+1.
  Rational r(int k) const;
  Rational r_p() const;
  Rational r_dual() const { return 1 - r_p(); }
  std::vector<Rational> full_point() const;

 private:
  std::vector<Rational> reciprocals_;
};

/// Indices (1-based) ordered from largest to smallest value, ties broken
/// left to right.
std::vector<int> descending_ranks(std::span<const Rational> values);
/// Indices ordered from smallest to largest value, ties broken left to right.
std::vector<int> ascending_ranks(std::span<const Rational> values);

/// k-th largest, duplicates counted separately.
Rational mx_k(std::span<const Rational> values, int k);
/// k-th smallest, duplicates counted separately.
Rational mn_k(std::span<const Rational> values, int k);

/// Sum of the n-1 largest coordinates of the full point.
Rational sharp_lambda(const PTuple& pt);
/// Max over pairs (s,t) of lambda_st; independent of the closed form.
Rational brute_lambda(const PTuple& pt);

/// Sum of r_k over k not in {s,t}.
Rational lambda_st(const PTuple& pt, int s, int t);
/// |1/2 - r_s| + |1/2 - r_t| + sum of r_k over k not in {s,t,tau}.
Rational lambda_st_prime(const PTuple& pt, int s, int t, int tau);
/// mx_1 + 2 (mx_2 + ... + mx_{n-1}) over the full point.
Rational lambda_prime(const PTuple& pt);
/// |1/2 - r_s| + sum of r_k over k not in {s,t}.
Rational lambda_st_dprime(const PTuple& pt, int s, int t);

/// The unshifted slot used with lambda_st_prime: the largest coordinate
/// outside {s,t}, ties to the left.
int largest_remaining(const PTuple& pt, int s, int t);

enum class SplitKind {
  Split,         // J0 grown left to right, alpha splits the remaining mass
  NoSplit,       // J0 and s reach exactly 1/2; alpha and gamma absent
  LargeSlot,     // some r_u >= 1/2 outside {s,t}: J0 empty, alpha = u
  DoublePrime,   // r_s or r_t >= 1/2: no shift to move, exponent lambda_st_dprime
};

struct SplitPlan {
  SplitKind kind = SplitKind::Split;
  int s = 0;
  int t = 0;
  int tau = 0;
  std::vector<int> j0;
  std::optional<int> alpha;
  std::optional<Rational> gamma;
  std::optional<Rational> inv_q0;
  std::optional<Rational> inv_q1;
  /// lambda exponent the plan certifies (lambda_st or lambda_st_dprime).
  Rational exponent;
  /// Transpose slot to use when 1/p' is among the two smallest coordinates.
  std::optional<int> adjoint_slot;
  std::string note;
};

SplitPlan select_split(const PTuple& pt, int s, int t);

/// If 1/p' is among the two smallest coordinates (ties left to right), the
/// slot j != s to which the construction is transposed.
std::optional<int> adjoint_annotation(const PTuple& pt);

struct InterpolationResult {
  std::vector<Rational> point;
  Rational exponent;
};

/// Coordinatewise (1-theta) pt0 + theta pt1, exponent (1-theta) e0 + theta e1.
InterpolationResult interpolation_step(std::span<const Rational> pt0, const Rational& e0,
                                       std::span<const Rational> pt1, const Rational& e1, const Rational& theta);

/// Whether interpolating the two full points keeps the sharp exponent: some
/// pair (s,t) maximises lambda_st at both endpoints.
bool interpolation_keeps_sharpness(std::span<const Rational> pt0, std::span<const Rational> pt1);

struct InterpolationStepRecord {
  std::vector<Rational> from;
  Rational from_exponent;
  std::vector<Rational> vertex;
  Rational vertex_exponent;
  Rational theta;
  std::vector<Rational> point;
  Rational exponent;
  bool keeps_sharpness = true;
};

struct InterpolationPlan {
  std::vector<Rational> target;
  bool reachable = false;
  std::vector<InterpolationStepRecord> steps;
  Rational final_exponent;
  Rational sharp_exponent;
  bool sharp = false;
  std::string diagnosis;
};

InterpolationPlan interpolation_plan(const PTuple& target);

}  // namespace shiftlog
