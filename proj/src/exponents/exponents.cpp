#include "shiftlog/exponents.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace shiftlog {

namespace {

// Boost 1.74 rational comparisons against a plain int recurse forever under
// C++20 rewritten operators, so every comparison uses a Rational operand.
const Rational kZero(0);
const Rational kOne(1);
const Rational kHalf(1, 2);

Rational abs_r(const Rational& r) { return r < kZero ? -r : r; }

void check_slot(const PTuple& pt, int k, const char* what) {
  if (k < 1 || k > pt.n() + 1) {
    throw std::invalid_argument(fmt::format("{}: slot {} outside 1..{}", what, k, pt.n() + 1));
  }
}

void check_pair(const PTuple& pt, int s, int t, const char* what) {
  check_slot(pt, s, what);
  check_slot(pt, t, what);
  if (s == t) throw std::invalid_argument(fmt::format("{}: s and t coincide ({})", what, s));
}

Rational sum_excluding(const std::vector<Rational>& point, std::initializer_list<int> skip) {
  Rational sum = 0;
  for (int k = 1; k <= static_cast<int>(point.size()); ++k) {
    if (std::find(skip.begin(), skip.end(), k) == skip.end()) sum += point[static_cast<std::size_t>(k - 1)];
  }
  return sum;
}

Rational sharp_of_point(std::span<const Rational> point) {
  const auto asc = ascending_ranks(point);
  return 1 - point[static_cast<std::size_t>(asc[0] - 1)] - point[static_cast<std::size_t>(asc[1] - 1)];
}

std::vector<std::pair<int, int>> maximising_pairs(std::span<const Rational> point) {
  const Rational best = sharp_of_point(point);
  std::vector<std::pair<int, int>> out;
  const int m = static_cast<int>(point.size());
  for (int s = 1; s <= m; ++s)
    for (int t = s + 1; t <= m; ++t) {
      if (1 - point[static_cast<std::size_t>(s - 1)] - point[static_cast<std::size_t>(t - 1)] == best) {
        out.emplace_back(s, t);
      }
    }
  return out;
}

std::vector<Rational> vertex(std::size_t size, int slot) {
  std::vector<Rational> v(size, Rational(0));
  v[static_cast<std::size_t>(slot - 1)] = 1;
  return v;
}

}  // namespace

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return fmt::format("{}", r.numerator());
  return fmt::format("{}/{}", r.numerator(), r.denominator());
}

Rational parse_rational(const std::string& text) {
  auto parse_int = [&](const std::string& s) {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument("cannot parse rational '" + text + "'");
    return static_cast<std::int64_t>(v);
  };
  if (auto slash = text.find('/'); slash != std::string::npos) {
    const auto den = parse_int(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    return Rational(parse_int(text.substr(0, slash)), den);
  }
  if (auto dot = text.find('.'); dot != std::string::npos) {
    const std::string frac = text.substr(dot + 1);
    if (frac.size() > 15) throw std::invalid_argument("too many decimals in '" + text + "'");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const std::string whole = text.substr(0, dot);
    const bool negative = !whole.empty() && whole[0] == '-';
    const std::int64_t w = whole.empty() || whole == "-" ? 0 : parse_int(whole);
    const std::int64_t f = frac.empty() ? 0 : parse_int(frac);
    return Rational(w * scale + (negative ? -f : f), scale);
  }
  return Rational(parse_int(text));
}

PTuple::PTuple(std::vector<Rational> reciprocals) : reciprocals_(std::move(reciprocals)) {
  if (reciprocals_.size() < 2) throw std::invalid_argument("a p-tuple needs n >= 2 exponents");
  Rational sum = 0;
  for (std::size_t k = 0; k < reciprocals_.size(); ++k) {
    const Rational& r = reciprocals_[k];
    if (r < kZero || r > kOne) {
      throw std::invalid_argument(fmt::format("1/p_{} = {} is outside [0, 1]", k + 1, to_string(r)));
    }
    sum += r;
  }
  if (sum > kOne) {
    throw std::invalid_argument(fmt::format("reciprocals sum to {} > 1 (p < 1 is out of scope)", to_string(sum)));
  }
}

PTuple PTuple::from_exponents(std::span<const std::string> exponents) {
  std::vector<Rational> r;
  for (const auto& e : exponents) {
    if (e == "inf" || e == "infinity") {
      r.emplace_back(0);
      continue;
    }
    const Rational p = parse_rational(e);
    if (p < kOne) throw std::invalid_argument("exponent " + e + " is below 1");
    r.push_back(1 / p);
  }
  return PTuple(std::move(r));
}

PTuple PTuple::from_full_point(std::span<const Rational> point) {
  if (point.size() < 3) throw std::invalid_argument("a full point needs n + 1 >= 3 coordinates");
  const Rational total = std::accumulate(point.begin(), point.end(), Rational(0));
  if (total != kOne) throw std::invalid_argument("full point coordinates must sum to 1, got " + to_string(total));
  if (point.back() < kZero) throw std::invalid_argument("dual coordinate must be nonnegative");
  return PTuple(std::vector<Rational>(point.begin(), point.end() - 1));
}

Rational PTuple::r(int k) const {
  if (k < 1 || k > n() + 1) throw std::invalid_argument(fmt::format("slot {} outside 1..{}", k, n() + 1));
  if (k == n() + 1) return r_dual();
  return reciprocals_[static_cast<std::size_t>(k - 1)];
}

Rational PTuple::r_p() const { return std::accumulate(reciprocals_.begin(), reciprocals_.end(), Rational(0)); }

std::vector<Rational> PTuple::full_point() const {
  std::vector<Rational> out = reciprocals_;
  out.push_back(r_dual());
  return out;
}

std::vector<int> descending_ranks(std::span<const Rational> values) {
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 1);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return values[static_cast<std::size_t>(a - 1)] > values[static_cast<std::size_t>(b - 1)];
  });
  return idx;
}

std::vector<int> ascending_ranks(std::span<const Rational> values) {
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 1);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return values[static_cast<std::size_t>(a - 1)] < values[static_cast<std::size_t>(b - 1)];
  });
  return idx;
}

Rational mx_k(std::span<const Rational> values, int k) {
  if (k < 1 || k > static_cast<int>(values.size())) {
    throw std::invalid_argument(fmt::format("mx_k: k = {} outside 1..{}", k, values.size()));
  }
  return values[static_cast<std::size_t>(descending_ranks(values)[static_cast<std::size_t>(k - 1)] - 1)];
}

Rational mn_k(std::span<const Rational> values, int k) {
  if (k < 1 || k > static_cast<int>(values.size())) {
    throw std::invalid_argument(fmt::format("mn_k: k = {} outside 1..{}", k, values.size()));
  }
  return values[static_cast<std::size_t>(ascending_ranks(values)[static_cast<std::size_t>(k - 1)] - 1)];
}

Rational sharp_lambda(const PTuple& pt) {
  const auto point = pt.full_point();
  Rational sum = 0;
  for (int k = 1; k <= pt.n() - 1; ++k) sum += mx_k(point, k);
  return sum;
}

Rational brute_lambda(const PTuple& pt) {
  const int m = pt.n() + 1;
  Rational best = 0;
  bool first = true;
  for (int s = 1; s <= m; ++s)
    for (int t = s + 1; t <= m; ++t) {
      const Rational v = lambda_st(pt, s, t);
      if (first || v > best) best = v;
      first = false;
    }
  return best;
}

Rational lambda_st(const PTuple& pt, int s, int t) {
  check_pair(pt, s, t, "lambda_st");
  return sum_excluding(pt.full_point(), {s, t});
}

Rational lambda_st_prime(const PTuple& pt, int s, int t, int tau) {
  check_pair(pt, s, t, "lambda_st_prime");
  check_slot(pt, tau, "lambda_st_prime");
  if (tau == s || tau == t) throw std::invalid_argument("lambda_st_prime: tau must differ from s and t");
  const auto point = pt.full_point();
  return abs_r(kHalf - pt.r(s)) + abs_r(kHalf - pt.r(t)) + sum_excluding(point, {s, t, tau});
}

Rational lambda_prime(const PTuple& pt) {
  const auto point = pt.full_point();
  Rational sum = mx_k(point, 1);
  for (int k = 2; k <= pt.n() - 1; ++k) sum += 2 * mx_k(point, k);
  return sum;
}

Rational lambda_st_dprime(const PTuple& pt, int s, int t) {
  check_pair(pt, s, t, "lambda_st_dprime");
  return abs_r(kHalf - pt.r(s)) + sum_excluding(pt.full_point(), {s, t});
}

int largest_remaining(const PTuple& pt, int s, int t) {
  check_pair(pt, s, t, "largest_remaining");
  const auto point = pt.full_point();
  for (int k : descending_ranks(point)) {
    if (k != s && k != t) return k;
  }
  throw std::logic_error("largest_remaining: no slot left");
}

std::optional<int> adjoint_annotation(const PTuple& pt) {
  const auto point = pt.full_point();
  const auto asc = ascending_ranks(point);
  const int dual = pt.n() + 1;
  int other = 0;
  if (asc[0] == dual) {
    other = asc[1];
  } else if (asc[1] == dual) {
    other = asc[0];
  } else {
    return std::nullopt;
  }
  for (int j = 1; j <= pt.n(); ++j) {
    if (j != other) return j;
  }
  return std::nullopt;
}

SplitPlan select_split(const PTuple& pt, int s, int t) {
  check_pair(pt, s, t, "select_split");
  SplitPlan plan;
  plan.s = s;
  plan.t = t;
  plan.tau = t;
  plan.adjoint_slot = adjoint_annotation(pt);
  plan.exponent = lambda_st(pt, s, t);
  const int m = pt.n() + 1;

  // A coordinate of at least 1/2 inside the pair: nothing to move.
  for (int u : {s, t}) {
    if (pt.r(u) >= kHalf) {
      const int other = u == s ? t : s;
      plan.kind = SplitKind::DoublePrime;
      plan.s = u;
      plan.t = other;
      plan.tau = other;
      plan.exponent = lambda_st_dprime(pt, u, other);
      plan.note = fmt::format("1/p_{} >= 1/2: tau = {}, exponent is lambda''", u, other);
      return plan;
    }
  }

  for (int u = 1; u <= m; ++u) {
    if (u == s || u == t || pt.r(u) < kHalf) continue;
    const Rational inv_q0 = kHalf - pt.r(s);
    if (inv_q0 == kZero) {
      plan.kind = SplitKind::NoSplit;
      plan.inv_q0 = Rational(0);
      plan.note = fmt::format("1/p_{} = 1/2 already; no split needed", s);
      return plan;
    }
    plan.kind = SplitKind::LargeSlot;
    plan.alpha = u;
    plan.inv_q0 = inv_q0;
    plan.inv_q1 = pt.r(u) - inv_q0;
    plan.gamma = inv_q0 / pt.r(u);
    plan.note = fmt::format("1/p_{} >= 1/2: J0 empty, alpha = {}", u, u);
    return plan;
  }

  Rational sum = pt.r(s);
  for (int k = 1; k <= m; ++k) {
    if (k == s || k == t) continue;
    const Rational next = sum + pt.r(k);
    if (next < kHalf) {
      plan.j0.push_back(k);
      sum = next;
    } else if (next == kHalf) {
      plan.j0.push_back(k);
      plan.kind = SplitKind::NoSplit;
      plan.inv_q0 = Rational(0);
      plan.note = "J0 and s sum to exactly 1/2; no split needed";
      return plan;
    } else {
      plan.kind = SplitKind::Split;
      plan.alpha = k;
      plan.inv_q0 = kHalf - sum;
      plan.inv_q1 = pt.r(k) - *plan.inv_q0;
      plan.gamma = *plan.inv_q0 / pt.r(k);
      return plan;
    }
  }
  throw std::logic_error("select_split: no admissible alpha");
}

InterpolationResult interpolation_step(std::span<const Rational> pt0, const Rational& e0,
                                       std::span<const Rational> pt1, const Rational& e1, const Rational& theta) {
  if (theta < kZero || theta > kOne) throw std::invalid_argument("interpolation parameter outside [0, 1]");
  if (pt0.size() != pt1.size()) throw std::invalid_argument("interpolation endpoints differ in length");
  for (auto pt : {pt0, pt1}) {
    if (std::accumulate(pt.begin(), pt.end(), Rational(0)) != kOne) {
      throw std::invalid_argument("interpolation endpoint does not sum to 1");
    }
  }
  InterpolationResult out;
  out.point.resize(pt0.size());
  for (std::size_t k = 0; k < pt0.size(); ++k) out.point[k] = (1 - theta) * pt0[k] + theta * pt1[k];
  out.exponent = (1 - theta) * e0 + theta * e1;
  return out;
}

bool interpolation_keeps_sharpness(std::span<const Rational> pt0, std::span<const Rational> pt1) {
  const auto a = maximising_pairs(pt0);
  const auto b = maximising_pairs(pt1);
  return std::any_of(a.begin(), a.end(), [&](const auto& p) { return std::find(b.begin(), b.end(), p) != b.end(); });
}

InterpolationPlan interpolation_plan(const PTuple& target) {
  InterpolationPlan plan;
  plan.target = target.full_point();
  plan.sharp_exponent = sharp_lambda(target);
  const std::size_t size = plan.target.size();

  std::vector<int> support;
  for (int k = 1; k <= static_cast<int>(size); ++k) {
    if (plan.target[static_cast<std::size_t>(k - 1)] != kZero) support.push_back(k);
  }
  if (support.size() == size) {
    plan.diagnosis = fmt::format(
        "target has no zero coordinate: vertex interpolation only reaches points with a zero slot, and reaching "
        "the interior needs endpoints whose largest {} coordinates align", target.n() - 1);
    return plan;
  }

  plan.reachable = true;
  std::vector<Rational> current = vertex(size, support.front());
  Rational exponent = 1;
  Rational mass = plan.target[static_cast<std::size_t>(support.front() - 1)];
  for (std::size_t i = 1; i < support.size(); ++i) {
    const int slot = support[i];
    const Rational weight = plan.target[static_cast<std::size_t>(slot - 1)];
    mass += weight;
    InterpolationStepRecord step;
    step.from = current;
    step.from_exponent = exponent;
    step.vertex = vertex(size, slot);
    step.vertex_exponent = 1;
    step.theta = weight / mass;
    const auto result = interpolation_step(step.from, step.from_exponent, step.vertex, 1, step.theta);
    step.point = result.point;
    step.exponent = result.exponent;
    step.keeps_sharpness = interpolation_keeps_sharpness(step.from, step.vertex);
    current = step.point;
    exponent = step.exponent;
    plan.steps.push_back(std::move(step));
  }
  plan.final_exponent = exponent;
  plan.sharp = plan.final_exponent == plan.sharp_exponent;
  if (plan.sharp) {
    plan.diagnosis = "every endpoint involves L_inf slots; their extension via transpose operators is externally "
                     "justified";
  } else {
    plan.diagnosis = fmt::format(
        "reached with exponent {} but the sharp exponent is {}: the last step interpolates endpoints whose largest "
        "{} coordinates do not align", to_string(plan.final_exponent), to_string(plan.sharp_exponent),
        target.n() - 1);
  }
  return plan;
}

}  // namespace shiftlog
