#include <bit>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "shiftlog/simd/kernels.hpp"

using shiftlog::simd::cplx;
namespace simd = shiftlog::simd;

namespace {

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

bool same_bits(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(cplx)) == 0;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

struct Inputs {
  std::vector<double> a, w, acc;
  std::vector<cplx> z, f;
};

Inputs make_inputs(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::normal_distribution<double> g;
  Inputs in;
  for (std::size_t i = 0; i < n; ++i) {
    in.a.push_back(u(rng));
    in.w.push_back(u(rng));
    in.acc.push_back(u(rng));
    in.z.emplace_back(g(rng), g(rng));
    in.f.emplace_back(g(rng), g(rng));
  }
  return in;
}

}  // namespace

TEST_CASE("scalar reference kernels match their definitions") {
  const std::vector<double> a{1.0, 4.0, 2.0};
  const std::vector<double> w{3.0, 0.5, 1.5};
  CHECK(simd::scalar::max_weighted(a.data(), w.data(), 3) == 3.0);
  CHECK(simd::scalar::max_weighted(a.data(), w.data(), 0) == 0.0);

  std::vector<cplx> z{{3.0, 4.0}, {0.0, -2.0}};
  CHECK(simd::scalar::max_abs(z.data(), 2) == 5.0);
  CHECK(simd::scalar::sum_abs2(z.data(), 2) == 29.0);

  std::vector<cplx> f{{0.0, 1.0}, {2.0, 0.0}};
  simd::scalar::multiply(z.data(), f.data(), 2);
  CHECK(z[0] == cplx(-4.0, 3.0));
  CHECK(z[1] == cplx(0.0, -4.0));
}

TEST_CASE("avx2 kernels agree bit for bit with the scalar reference") {
  if (!simd::backend_supported(simd::Backend::Avx2)) {
    MESSAGE("AVX2 not available; skipping equivalence checks");
    return;
  }
#if defined(__x86_64__)
  std::mt19937_64 rng(11);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 64u, 1000u, 1023u}) {
    CAPTURE(n);
    const Inputs in = make_inputs(n, rng);

    CHECK(same_bits(simd::scalar::max_weighted(in.a.data(), in.w.data(), n),
                    simd::avx2::max_weighted(in.a.data(), in.w.data(), n)));
    CHECK(same_bits(simd::scalar::max_abs(in.z.data(), n), simd::avx2::max_abs(in.z.data(), n)));
    CHECK(same_bits(simd::scalar::sum_abs2(in.z.data(), n), simd::avx2::sum_abs2(in.z.data(), n)));

    auto acc_s = in.acc, acc_v = in.acc;
    simd::scalar::accumulate_abs2(acc_s.data(), in.z.data(), n);
    simd::avx2::accumulate_abs2(acc_v.data(), in.z.data(), n);
    CHECK(same_bits(acc_s, acc_v));

    acc_s = in.acc;
    acc_v = in.acc;
    simd::scalar::max_abs_into(acc_s.data(), in.z.data(), n);
    simd::avx2::max_abs_into(acc_v.data(), in.z.data(), n);
    CHECK(same_bits(acc_s, acc_v));

    auto z_s = in.z, z_v = in.z;
    simd::scalar::multiply(z_s.data(), in.f.data(), n);
    simd::avx2::multiply(z_v.data(), in.f.data(), n);
    CHECK(same_bits(z_s, z_v));

    z_s = in.z;
    z_v = in.z;
    simd::scalar::multiply_real(z_s.data(), in.w.data(), n);
    simd::avx2::multiply_real(z_v.data(), in.w.data(), n);
    CHECK(same_bits(z_s, z_v));
  }
#endif
}

TEST_CASE("dispatch honours a forced backend and validates lengths") {
  const auto original = simd::active_backend();
  simd::force_backend(simd::Backend::Scalar);
  CHECK(simd::active_backend() == simd::Backend::Scalar);
  CHECK(simd::backend_name(simd::Backend::Scalar) == "scalar");

  std::vector<double> a{1.0, 2.0}, w{1.0};
  CHECK_THROWS_AS(simd::max_weighted(a, w), std::invalid_argument);

  if (simd::backend_supported(simd::Backend::Avx2)) {
    simd::force_backend(simd::Backend::Avx2);
    CHECK(simd::active_backend() == simd::Backend::Avx2);
  }
  simd::force_backend(original);
}
