#include <stdexcept>
#include <string>

#include "shiftlog/simd/kernels.hpp"

namespace shiftlog::simd {

namespace {

struct Table {
  Backend backend;
  double (*max_weighted)(const double*, const double*, std::size_t);
  void (*accumulate_abs2)(double*, const cplx*, std::size_t);
  void (*max_abs_into)(double*, const cplx*, std::size_t);
  void (*multiply)(cplx*, const cplx*, std::size_t);
  void (*multiply_real)(cplx*, const double*, std::size_t);
  double (*sum_abs2)(const cplx*, std::size_t);
  double (*max_abs)(const cplx*, std::size_t);
};

constexpr Table scalar_table{Backend::Scalar,        scalar::max_weighted,  scalar::accumulate_abs2,
                             scalar::max_abs_into,   scalar::multiply,      scalar::multiply_real,
                             scalar::sum_abs2,       scalar::max_abs};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Table avx2_table{Backend::Avx2,        avx2::max_weighted, avx2::accumulate_abs2,
                           avx2::max_abs_into,   avx2::multiply,     avx2::multiply_real,
                           avx2::sum_abs2,       avx2::max_abs};
#endif

const Table* pick_default() {
  if (backend_supported(Backend::Avx2)) {
#if defined(__x86_64__) || defined(_M_X64)
    return &avx2_table;
#endif
  }
  return &scalar_table;
}

const Table*& current() {
  static const Table* table = pick_default();
  return table;
}

void check_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                                std::to_string(b) + ")");
  }
}

}  // namespace

bool backend_supported(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Backend active_backend() { return current()->backend; }

void force_backend(Backend backend) {
  if (!backend_supported(backend)) {
    throw std::invalid_argument("simd backend not supported on this CPU: " + std::string(backend_name(backend)));
  }
#if defined(__x86_64__) || defined(_M_X64)
  current() = backend == Backend::Avx2 ? &avx2_table : &scalar_table;
#else
  current() = &scalar_table;
#endif
}

std::string_view backend_name(Backend backend) {
  return backend == Backend::Avx2 ? "avx2" : "scalar";
}

double max_weighted(std::span<const double> a, std::span<const double> w) {
  check_sizes(a.size(), w.size(), "max_weighted");
  return current()->max_weighted(a.data(), w.data(), a.size());
}

void accumulate_abs2(std::span<double> acc, std::span<const cplx> z) {
  check_sizes(acc.size(), z.size(), "accumulate_abs2");
  current()->accumulate_abs2(acc.data(), z.data(), z.size());
}

void max_abs_into(std::span<double> acc, std::span<const cplx> z) {
  check_sizes(acc.size(), z.size(), "max_abs_into");
  current()->max_abs_into(acc.data(), z.data(), z.size());
}

void multiply(std::span<cplx> z, std::span<const cplx> factor) {
  check_sizes(z.size(), factor.size(), "multiply");
  current()->multiply(z.data(), factor.data(), z.size());
}

void multiply_real(std::span<cplx> z, std::span<const double> factor) {
  check_sizes(z.size(), factor.size(), "multiply_real");
  current()->multiply_real(z.data(), factor.data(), z.size());
}

double sum_abs2(std::span<const cplx> z) { return current()->sum_abs2(z.data(), z.size()); }

double max_abs(std::span<const cplx> z) { return current()->max_abs(z.data(), z.size()); }

}  // namespace shiftlog::simd
