#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace shiftlog {

namespace detail {

void* aligned_bytes(std::size_t bytes) { return fftw_malloc(bytes); }
void release_bytes(void* p) noexcept { fftw_free(p); }

namespace {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const noexcept { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

class PlanCache {
 public:
  fftw_plan get(const GridSpec& grid, int sign) {
    const Key key{grid.dimension, grid.samples, sign};
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second.get();

    // FFTW_ESTIMATE never touches the arrays and picks the same algorithm on
    // every run, which keeps reports reproducible.
    const std::size_t n = grid.size();
    ComplexBuffer in(n), out(n);
    int dims[2] = {static_cast<int>(grid.samples), static_cast<int>(grid.samples)};
    fftw_plan plan = fftw_plan_dft(grid.dimension, dims, reinterpret_cast<fftw_complex*>(in.data()),
                                   reinterpret_cast<fftw_complex*>(out.data()),
                                   sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    if (plan == nullptr) throw std::runtime_error("fftw planning failed");
    auto [it, inserted] = plans_.emplace(key, PlanHandle(plan));
    return it->second.get();
  }

 private:
  using Key = std::tuple<int, std::size_t, int>;
  std::mutex mutex_;
  std::map<Key, PlanHandle> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void dft(const GridSpec& grid, const cplx* in, cplx* out, int sign) {
  fftw_plan plan = cache().get(grid, sign);
  // New-array execute: safe to call concurrently once the plan exists.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace detail

}  // namespace shiftlog
