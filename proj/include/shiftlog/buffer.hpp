#pragma once

#include <complex>
#include <cstddef>
#include <new>
#include <vector>

namespace shiftlog {

using cplx = std::complex<double>;

namespace detail {
void* aligned_bytes(std::size_t bytes);
void release_bytes(void* p) noexcept;
}  // namespace detail

/// Allocator handing out storage with the alignment the FFT backend plans for.
template <class T>
struct AlignedAllocator {
  using value_type = T;

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    if (n == 0) return nullptr;
    void* p = detail::aligned_bytes(n * sizeof(T));
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { detail::release_bytes(p); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

using ComplexBuffer = std::vector<cplx, AlignedAllocator<cplx>>;
using RealBuffer = std::vector<double, AlignedAllocator<double>>;

}  // namespace shiftlog
