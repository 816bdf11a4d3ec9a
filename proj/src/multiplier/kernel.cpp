#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "shiftlog/multiplier.hpp"

namespace shiftlog {

void DyadicRange::validate() const {
  if (min > max) throw std::invalid_argument(fmt::format("dyadic range [{}, {}] is empty", min, max));
}

TensorKernel::TensorKernel(int dimension, std::vector<Term> terms)
    : dimension_(dimension), n_(0), terms_(std::move(terms)) {
  if (dimension_ != 1 && dimension_ != 2) throw std::invalid_argument("kernel dimension must be 1 or 2");
  if (terms_.empty()) throw std::invalid_argument("kernel needs at least one term");
  n_ = static_cast<int>(terms_.front().size());
  if (n_ < 2) throw std::invalid_argument(fmt::format("kernel needs n >= 2 slots, got {}", n_));
  for (const auto& term : terms_) {
    if (static_cast<int>(term.size()) != n_) throw std::invalid_argument("kernel terms differ in slot count");
    for (const auto& g : term) {
      if (g.dimension() != dimension_) throw std::invalid_argument("kernel factor dimension mismatch");
    }
  }
}

SupportCertificate TensorKernel::joint_certificate() const {
  SupportCertificate out{1.0, 0.0};
  for (const auto& term : terms_) {
    double in2 = 0.0, out2 = 0.0;
    bool empty = false;
    for (const auto& g : term) {
      const SupportCertificate c = g.certificate();
      if (c.empty()) empty = true;
      in2 += c.inner * c.inner;
      out2 += c.outer * c.outer;
    }
    if (!empty) out = out.hull({std::sqrt(in2), std::sqrt(out2)});
  }
  return out;
}

bool TensorKernel::joint_support_within(double inner, double outer) const {
  const SupportCertificate c = joint_certificate();
  return c.empty() || (c.inner >= inner && c.outer <= outer);
}

KernelLattice TensorKernel::default_lattice(double spacing, std::size_t samples) const {
  if (!(spacing > 0.0)) throw std::invalid_argument("lattice spacing must be positive");
  KernelLattice lattice{spacing, samples, {}};
  for (int k = 0; k < n_; ++k) {
    std::array<double, 2> mean{0.0, 0.0};
    std::size_t count = 0;
    for (const auto& term : terms_)
      for (const auto& atom : term[static_cast<std::size_t>(k)].atoms()) {
        mean[0] += atom.translation[0];
        mean[1] += atom.translation[1];
        ++count;
      }
    if (count > 0) {
      mean[0] /= static_cast<double>(count);
      mean[1] /= static_cast<double>(count);
    }
    lattice.origins.push_back({std::lround(mean[0] / spacing), std::lround(mean[1] / spacing)});
  }
  return lattice;
}

SampledKernel::SampledKernel(const TensorKernel& kernel, KernelLattice lattice)
    : dimension_(kernel.dimension()), n_(kernel.n()), lattice_(std::move(lattice)) {
  if (static_cast<int>(lattice_.origins.size()) != n_) {
    throw std::invalid_argument(fmt::format("lattice has {} origins for {} slots", lattice_.origins.size(), n_));
  }
  const GridSpec window{dimension_, lattice_.samples, lattice_.spacing * static_cast<double>(lattice_.samples)};
  window.validate();
  for (const auto& term : kernel.terms()) {
    std::vector<SampledField> row;
    for (int k = 0; k < n_; ++k) {
      const auto& o = lattice_.origins[static_cast<std::size_t>(k)];
      const std::array<double, 2> origin{static_cast<double>(o[0]) * lattice_.spacing,
                                         dimension_ == 2 ? static_cast<double>(o[1]) * lattice_.spacing : 0.0};
      row.push_back(term[static_cast<std::size_t>(k)].sample_window(lattice_.spacing, lattice_.samples, origin));
    }
    windows_.push_back(std::move(row));
  }
}

const SampledField& SampledKernel::window(std::size_t term, int slot) const {
  return windows_.at(term).at(static_cast<std::size_t>(slot));
}

cplx SampledKernel::at(std::span<const long> point) const {
  if (point.size() != static_cast<std::size_t>(n_ * dimension_)) {
    throw std::invalid_argument("kernel point has the wrong number of coordinates");
  }
  const long m = static_cast<long>(lattice_.samples);
  std::vector<std::size_t> flat(static_cast<std::size_t>(n_));
  for (int k = 0; k < n_; ++k) {
    std::size_t index = 0;
    for (int ax = 0; ax < dimension_; ++ax) {
      const long off = point[static_cast<std::size_t>(k * dimension_ + ax)] -
                       lattice_.origins[static_cast<std::size_t>(k)][static_cast<std::size_t>(ax)];
      if (off <= -m / 2 || off > m / 2) return 0.0;
      index = index * lattice_.samples + static_cast<std::size_t>((off + m) % m);
    }
    flat[static_cast<std::size_t>(k)] = index;
  }
  cplx sum = 0.0;
  for (const auto& row : windows_) {
    cplx prod = 1.0;
    for (int k = 0; k < n_; ++k) prod *= row[static_cast<std::size_t>(k)][flat[static_cast<std::size_t>(k)]];
    sum += prod;
  }
  return sum;
}

TransposedKernel::TransposedKernel(SampledKernel base, int j) : base_(std::move(base)), j_(j) {
  if (j_ < 1 || j_ > base_.n()) {
    throw std::invalid_argument(fmt::format("transpose slot {} outside 1..{}", j_, base_.n()));
  }
}

std::vector<long> TransposedKernel::shear(std::span<const long> point) const {
  const int d = base_.dimension();
  const int n = base_.n();
  if (point.size() != static_cast<std::size_t>(n * d)) throw std::invalid_argument("shear: wrong point size");
  std::vector<long> out(point.size());
  const std::size_t jj = static_cast<std::size_t>((j_ - 1) * d);
  for (int k = 0; k < n; ++k)
    for (int ax = 0; ax < d; ++ax) {
      const std::size_t i = static_cast<std::size_t>(k * d + ax);
      out[i] = k == j_ - 1 ? -point[i] : point[i] - point[jj + static_cast<std::size_t>(ax)];
    }
  return out;
}

cplx TransposedKernel::at(std::span<const long> point) const {
  const auto z = shear(point);
  return base_.at(z);
}

double TransposedKernel::shear_norm() const {
  // The shear acts identically on every axis, so its norm is that of the
  // n x n matrix; power iteration on A^T A.
  const int n = base_.n();
  std::vector<std::vector<double>> a(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
  for (int r = 0; r < n; ++r) {
    if (r == j_ - 1) {
      a[r][j_ - 1] = -1.0;
    } else {
      a[r][r] = 1.0;
      a[r][j_ - 1] = -1.0;
    }
  }
  std::vector<double> v(static_cast<std::size_t>(n), 1.0), w(static_cast<std::size_t>(n));
  double norm2 = 0.0;
  for (int it = 0; it < 500; ++it) {
    std::vector<double> av(static_cast<std::size_t>(n), 0.0);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) av[r] += a[r][c] * v[c];
    for (int c = 0; c < n; ++c) {
      w[c] = 0.0;
      for (int r = 0; r < n; ++r) w[c] += a[r][c] * av[r];
    }
    double len = 0.0;
    for (double x : w) len += x * x;
    len = std::sqrt(len);
    double vlen = 0.0;
    for (double x : v) vlen += x * x;
    norm2 = len / std::sqrt(vlen);
    for (int c = 0; c < n; ++c) v[c] = w[c] / len;
  }
  return std::sqrt(norm2);
}

TransposedKernel transpose_kernel(const SampledKernel& kernel, int j) { return TransposedKernel(kernel, j); }

}  // namespace shiftlog
