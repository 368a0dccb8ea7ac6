#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace yamabe {

inline constexpr int kMaxDim = 4;

/// Uniform periodic lattice on the n-torus [0,L_1) x ... x [0,L_n).
/// Points are stored in row-major order: axis 0 varies slowest.
class PeriodicGrid {
 public:
  /// Throws ValidationError unless 3 <= n <= 4, m is a power of two >= 8
  /// and every length is positive.
  PeriodicGrid(int n, int m, std::span<const double> lengths);

  int dim() const { return n_; }
  int points_per_axis() const { return m_; }
  std::size_t size() const { return size_; }
  double length(int axis) const { return lengths_[axis]; }
  double spacing(int axis) const { return lengths_[axis] / m_; }
  double min_spacing() const;
  /// Product of the side lengths (Euclidean volume).
  double volume() const;
  std::span<const double> lengths() const { return {lengths_.data(), std::size_t(n_)}; }

  std::size_t stride(int axis) const { return strides_[axis]; }
  /// Lattice multi-index of a linear index.
  std::array<int, kMaxDim> unravel(std::size_t idx) const;
  std::size_t ravel(const std::array<int, kMaxDim>& ijk) const;
  /// Coordinates of a lattice point; entries past dim() are zero.
  std::array<double, kMaxDim> coords(std::size_t idx) const;

  friend bool operator==(const PeriodicGrid& a, const PeriodicGrid& b) {
    return a.n_ == b.n_ && a.m_ == b.m_ && a.lengths_ == b.lengths_;
  }

 private:
  int n_;
  int m_;
  std::array<double, kMaxDim> lengths_{};
  std::array<std::size_t, kMaxDim> strides_{};
  std::size_t size_;
};

PeriodicGrid make_grid(int n, int m, std::span<const double> lengths);

/// Real samples on a PeriodicGrid.
class ScalarField {
 public:
  explicit ScalarField(const PeriodicGrid& grid, double fill = 0.0);
  ScalarField(const PeriodicGrid& grid, std::vector<double> values);

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  double min() const;
  double max() const;
  double max_abs() const;
  std::size_t argmin() const;
  /// Throws NumericalError naming the first non-finite entry.
  void require_finite(const char* context) const;

 private:
  PeriodicGrid grid_;
  std::vector<double> values_;
};

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* context);

using PointFunction = std::function<double(std::span<const double>)>;

/// Samples f at every lattice point; non-finite samples are rejected.
ScalarField field_from_fn(const PeriodicGrid& grid, const PointFunction& f);

/// Pairwise (cascade) summation with a fixed reduction tree.
double pairwise_sum(std::span<const double> xs);

/// Periodic trapezoidal rule: mean(f * weight) * prod(L).
double integrate(const ScalarField& f);
double integrate(const ScalarField& f, const ScalarField& weight);

/// Second-order centred 2n-point Laplacian with periodic wraparound.
ScalarField laplacian_fd(const ScalarField& f);
/// Second-order centred gradient inner product (FD companion of grad_inner).
ScalarField grad_inner_fd(const ScalarField& f, const ScalarField& g);

/// Cyclic shift by `cells` lattice cells along `axis`: out[i] = f[i - cells].
ScalarField shift(const ScalarField& f, int axis, int cells);

}  // namespace yamabe
