#include "torus_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace yamabe {

PeriodicGrid::PeriodicGrid(int n, int m, std::span<const double> lengths) : n_(n), m_(m) {
  if (n <= 2) throw ValidationError("dimension must satisfy n > 2 (got " + std::to_string(n) + ")");
  if (n > kMaxDim) throw ValidationError("dimension must satisfy n <= 4 (got " + std::to_string(n) + ")");
  if (m < 8 || (m & (m - 1)) != 0)
    throw ValidationError("points per axis must be a power of two >= 8 (got " + std::to_string(m) + ")");
  if (lengths.size() != std::size_t(n))
    throw ValidationError("expected " + std::to_string(n) + " side lengths, got " +
                          std::to_string(lengths.size()));
  for (int k = 0; k < n; ++k) {
    if (!(lengths[k] > 0.0) || !std::isfinite(lengths[k]))
      throw ValidationError("side length " + std::to_string(k) + " must be positive and finite");
    lengths_[k] = lengths[k];
  }
  std::size_t total = 1;
  for (int k = n - 1; k >= 0; --k) {
    strides_[k] = total;
    if (total > std::numeric_limits<std::size_t>::max() / std::size_t(m))
      throw ValidationError("grid too large");
    total *= std::size_t(m);
  }
  // 2^28 doubles is 2 GiB per field; anything larger is outside desk scale.
  if (total > (std::size_t(1) << 28)) throw ValidationError("grid too large: m^n exceeds 2^28 points");
  size_ = total;
}

double PeriodicGrid::min_spacing() const {
  double h = spacing(0);
  for (int k = 1; k < n_; ++k) h = std::min(h, spacing(k));
  return h;
}

double PeriodicGrid::volume() const {
  double v = 1.0;
  for (int k = 0; k < n_; ++k) v *= lengths_[k];
  return v;
}

std::array<int, kMaxDim> PeriodicGrid::unravel(std::size_t idx) const {
  std::array<int, kMaxDim> ijk{};
  for (int k = 0; k < n_; ++k) {
    ijk[k] = int(idx / strides_[k]);
    idx %= strides_[k];
  }
  return ijk;
}

std::size_t PeriodicGrid::ravel(const std::array<int, kMaxDim>& ijk) const {
  std::size_t idx = 0;
  for (int k = 0; k < n_; ++k) {
    int i = ((ijk[k] % m_) + m_) % m_;
    idx += std::size_t(i) * strides_[k];
  }
  return idx;
}

std::array<double, kMaxDim> PeriodicGrid::coords(std::size_t idx) const {
  auto ijk = unravel(idx);
  std::array<double, kMaxDim> x{};
  for (int k = 0; k < n_; ++k) x[k] = ijk[k] * spacing(k);
  return x;
}

PeriodicGrid make_grid(int n, int m, std::span<const double> lengths) {
  return PeriodicGrid(n, m, lengths);
}

ScalarField::ScalarField(const PeriodicGrid& grid, double fill)
    : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(const PeriodicGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw ValidationError("field has " + std::to_string(values_.size()) + " values, grid needs " +
                          std::to_string(grid_.size()));
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::max_abs() const {
  double r = 0.0;
  for (double x : values_) r = std::max(r, std::abs(x));
  return r;
}

std::size_t ScalarField::argmin() const {
  return std::size_t(std::min_element(values_.begin(), values_.end()) - values_.begin());
}

void ScalarField::require_finite(const char* context) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      std::ostringstream os;
      os << context << ": non-finite value " << values_[i] << " at index " << i;
      throw NumericalError(os.str());
    }
  }
}

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* context) {
  if (!(a.grid() == b.grid())) throw ValidationError(std::string(context) + ": grid mismatch");
}

ScalarField field_from_fn(const PeriodicGrid& grid, const PointFunction& f) {
  ScalarField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto x = grid.coords(i);
    double y = f(std::span<const double>(x.data(), std::size_t(grid.dim())));
    if (!std::isfinite(y)) {
      std::ostringstream os;
      os << "field_from_fn: non-finite sample " << y << " at index " << i;
      throw ValidationError(os.str());
    }
    out[i] = y;
  }
  return out;
}

double pairwise_sum(std::span<const double> xs) {
  constexpr std::size_t kBlock = 64;
  if (xs.size() <= kBlock) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double integrate(const ScalarField& f) {
  return pairwise_sum(f.values()) / double(f.size()) * f.grid().volume();
}

double integrate(const ScalarField& f, const ScalarField& weight) {
  require_same_grid(f, weight, "integrate");
  std::vector<double> prod(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) prod[i] = f[i] * weight[i];
  return pairwise_sum(prod) / double(f.size()) * f.grid().volume();
}

namespace {

// Calls body(i, axis, i_plus, i_minus) for each point and axis, with periodic
// neighbour indices.
template <typename Body>
void for_each_axis_neighbour(const PeriodicGrid& grid, Body&& body) {
  const int n = grid.dim();
  const int m = grid.points_per_axis();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto ijk = grid.unravel(i);
    for (int k = 0; k < n; ++k) {
      const std::size_t s = grid.stride(k);
      std::size_t ip = ijk[k] == m - 1 ? i - s * std::size_t(m - 1) : i + s;
      std::size_t im = ijk[k] == 0 ? i + s * std::size_t(m - 1) : i - s;
      body(i, k, ip, im);
    }
  }
}

}  // namespace

ScalarField laplacian_fd(const ScalarField& f) {
  const auto& grid = f.grid();
  ScalarField out(grid);
  std::array<double, kMaxDim> inv_h2{};
  for (int k = 0; k < grid.dim(); ++k) inv_h2[k] = 1.0 / (grid.spacing(k) * grid.spacing(k));
  for_each_axis_neighbour(grid, [&](std::size_t i, int k, std::size_t ip, std::size_t im) {
    out[i] += ((f[ip] - f[i]) - (f[i] - f[im])) * inv_h2[k];
  });
  return out;
}

ScalarField grad_inner_fd(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f, g, "grad_inner_fd");
  const auto& grid = f.grid();
  ScalarField out(grid);
  std::array<double, kMaxDim> inv_2h{};
  for (int k = 0; k < grid.dim(); ++k) inv_2h[k] = 0.5 / grid.spacing(k);
  for_each_axis_neighbour(grid, [&](std::size_t i, int k, std::size_t ip, std::size_t im) {
    out[i] += (f[ip] - f[im]) * inv_2h[k] * ((g[ip] - g[im]) * inv_2h[k]);
  });
  return out;
}

ScalarField shift(const ScalarField& f, int axis, int cells) {
  const auto& grid = f.grid();
  ScalarField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto ijk = grid.unravel(i);
    ijk[axis] += cells;
    out[grid.ravel(ijk)] = f[i];
  }
  return out;
}

}  // namespace yamabe
