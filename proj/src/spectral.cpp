#include "spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include "error.hpp"

namespace yamabe {

namespace {

// The FFTW planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

struct SpectralWorkspace::Impl {
  PeriodicGrid grid;
  std::size_t modes = 0;
  int half = 0;  // m/2 + 1, length of the last (halved) axis
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_complex* work = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  std::vector<double> lap;
  std::vector<int> index[kMaxDim];

  explicit Impl(const PeriodicGrid& g) : grid(g) {}
  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(spec);
    fftw_free(work);
  }
};

SpectralWorkspace::SpectralWorkspace(const PeriodicGrid& grid) : impl_(std::make_unique<Impl>(grid)) {
  auto& s = *impl_;
  const int n = grid.dim();
  const int m = grid.points_per_axis();
  s.half = m / 2 + 1;
  s.modes = grid.size() / std::size_t(m) * std::size_t(s.half);
  s.real = fftw_alloc_real(grid.size());
  s.spec = fftw_alloc_complex(s.modes);
  s.work = fftw_alloc_complex(s.modes);
  if (!s.real || !s.spec || !s.work) throw NumericalError("SpectralWorkspace: allocation failed");
  int dims[kMaxDim];
  for (int k = 0; k < n; ++k) dims[k] = m;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    s.fwd = fftw_plan_dft_r2c(n, dims, s.real, s.spec, FFTW_ESTIMATE);
    s.inv = fftw_plan_dft_c2r(n, dims, s.work, s.real, FFTW_ESTIMATE);
  }
  if (!s.fwd || !s.inv) throw NumericalError("SpectralWorkspace: FFT planning failed");

  for (int k = 0; k < n; ++k) {
    s.index[k].resize(s.modes);
    for (std::size_t q = 0; q < s.modes; ++q) {
      // Layout: axes 0..n-2 full length m, last axis length m/2+1.
      std::size_t rem = q;
      int j = 0;
      for (int a = n - 1; a >= k; --a) {
        std::size_t len = std::size_t(a == n - 1 ? s.half : m);
        j = int(rem % len);
        rem /= len;
      }
      s.index[k][q] = (k == n - 1 || j <= m / 2) ? j : j - m;
    }
  }

  s.lap.resize(s.modes);
  for (std::size_t q = 0; q < s.modes; ++q) {
    double k2 = 0.0;
    for (int k = 0; k < n; ++k) {
      double kk = 2.0 * std::numbers::pi * mode_index(q, k) / grid.length(k);
      k2 += kk * kk;
    }
    s.lap[q] = -k2;
  }
  s.lap[0] = 0.0;
}

SpectralWorkspace::~SpectralWorkspace() = default;
SpectralWorkspace::SpectralWorkspace(SpectralWorkspace&&) noexcept = default;
SpectralWorkspace& SpectralWorkspace::operator=(SpectralWorkspace&&) noexcept = default;

const PeriodicGrid& SpectralWorkspace::grid() const { return impl_->grid; }
std::size_t SpectralWorkspace::mode_count() const { return impl_->modes; }
const std::vector<double>& SpectralWorkspace::laplacian_multipliers() const { return impl_->lap; }

int SpectralWorkspace::mode_index(std::size_t mode, int axis) const {
  return impl_->index[axis][mode];
}

void SpectralWorkspace::forward(const ScalarField& f) {
  auto& s = *impl_;
  if (!(f.grid() == s.grid)) throw ValidationError("spectral operator: grid mismatch");
  std::memcpy(s.real, f.values().data(), sizeof(double) * f.size());
  fftw_execute(s.fwd);
}

std::complex<double>* SpectralWorkspace::spectrum() {
  return reinterpret_cast<std::complex<double>*>(impl_->spec);
}

std::complex<double>* SpectralWorkspace::scratch() {
  return reinterpret_cast<std::complex<double>*>(impl_->work);
}

void SpectralWorkspace::inverse(std::complex<double>* modes, ScalarField& out) {
  auto& s = *impl_;
  if (!(out.grid() == s.grid)) throw ValidationError("spectral operator: grid mismatch");
  auto* work = scratch();
  if (modes != work) std::memcpy(work, modes, sizeof(fftw_complex) * s.modes);
  fftw_execute(s.inv);
  const double scale = 1.0 / double(s.grid.size());
  auto v = out.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = s.real[i] * scale;
}

ScalarField laplacian_spectral(const ScalarField& f, SpectralWorkspace& ws) {
  ws.forward(f);
  auto* spec = ws.spectrum();
  auto* work = ws.scratch();
  const auto& lap = ws.laplacian_multipliers();
  for (std::size_t q = 0; q < ws.mode_count(); ++q) work[q] = spec[q] * lap[q];
  ScalarField out(f.grid());
  ws.inverse(work, out);
  return out;
}

std::vector<ScalarField> gradient_spectral(const ScalarField& f, SpectralWorkspace& ws) {
  const auto& grid = f.grid();
  const int n = grid.dim();
  const int m = grid.points_per_axis();
  ws.forward(f);
  auto* spec = ws.spectrum();
  auto* work = ws.scratch();
  std::vector<ScalarField> grad;
  grad.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double base = 2.0 * std::numbers::pi / grid.length(k);
    for (std::size_t q = 0; q < ws.mode_count(); ++q) {
      int j = ws.mode_index(q, k);
      double kk = (j == m / 2) ? 0.0 : base * j;
      work[q] = spec[q] * std::complex<double>(0.0, kk);
    }
    ScalarField d(grid);
    ws.inverse(work, d);
    grad.push_back(std::move(d));
  }
  return grad;
}

ScalarField grad_inner(const ScalarField& f, const ScalarField& g, SpectralWorkspace& ws) {
  require_same_grid(f, g, "grad_inner");
  auto gf = gradient_spectral(f, ws);
  auto gg = (&f == &g) ? gf : gradient_spectral(g, ws);
  ScalarField out(f.grid());
  for (std::size_t k = 0; k < gf.size(); ++k)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += gf[k][i] * gg[k][i];
  return out;
}

DiffOps::DiffOps(const PeriodicGrid& grid, DiffScheme scheme) : grid_(grid), scheme_(scheme) {
  if (scheme_ == DiffScheme::spectral) ws_ = std::make_unique<SpectralWorkspace>(grid);
}

ScalarField DiffOps::laplacian(const ScalarField& f) {
  if (scheme_ == DiffScheme::spectral) return laplacian_spectral(f, *ws_);
  if (!(f.grid() == grid_)) throw ValidationError("laplacian: grid mismatch");
  return laplacian_fd(f);
}

ScalarField DiffOps::grad_inner(const ScalarField& f, const ScalarField& g) {
  if (scheme_ == DiffScheme::spectral) return yamabe::grad_inner(f, g, *ws_);
  if (!(f.grid() == grid_)) throw ValidationError("grad_inner: grid mismatch");
  return grad_inner_fd(f, g);
}

}  // namespace yamabe
