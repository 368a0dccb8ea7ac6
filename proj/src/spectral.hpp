#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "torus_grid.hpp"

namespace yamabe {

/// Precomputed wavenumber multipliers and FFT scratch for one grid.
///
/// Holds mutable scratch buffers: a workspace must not be used by two
/// operations at the same time. Create one per thread / trajectory.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(const PeriodicGrid& grid);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;
  SpectralWorkspace(SpectralWorkspace&&) noexcept;
  SpectralWorkspace& operator=(SpectralWorkspace&&) noexcept;

  const PeriodicGrid& grid() const;
  /// Number of stored (half-spectrum) modes.
  std::size_t mode_count() const;
  /// -|k|^2 for every stored mode (physical wavenumbers 2*pi*j/L).
  const std::vector<double>& laplacian_multipliers() const;

  // Low-level transforms used by the spectral operators. The forward result
  // is left in the workspace's spectrum buffer.
  void forward(const ScalarField& f);
  std::complex<double>* spectrum();
  /// Inverse transform of `modes` (length mode_count(), destroyed) into out,
  /// including the 1/m^n normalisation.
  void inverse(std::complex<double>* modes, ScalarField& out);
  /// Scratch spectrum of length mode_count().
  std::complex<double>* scratch();
  /// Signed integer wavenumber of the stored mode along `axis`; the Nyquist
  /// index reports m/2.
  int mode_index(std::size_t mode, int axis) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Euclidean Laplacian of the trigonometric interpolant of f.
ScalarField laplacian_spectral(const ScalarField& f, SpectralWorkspace& ws);
/// Spectral gradient of f along each axis (Nyquist component dropped).
std::vector<ScalarField> gradient_spectral(const ScalarField& f, SpectralWorkspace& ws);
/// Pointwise Euclidean inner product of spectral gradients.
ScalarField grad_inner(const ScalarField& f, const ScalarField& g, SpectralWorkspace& ws);

/// Which discrete differential operators a computation uses.
enum class DiffScheme { spectral, finite_difference };

/// Operator bundle: spectral primary path or FD oracle path behind one call site.
class DiffOps {
 public:
  DiffOps(const PeriodicGrid& grid, DiffScheme scheme);
  DiffScheme scheme() const { return scheme_; }
  const PeriodicGrid& grid() const { return grid_; }
  ScalarField laplacian(const ScalarField& f);
  ScalarField grad_inner(const ScalarField& f, const ScalarField& g);

 private:
  PeriodicGrid grid_;
  DiffScheme scheme_;
  std::unique_ptr<SpectralWorkspace> ws_;
};

}  // namespace yamabe
