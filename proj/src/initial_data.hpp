#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "config.hpp"
#include "conformal.hpp"

namespace yamabe {

/// Seeded odd band-limited shape: a sine series over wavevectors with
/// |k_j| <= kmax, antisymmetrised on the lattice so that s(-x) = -s(x)
/// exactly. Zero mean, max|s| = 1. Throws ValidationError if kmax > m/4.
ScalarField bandlimited_shape(const PeriodicGrid& grid, std::uint64_t seed, int kmax);

/// u = exp(amplitude * s) with s = bandlimited_shape(grid, seed, kmax).
ScalarField gen_bandlimited(const PeriodicGrid& grid, std::uint64_t seed, double amplitude, int kmax);

/// 1 + amplitude cos(2 pi mode x_axis / L_axis).
ScalarField gen_cosine(const PeriodicGrid& grid, double amplitude, int axis = 0, int mode = 1);

/// One-parameter family u_a used for amplitude calibration.
struct Shape {
  enum class Kind { bandlimited, cosine } kind = Kind::bandlimited;
  std::uint64_t seed = 1;
  int kmax = 2;
  int axis = 0;

  ScalarField at(const PeriodicGrid& grid, double amplitude) const;
};

struct CalibratedMember {
  double delta = 0.0;
  double amplitude = 0.0;
  double min_R = 0.0;
  std::uint64_t seed = 0;
  ConformalMetric metric;
};

/// Bisection on the amplitude a of u_a so that min R_g(u_a) = -delta, from
/// the admissible side (min R in [-delta, -0.99 delta]). Throws
/// NumericalError when min R is not monotone over the bracket.
CalibratedMember calibrate_amplitude(const std::shared_ptr<const Background>& background, const Shape& shape,
                                     double delta, DiffOps& ops);

/// Calibrates one member per delta; member i (1-based) uses seed
/// base_seed + (i-1) * seed_stride. The schedule must be positive and
/// non-increasing.
std::vector<CalibratedMember> calibrate_delta_family(const std::shared_ptr<const Background>& background,
                                                     Shape base_shape, std::uint64_t seed_stride,
                                                     const std::vector<double>& deltas, DiffOps& ops);

/// Builds the background described by a config.
std::shared_ptr<const Background> make_background(const ExperimentConfig& cfg, DiffOps& ops);
/// Builds a field from a generator spec ("delta" needs the background).
ScalarField make_field(const FieldSpec& spec, const PeriodicGrid& grid);
ConformalMetric make_initial_metric(const ExperimentConfig& cfg, const std::shared_ptr<const Background>& bg,
                                    DiffOps& ops);

PeriodicGrid make_grid(const GridSpec& spec);

}  // namespace yamabe
