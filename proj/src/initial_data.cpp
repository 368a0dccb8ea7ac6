#include "initial_data.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "error.hpp"

namespace yamabe {

PeriodicGrid make_grid(const GridSpec& spec) { return PeriodicGrid(spec.n, spec.m, spec.lengths); }

ScalarField bandlimited_shape(const PeriodicGrid& grid, std::uint64_t seed, int kmax) {
  const int n = grid.dim();
  const int m = grid.points_per_axis();
  if (kmax < 1 || kmax > m / 4)
    throw ValidationError("bandlimited: kmax = " + std::to_string(kmax) + " must lie in [1, m/4 = " +
                          std::to_string(m / 4) + "] (aliasing guard)");
  // One amplitude per wavevector in the box [-kmax, kmax]^n, drawn in a fixed
  // order and damped by 1/(1 + |k|^2).
  const int side = 2 * kmax + 1;
  std::size_t box = 1;
  for (int k = 0; k < n; ++k) box *= std::size_t(side);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> amp(box);
  for (std::size_t b = 0; b < box; ++b) amp[b] = normal(rng);

  auto box_index = [&](const std::array<int, kMaxDim>& k) {
    std::size_t idx = 0;
    for (int a = 0; a < n; ++a) idx = idx * std::size_t(side) + std::size_t(k[a] + kmax);
    return idx;
  };
  // Canonical half space: first non-zero component positive.
  auto canonical = [&](const std::array<int, kMaxDim>& k) {
    for (int a = 0; a < n; ++a)
      if (k[a] != 0) return k[a] > 0;
    return false;
  };

  SpectralWorkspace ws(grid);
  std::vector<std::complex<double>> modes(ws.mode_count());
  const double total = double(grid.size());
  for (std::size_t q = 0; q < modes.size(); ++q) {
    std::array<int, kMaxDim> k{};
    bool inside = true;
    double k2 = 0.0;
    for (int a = 0; a < n; ++a) {
      k[a] = ws.mode_index(q, a);
      if (std::abs(k[a]) > kmax) inside = false;
      k2 += double(k[a]) * k[a];
    }
    if (!inside || k2 == 0.0) continue;
    // s = sum_{k in half} b_k sin(k.x): coefficient -i b/2 on k, +i b/2 on -k.
    std::array<int, kMaxDim> rep = k;
    double sign = 1.0;
    if (!canonical(k)) {
      for (int a = 0; a < n; ++a) rep[a] = -k[a];
      sign = -1.0;
    }
    double b = amp[box_index(rep)] / (1.0 + k2);
    modes[q] = std::complex<double>(0.0, -0.5 * sign * b * total);
  }
  ScalarField s(grid);
  ws.inverse(modes.data(), s);

  // Exact antisymmetry on the lattice: s[-i] = -s[i].
  ScalarField odd(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto ijk = grid.unravel(i);
    for (int a = 0; a < n; ++a) ijk[a] = -ijk[a];
    odd[i] = 0.5 * (s[i] - s[grid.ravel(ijk)]);
  }
  const double peak = odd.max_abs();
  if (!(peak > 0.0)) throw NumericalError("bandlimited: degenerate shape for seed " + std::to_string(seed));
  for (std::size_t i = 0; i < grid.size(); ++i) odd[i] /= peak;
  return odd;
}

ScalarField gen_bandlimited(const PeriodicGrid& grid, std::uint64_t seed, double amplitude, int kmax) {
  if (!std::isfinite(amplitude)) throw ValidationError("bandlimited: amplitude must be finite");
  ScalarField u = bandlimited_shape(grid, seed, kmax);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::exp(amplitude * u[i]);
  return u;
}

ScalarField gen_cosine(const PeriodicGrid& grid, double amplitude, int axis, int mode) {
  if (axis < 0 || axis >= grid.dim()) throw ValidationError("cosine: axis out of range");
  const double k = 2.0 * std::numbers::pi * mode / grid.length(axis);
  return field_from_fn(grid, [&](std::span<const double> x) { return 1.0 + amplitude * std::cos(k * x[axis]); });
}

ScalarField Shape::at(const PeriodicGrid& grid, double amplitude) const {
  if (kind == Kind::cosine) return gen_cosine(grid, amplitude, axis, 1);
  return gen_bandlimited(grid, seed, amplitude, kmax);
}

namespace {

struct MinCurvature {
  const std::shared_ptr<const Background>& bg;
  DiffOps& ops;
  // Shape evaluated once; u_a is formed pointwise from it.
  ScalarField base;
  Shape::Kind kind;

  ScalarField field(double a) const {
    ScalarField u(base.grid());
    for (std::size_t i = 0; i < u.size(); ++i)
      u[i] = kind == Shape::Kind::cosine ? 1.0 + a * base[i] : std::exp(a * base[i]);
    return u;
  }
  double operator()(double a) const { return scalar_curvature(ConformalMetric(bg, field(a)), ops).min(); }
};

}  // namespace

CalibratedMember calibrate_amplitude(const std::shared_ptr<const Background>& background, const Shape& shape,
                                     double delta, DiffOps& ops) {
  if (!(delta > 0.0)) throw ValidationError("calibrate: delta must be positive");
  const auto& grid = background->grid();
  ScalarField base = shape.kind == Shape::Kind::cosine ? gen_cosine(grid, 1.0, shape.axis, 1)
                                                       : bandlimited_shape(grid, shape.seed, shape.kmax);
  if (shape.kind == Shape::Kind::cosine)
    for (std::size_t i = 0; i < base.size(); ++i) base[i] -= 1.0;
  MinCurvature min_r{background, ops, std::move(base), shape.kind};

  auto fail = [&](const std::string& why) {
    std::ostringstream os;
    os << "calibrate: bisection bracket failure for delta = " << delta << " (seed " << shape.seed << "): " << why
       << "; try a different seed";
    throw NumericalError(os.str());
  };

  const double r0 = min_r(0.0);
  if (r0 < -delta) fail("min R at zero amplitude is already below -delta");
  // Linearised guess, then doubling until the bracket straddles -delta.
  const double a_cap = shape.kind == Shape::Kind::cosine ? 0.999 : 50.0;
  const double probe = 1e-6;
  double slope = (min_r(probe) - r0) / probe;
  double hi = slope < 0.0 ? std::min(a_cap, 2.0 * (delta + r0) / -slope) : 1e-3;
  if (!(hi > 0.0)) hi = 1e-3;
  int doublings = 0;
  while (min_r(hi) >= -delta) {
    if (hi >= a_cap || ++doublings > 60) fail("min R never reaches -delta");
    hi = std::min(a_cap, 2.0 * hi);
  }
  // Monotone over the bracket?
  double prev = r0;
  for (int k = 1; k <= 8; ++k) {
    double v = min_r(hi * k / 8.0);
    if (v > prev + 1e-9 * (1.0 + std::abs(prev))) fail("min R is not monotone in the amplitude");
    prev = v;
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (min_r(mid) >= -delta) lo = mid;
    else hi = mid;
  }
  const double r = min_r(lo);
  if (!(r >= -delta && r <= -0.99 * delta)) fail("bisection did not reach the 1% window");
  return CalibratedMember{delta, lo, r, shape.seed, ConformalMetric(background, min_r.field(lo))};
}

std::vector<CalibratedMember> calibrate_delta_family(const std::shared_ptr<const Background>& background,
                                                     Shape base_shape, std::uint64_t seed_stride,
                                                     const std::vector<double>& deltas, DiffOps& ops) {
  std::vector<CalibratedMember> out;
  out.reserve(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) throw ValidationError("calibrate: deltas must be positive");
    if (i > 0 && deltas[i] > deltas[i - 1]) throw ValidationError("calibrate: delta schedule must be non-increasing");
    Shape s = base_shape;
    s.seed = base_shape.seed + std::uint64_t(i) * seed_stride;
    out.push_back(calibrate_amplitude(background, s, deltas[i], ops));
  }
  return out;
}

ScalarField make_field(const FieldSpec& spec, const PeriodicGrid& grid) {
  ScalarField f(grid);
  if (spec.kind == "constant") f = ScalarField(grid, spec.value);
  else if (spec.kind == "cosine") f = gen_cosine(grid, spec.amplitude, spec.axis, spec.mode);
  else if (spec.kind == "bandlimited") f = gen_bandlimited(grid, spec.seed, spec.amplitude, spec.kmax);
  else throw ValidationError("make_field: generator \"" + spec.kind + "\" needs a calibration context");
  if (spec.scale != 1.0)
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= spec.scale;
  return f;
}

std::shared_ptr<const Background> make_background(const ExperimentConfig& cfg, DiffOps& ops) {
  PeriodicGrid grid = make_grid(cfg.grid);
  if (cfg.background.kind == "flat") return Background::flat(grid);
  return Background::conformally_flat(make_field(*cfg.background.v, grid), ops);
}

ConformalMetric make_initial_metric(const ExperimentConfig& cfg, const std::shared_ptr<const Background>& bg,
                                    DiffOps& ops) {
  if (cfg.initial.kind != "delta") return ConformalMetric(bg, make_field(cfg.initial, bg->grid()));
  Shape shape{Shape::Kind::bandlimited, cfg.initial.seed, cfg.initial.kmax, 0};
  auto member = calibrate_amplitude(bg, shape, cfg.diagnostics.delta, ops);
  ScalarField u = member.metric.u();
  if (cfg.initial.scale != 1.0)
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= cfg.initial.scale;
  return ConformalMetric(bg, std::move(u));
}

}  // namespace yamabe
