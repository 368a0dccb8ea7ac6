#include <doctest.h>

#include <cmath>

#include "diagnostics.hpp"
#include "error.hpp"
#include "helpers.hpp"
#include "initial_data.hpp"

using namespace yamabe;
using namespace testing;

TEST_SUITE("experiment_cli") {

TEST_CASE("band-limited generator") {
  auto g = unit_grid(3, 32);
  auto one = gen_bandlimited(g, 7, 0.0, 4);
  CHECK(one.min() == 1.0);
  CHECK(one.max() == 1.0);

  auto a = gen_bandlimited(g, 7, 0.3, 4), b = gen_bandlimited(g, 7, 0.3, 4);
  CHECK(std::ranges::equal(a.values(), b.values()));
  CHECK(a.min() == doctest::Approx(std::exp(-0.3)).epsilon(1e-14));
  CHECK(a.max() == doctest::Approx(std::exp(0.3)).epsilon(1e-14));
  CHECK(a.min() == doctest::Approx(0.7408).epsilon(1e-4));
  CHECK(a.max() == doctest::Approx(1.3499).epsilon(1e-4));

  auto c = gen_bandlimited(g, 8, 0.3, 4);
  CHECK_FALSE(std::ranges::equal(a.values(), c.values()));

  CHECK_THROWS_AS(gen_bandlimited(g, 1, 0.3, 9), ValidationError);
  CHECK_THROWS_AS(gen_bandlimited(g, 1, 0.3, 0), ValidationError);
}

TEST_CASE("band-limited shape content") {
  auto g = unit_grid(3, 16);
  auto s = bandlimited_shape(g, 3, 2);
  CHECK(s.max_abs() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(integrate(s)) < 1e-14);
  // odd symmetry s(-x) = -s(x)
  for (std::size_t i = 0; i < s.size(); i += 11) {
    auto ijk = g.unravel(i);
    std::array<int, kMaxDim> neg{};
    for (int k = 0; k < 3; ++k) neg[k] = (16 - ijk[k]) % 16;
    CHECK(s[g.ravel(neg)] == -s[i]);
  }
  // no content beyond |k_j| <= kmax
  SpectralWorkspace ws(g);
  ws.forward(s);
  const auto* spec = ws.spectrum();
  double outside = 0, inside = 0;
  for (std::size_t q = 0; q < ws.mode_count(); ++q) {
    bool in = true;
    for (int k = 0; k < 3; ++k) in = in && std::abs(ws.mode_index(q, k)) <= 2;
    (in ? inside : outside) += std::abs(spec[q]);
  }
  CHECK(outside < 1e-12 * inside);
}

TEST_CASE("cosine generator") {
  auto g = unit_grid(3, 16);
  auto u = gen_cosine(g, 0.2, 1, 2);
  CHECK(u[0] == doctest::Approx(1.2));
  CHECK(u[g.ravel({0, 4, 0})] == doctest::Approx(0.8));
  CHECK(u[g.ravel({5, 0, 3})] == doctest::Approx(1.2));
}

TEST_CASE("amplitude calibration hits the curvature floor") {
  auto g = unit_grid(3, 32);
  DiffOps ops(g, DiffScheme::spectral);
  auto bg = Background::flat(g);
  for (double delta : {1.0, 0.25, 0.1}) {
    Shape shape;
    shape.seed = 5;
    auto m = calibrate_amplitude(bg, shape, delta, ops);
    CHECK(m.min_R <= -0.99 * delta);
    CHECK(m.min_R >= -delta);
    CHECK(scalar_curvature(m.metric, ops).min() == m.min_R);
    CHECK(m.amplitude > 0.0);
  }
}

TEST_CASE("single-mode calibration follows the linearization") {
  auto g = unit_grid(3, 32);
  DiffOps ops(g, DiffScheme::spectral);
  auto bg = Background::flat(g);
  Shape shape;
  shape.kind = Shape::Kind::cosine;
  for (double delta : {0.1, 0.01}) {
    auto m = calibrate_amplitude(bg, shape, delta, ops);
    // min R ~ -8 (2 pi)^2 a for small a
    CHECK(m.amplitude == doctest::Approx(delta / (8 * kTwoPi * kTwoPi)).epsilon(0.02));
  }
}

TEST_CASE("calibrated amplitude vanishes with delta") {
  auto g = unit_grid(3, 16);
  DiffOps ops(g, DiffScheme::spectral);
  auto bg = Background::flat(g);
  double prev = INFINITY;
  for (double delta : {1.0, 1e-2, 1e-4, 1e-6}) {
    auto m = calibrate_amplitude(bg, Shape{}, delta, ops);
    CHECK(m.amplitude < prev);
    prev = m.amplitude;
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("delta family") {
  auto g = unit_grid(3, 32);
  DiffOps ops(g, DiffScheme::spectral);
  auto bg = Background::flat(g);
  std::vector<double> deltas = {1.0, 0.5, 1.0 / 3, 0.25};
  auto fam = calibrate_delta_family(bg, Shape{}, 0, deltas, ops);
  REQUIRE(fam.size() == 4);
  for (std::size_t i = 0; i < fam.size(); ++i) {
    CHECK(fam[i].delta == deltas[i]);
    CHECK(fam[i].min_R >= -1.01 * deltas[i]);
    CHECK(fam[i].min_R <= -0.99 * deltas[i]);
    CHECK(assumptions_check(fam[i].metric, 2.0, 12.0, deltas[i], ops).all_passed());
    if (i > 0) CHECK(fam[i].amplitude < fam[i - 1].amplitude);
  }
  auto strided = calibrate_delta_family(bg, Shape{}, 3, {0.5, 0.5}, ops);
  CHECK(strided[1].seed == strided[0].seed + 3);
  CHECK_THROWS_AS(calibrate_delta_family(bg, Shape{}, 0, {0.5, 1.0}, ops), ValidationError);
  CHECK_THROWS_AS(calibrate_delta_family(bg, Shape{}, 0, {0.0}, ops), ValidationError);
}

TEST_CASE("calibration on a conformally flat background") {
  auto g = unit_grid(3, 16);
  DiffOps ops(g, DiffScheme::spectral);
  auto bg = Background::conformally_flat(gen_bandlimited(g, 2, 1e-5, 2), ops);
  double r0 = bg->scalar_curvature().min();
  auto m = calibrate_amplitude(bg, Shape{}, -r0 + 0.5, ops);
  CHECK(m.min_R >= -(-r0 + 0.5));
  CHECK(m.min_R <= -0.99 * (-r0 + 0.5));
}

TEST_CASE("config-driven builders") {
  ExperimentConfig cfg;
  cfg.grid.m = 16;
  cfg.initial.kind = "delta";
  cfg.diagnostics.delta = 0.2;
  DiffOps ops(make_grid(cfg.grid), DiffScheme::spectral);
  auto bg = make_background(cfg, ops);
  CHECK(bg->kind() == Background::Kind::flat);
  auto cm = make_initial_metric(cfg, bg, ops);
  double rmin = scalar_curvature(cm, ops).min();
  CHECK(rmin <= -0.99 * 0.2);
  CHECK(rmin >= -0.2);

  FieldSpec spec;
  spec.kind = "constant";
  spec.value = 2.0;
  spec.scale = 1.5;
  CHECK(make_field(spec, make_grid(cfg.grid)).max() == 3.0);
  spec.kind = "delta";
  CHECK_THROWS_AS(make_field(spec, make_grid(cfg.grid)), ValidationError);
}

}
