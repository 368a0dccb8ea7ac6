#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "helpers.hpp"
#include "initial_data.hpp"

using namespace yamabe;
using namespace testing;

namespace {

ScalarField cosine(const PeriodicGrid& g, double a) {
  return field_from_fn(g, [a](auto x) { return 1.0 + a * std::cos(kTwoPi * x[0]); });
}

}  // namespace

TEST_SUITE("conformal_kernel") {

TEST_CASE("exponents") {
  ConformalExponents e3(3), e4(4);
  CHECK(e3.metric == 4);
  CHECK(e3.critical == 5);
  CHECK(e3.volume == 6);
  CHECK(e3.length == 2);
  CHECK(e3.laplace == 8);
  CHECK(e3.reaction == -3);
  CHECK(e4.metric == 2);
  CHECK(e4.critical == 3);
  CHECK(e4.volume == 4);
  CHECK(e4.length == 1);
  CHECK(e4.laplace == 6);
  CHECK(e4.reaction == -1);
}

TEST_CASE("integer powers are exact products") {
  double x = 1.2345678901234;
  CHECK(power(x, 6) == x * x * x * x * x * x);
  CHECK(power(x, -3) == doctest::Approx(1.0 / (x * x * x)).epsilon(1e-15));
  CHECK(power(x, 0) == 1.0);
  CHECK(power(2.0, 0.5) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("positivity is enforced") {
  auto g = unit_grid(3, 8);
  ScalarField u(g, 1.0);
  u[17] = -0.5;
  try {
    ConformalMetric cm(Background::flat(g), u);
    FAIL("negative factor accepted");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("positivity") != std::string::npos);
  }
  CHECK_THROWS_AS(ConformalMetric(Background::flat(g), ScalarField(unit_grid(3, 16), 1.0)), ValidationError);
}

TEST_CASE("scalar curvature of constants vanishes") {
  auto g = unit_grid(3, 16);
  DiffOps ops(g, DiffScheme::spectral);
  for (double c : {0.3, 1.0, 7.0}) CHECK(scalar_curvature(flat_metric(ScalarField(g, c)), ops).max_abs() == 0.0);
}

TEST_CASE("scalar curvature of a single mode") {
  auto g = unit_grid(3, 32);
  DiffOps ops(g, DiffScheme::spectral);
  auto R = scalar_curvature(flat_metric(cosine(g, 0.1)), ops);
  // R = -8 u^{-5} u'' with u = 1 + 0.1 cos(2 pi x)
  auto expect = field_from_fn(g, [](auto x) {
    double c = std::cos(kTwoPi * x[0]);
    return 0.8 * kTwoPi * kTwoPi * c / std::pow(1 + 0.1 * c, 5);
  });
  CHECK(max_abs_diff(R, expect) < 1e-10 * expect.max_abs());
  CHECK(R[0] == doctest::Approx(19.6095).epsilon(1e-4));
  CHECK(R.min() == doctest::Approx(-0.8 * kTwoPi * kTwoPi / std::pow(0.9, 5)).epsilon(1e-12));
  CHECK(R.min() == doctest::Approx(-53.48).epsilon(1e-3));
}

TEST_CASE("finite-difference path converges to the spectral curvature") {
  double err[2];
  for (int r = 0; r < 2; ++r) {
    auto g = unit_grid(3, 32 << r);
    DiffOps fd(g, DiffScheme::finite_difference), sp(g, DiffScheme::spectral);
    auto u = gen_bandlimited(g, 2, 0.2, 2);
    err[r] = max_abs_diff(scalar_curvature(flat_metric(u), fd), scalar_curvature(flat_metric(u), sp));
  }
  CHECK(std::log2(err[0] / err[1]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("composition of conformal factors") {
  auto g = unit_grid(3, 32);
  DiffOps ops(g, DiffScheme::spectral);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    auto v = gen_bandlimited(g, seed, 0.25, 2), u = gen_bandlimited(g, seed + 100, 0.25, 2);
    auto bg = Background::conformally_flat(v, ops);
    auto r1 = scalar_curvature(ConformalMetric(bg, u), ops);
    auto r2 = scalar_curvature(flat_metric(product(u, v)), ops);
    CHECK(max_abs_diff(r1, r2) <= 1e-8 * r2.max_abs());
  }
}

TEST_CASE("background caches") {
  auto g = unit_grid(3, 16);
  DiffOps ops(g, DiffScheme::spectral);
  auto flat = Background::flat(g);
  CHECK(flat->scalar_curvature().max_abs() == 0.0);
  CHECK(flat->volume() == 1.0);
  auto v = gen_bandlimited(g, 8, 0.2, 2);
  auto bg = Background::conformally_flat(v, ops);
  CHECK(max_abs_diff(bg->scalar_curvature(), scalar_curvature(flat_metric(v), ops)) == 0.0);
  CHECK(bg->volume() == doctest::Approx(volume(flat_metric(v))).epsilon(1e-14));
  ScalarField bad(g, 1.0);
  bad[3] = 0.0;
  CHECK_THROWS_AS(Background::conformally_flat(bad, ops), NumericalError);
}

TEST_CASE("constant rescaling of u rescales curvature") {
  auto g = unit_grid(3, 16);
  DiffOps ops(g, DiffScheme::spectral);
  auto v = gen_bandlimited(g, 5, 0.2, 2);
  auto bg = Background::conformally_flat(v, ops);
  auto u = gen_bandlimited(g, 6, 0.3, 2);
  auto R = scalar_curvature(ConformalMetric(bg, u), ops);
  for (double lambda : {0.5, 2.0, 10.0}) {
    ScalarField lu(g);
    for (std::size_t i = 0; i < u.size(); ++i) lu[i] = lambda * u[i];
    auto Rl = scalar_curvature(ConformalMetric(bg, lu), ops);
    double s = std::pow(lambda, -4.0);
    double err = 0;
    for (std::size_t i = 0; i < R.size(); ++i) err = std::max(err, std::abs(Rl[i] - s * R[i]));
    CHECK(err <= 1e-10 * s * R.max_abs());
  }
}

TEST_CASE("total scalar curvature identities") {
  auto g = unit_grid(3, 32);
  DiffOps ops(g, DiffScheme::spectral);
  auto u = gen_bandlimited(g, 12, 0.3, 2);
  auto cm = flat_metric(u);
  auto R = scalar_curvature(cm, ops);
  double total = integrate(R, power(u, 6.0));
  SpectralWorkspace ws(g);
  double dirichlet = 8.0 * integrate(grad_inner(u, u, ws));
  CHECK(total > 0.0);
  CHECK(total == doctest::Approx(dirichlet).epsilon(1e-8));

  auto v = gen_bandlimited(g, 13, 0.2, 2);
  auto bg = Background::conformally_flat(v, ops);
  ConformalMetric cmv(bg, u);
  auto Rv = scalar_curvature(cmv, ops);
  double lhs = bg->integrate(product(Rv, power(u, 6.0)));
  auto lap_h = bg->laplacian(u, ops);
  ScalarField integrand(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    integrand[i] = (bg->scalar_curvature()[i] * u[i] - 8.0 * lap_h[i]) * u[i];
  CHECK(lhs == doctest::Approx(bg->integrate(integrand)).epsilon(1e-8));
}

TEST_CASE("conformal laplacian") {
  auto g = unit_grid(3, 16);
  DiffOps ops(g, DiffScheme::spectral);
  auto f = gen_bandlimited(g, 21, 0.5, 3);
  auto u = gen_bandlimited(g, 22, 0.3, 2);
  CHECK(conformal_laplacian(flat_metric(u), ScalarField(g, 2.0), ops).max_abs() < 1e-10);
  CHECK(max_abs_diff(conformal_laplacian(flat_metric(ScalarField(g, 1.0)), f, ops), ops.laplacian(f)) < 1e-12);
  auto l4 = conformal_laplacian(flat_metric(ScalarField(g, 4.0)), f, ops);
  auto lf = ops.laplacian(f);
  for (std::size_t i = 0; i < f.size(); i += 7) CHECK(l4[i] == doctest::Approx(lf[i] / 256.0).epsilon(1e-12));

  // linear in f
  auto h = gen_bandlimited(g, 23, 0.5, 3);
  ScalarField comb(g);
  for (std::size_t i = 0; i < g.size(); ++i) comb[i] = 2.0 * f[i] - 3.0 * h[i];
  auto cm = flat_metric(u);
  auto lc = conformal_laplacian(cm, comb, ops);
  auto la = conformal_laplacian(cm, f, ops), lb = conformal_laplacian(cm, h, ops);
  double err = 0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(lc[i] - 2 * la[i] + 3 * lb[i]));
  CHECK(err < 1e-9 * lc.max_abs());
}

TEST_CASE("conformal laplacian matches the laplacian of the composite metric") {
  // Delta_g for h = v^4 euc, g = u^4 h equals Delta for (uv)^4 euc
  auto g = unit_grid(3, 32);
  DiffOps ops(g, DiffScheme::spectral);
  auto v = gen_bandlimited(g, 31, 0.2, 2), u = gen_bandlimited(g, 32, 0.2, 2), f = gen_bandlimited(g, 33, 0.5, 2);
  auto a = conformal_laplacian(ConformalMetric(Background::conformally_flat(v, ops), u), f, ops);
  auto b = conformal_laplacian(flat_metric(product(u, v)), f, ops);
  CHECK(max_abs_diff(a, b) < 1e-8 * b.max_abs());
}

TEST_CASE("volume") {
  auto g = unit_grid(3, 32);
  CHECK(volume(flat_metric(ScalarField(g, 1.0))) == 1.0);
  CHECK(volume(flat_metric(ScalarField(g, 2.0))) == doctest::Approx(64.0).epsilon(1e-15));
  // sum_k C(6,2k) 0.5^{2k} mean(cos^{2k})
  double expect = 1 + 15 * 0.25 * 0.5 + 15 * 0.0625 * 0.375 + 0.015625 * 0.3125;
  CHECK(volume(flat_metric(cosine(g, 0.5))) == doctest::Approx(expect).epsilon(1e-14));

  auto g4 = unit_grid(4, 8);
  CHECK(volume(flat_metric(ScalarField(g4, 2.0))) == doctest::Approx(16.0).epsilon(1e-15));
}

TEST_CASE("lp norms") {
  auto g = unit_grid(3, 32);
  auto cm = flat_metric(ScalarField(g, 1.0));
  CHECK(lp_norm(cm, ScalarField(g, 3.0), 2.0, Measure::h) == doctest::Approx(3.0).epsilon(1e-15));
  auto c = field_from_fn(g, [](auto x) { return std::cos(kTwoPi * x[0]); });
  CHECK(lp_norm(cm, c, 2.0, Measure::h) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK_THROWS_AS(lp_norm(cm, c, 0.0, Measure::h), ValidationError);
  CHECK_THROWS_AS(lp_norm(cm, c, -1.0, Measure::h), ValidationError);

  // dmu_g = u^6 dx: constant u = 2 multiplies the integral by 64
  auto cm2 = flat_metric(ScalarField(g, 2.0));
  CHECK(lp_norm(cm2, c, 1.0, Measure::g) == doctest::Approx(64.0 * lp_norm(cm2, c, 1.0, Measure::h)).epsilon(1e-14));

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto u = gen_bandlimited(g, seed, 0.5, 2);
    auto f = gen_bandlimited(g, seed + 10, 1.0, 3);
    auto m = flat_metric(u);
    for (auto meas : {Measure::h, Measure::g}) {
      double vol = meas == Measure::h ? 1.0 : volume(m);
      CHECK(lp_norm(m, f, 1.0, meas) <= lp_norm(m, f, 2.0, meas) * std::sqrt(vol) * (1 + 1e-14));
    }
  }
}

TEST_CASE("normalized log field") {
  auto g = unit_grid(3, 16);
  CHECK(log_mean_field(flat_metric(ScalarField(g, 3.0))).max_abs() < 1e-14);
  auto c = field_from_fn(g, [](auto x) { return std::cos(kTwoPi * x[0]); });
  auto ec = field_from_fn(g, [](auto x) { return std::exp(std::cos(kTwoPi * x[0])); });
  CHECK(max_abs_diff(log_mean_field(flat_metric(ec)), c) < 1e-14);

  auto s = gen_bandlimited(g, 4, 0.6, 2);
  ScalarField s2(g);
  for (std::size_t i = 0; i < g.size(); ++i) s2[i] = 2 * s[i];
  CHECK(max_abs_diff(log_mean_field(flat_metric(s)), log_mean_field(flat_metric(s2))) < 1e-14);

  DiffOps ops(g, DiffScheme::spectral);
  auto bg = Background::conformally_flat(gen_bandlimited(g, 5, 0.3, 2), ops);
  auto w = log_mean_field(ConformalMetric(bg, s));
  CHECK(std::abs(bg->integrate(w)) < 1e-10 * bg->volume());
}

TEST_CASE("moser product") {
  auto g = unit_grid(3, 16);
  CHECK(moser_product(flat_metric(ScalarField(g, 5.0)), 0.5) == doctest::Approx(1.0).epsilon(1e-14));

  // (int e^{cos})(int e^{-cos}) = I_0(1)^2; one-axis data, so m=4096 is the 1-d quadrature oracle
  auto g1 = unit_grid(3, 32);
  auto ec = field_from_fn(g1, [](auto x) { return std::exp(std::cos(kTwoPi * x[0])); });
  double i0 = std::cyl_bessel_i(0.0, 1.0);
  CHECK(moser_product(flat_metric(ec), 1.0) == doctest::Approx(i0 * i0).epsilon(1e-13));
  double quad_plus = 0, quad_minus = 0;
  for (int k = 0; k < 4096; ++k) {
    quad_plus += std::exp(std::cos(kTwoPi * k / 4096.0)) / 4096.0;
    quad_minus += std::exp(-std::cos(kTwoPi * k / 4096.0)) / 4096.0;
  }
  CHECK(quad_plus * quad_minus == doctest::Approx(i0 * i0).epsilon(1e-13));

  auto u = gen_bandlimited(g, 6, 0.7, 2);
  auto cm = flat_metric(u);
  double prev = 0;
  for (int k = 1; k <= 10; ++k) {
    double p = moser_product(cm, 0.1 * k);
    CHECK(p >= 1.0 - 1e-10);
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("diameter estimate") {
  auto g = unit_grid(3, 32);
  double d1 = diameter_estimate(flat_metric(ScalarField(g, 1.0)));
  CHECK(d1 == doctest::Approx(std::sqrt(3.0) / 2).epsilon(0.05));
  double d2 = diameter_estimate(flat_metric(ScalarField(g, 2.0)));
  CHECK(d2 == doctest::Approx(4.0 * d1).epsilon(1e-14));

  auto u = gen_bandlimited(g, 3, 0.3, 2);
  double du = diameter_estimate(flat_metric(u));
  for (double lambda : {0.5, 3.0}) {
    ScalarField lu(g);
    for (std::size_t i = 0; i < g.size(); ++i) lu[i] = lambda * u[i];
    CHECK(diameter_estimate(flat_metric(lu)) == doctest::Approx(lambda * lambda * du).epsilon(1e-13));
  }

  std::vector<double> l = {2.0, 1.0, 1.0};
  PeriodicGrid gl(3, 16, l);
  CHECK(diameter_estimate(*Background::flat(gl)) == doctest::Approx(std::sqrt(1.0 + 0.25 + 0.25)).epsilon(0.05));
}

TEST_CASE("diameter estimate under refinement") {
  std::vector<double> d;
  for (int m : {16, 32, 64}) {
    auto g = unit_grid(3, m);
    d.push_back(diameter_estimate(flat_metric(gen_bandlimited(g, 7, 0.3, 2))));
  }
  CHECK(std::abs(d[2] - d[1]) < 0.5 * std::abs(d[1] - d[0]));
  CHECK(std::abs(d[2] - d[1]) < 1e-2 * d[2]);
}

TEST_CASE("metric lp distance") {
  auto g = unit_grid(3, 16);
  auto bg = Background::flat(g);
  auto u = gen_bandlimited(g, 3, 0.3, 2);
  ConformalMetric a(bg, u);
  CHECK(metric_lp_distance(a, a, 1.0) == 0.0);
  ConformalMetric one(bg, ScalarField(g, 1.0)), two(bg, ScalarField(g, std::pow(2.0, 0.25)));
  CHECK(metric_lp_distance(one, two, 1.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  ConformalMetric b(bg, gen_bandlimited(g, 4, 0.3, 2));
  for (double p : {0.5, 1.0, 2.0}) CHECK(metric_lp_distance(a, b, p) == metric_lp_distance(b, a, p));

  DiffOps ops(g, DiffScheme::spectral);
  ConformalMetric c(Background::conformally_flat(gen_bandlimited(g, 9, 0.2, 2), ops), u);
  CHECK_THROWS_AS(metric_lp_distance(a, c, 1.0), ValidationError);
}

}
