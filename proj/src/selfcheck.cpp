#include "selfcheck.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <algorithm>
#include <functional>
#include <numbers>

#include "diagnostics.hpp"
#include "error.hpp"
#include "initial_data.hpp"

namespace yamabe {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

PeriodicGrid unit_grid(int n, int m) {
  std::vector<double> l(n, 1.0);
  return PeriodicGrid(n, m, l);
}

using Check = std::function<std::pair<bool, std::string>()>;

void run(std::vector<CheckResult>& out, const char* suite, const char* name, const Check& fn) {
  CheckResult r{suite, name, false, ""};
  try {
    auto [ok, detail] = fn();
    r.passed = ok;
    r.detail = detail;
  } catch (const std::exception& e) {
    r.detail = std::string("exception: ") + e.what();
  }
  out.push_back(std::move(r));
}

void grid_suite(std::vector<CheckResult>& out) {
  run(out, "grid", "spectral_laplacian_exact_on_modes", [] {
    auto g = unit_grid(3, 16);
    auto f = field_from_fn(g, [](auto x) { return std::sin(kTwoPi * x[0]) * std::cos(2 * kTwoPi * x[2]); });
    DiffOps ops(g, DiffScheme::spectral);
    auto lap = ops.laplacian(f);
    double err = 0;
    for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(lap[i] + 5 * kTwoPi * kTwoPi * f[i]));
    return std::pair{err < 1e-9, "max error " + num(err)};
  });
  run(out, "grid", "fd_laplacian_second_order", [] {
    double e[2];
    for (int k = 0; k < 2; ++k) {
      auto g = unit_grid(3, 16 << k);
      auto f = field_from_fn(g, [](auto x) { return std::sin(kTwoPi * x[1]); });
      auto lap = laplacian_fd(f);
      e[k] = 0;
      for (std::size_t i = 0; i < f.size(); ++i) e[k] = std::max(e[k], std::abs(lap[i] + kTwoPi * kTwoPi * f[i]));
    }
    double order = std::log2(e[0] / e[1]);
    return std::pair{std::abs(order - 2.0) < 0.1, "observed order " + num(order)};
  });
  run(out, "grid", "integral_of_constant_is_volume", [] {
    std::vector<double> l = {1.0, 2.0, 0.5, 1.5};
    PeriodicGrid g(4, 8, l);
    double err = std::abs(integrate(ScalarField(g, 3.0)) - 3.0 * 1.5);
    return std::pair{err < 1e-12, "error " + num(err)};
  });
  run(out, "grid", "shift_round_trip", [] {
    auto g = unit_grid(3, 8);
    auto f = field_from_fn(g, [](auto x) { return x[0] + 10 * x[1] + 100 * x[2]; });
    auto back = shift(shift(f, 1, 3), 1, -3);
    return std::pair{std::ranges::equal(back.values(), f.values()), std::string("bitwise")};
  });
}

void flow_suite(std::vector<CheckResult>& out) {
  run(out, "flow", "static_fixed_point", [] {
    auto g = unit_grid(3, 16);
    ConformalMetric cm(Background::flat(g), ScalarField(g, 1.0));
    DiffOps ops(g, DiffScheme::spectral);
    FlowState s{0.0, cm, 0};
    for (int k = 0; k < 100; ++k) s = step_rk4(s, 1e-4, ops, 1e-8);
    double err = 0;
    for (double x : s.cm.u().values()) err = std::max(err, std::abs(x - 1.0));
    return std::pair{err <= 1e-12, "max |u-1| " + num(err)};
  });
  run(out, "flow", "linear_mode_decay_rate", [] {
    auto g = unit_grid(3, 16);
    const double eps = 1e-4, T = 0.005;
    ConformalMetric cm(Background::flat(g), gen_cosine(g, eps));
    DiffOps ops(g, DiffScheme::spectral);
    FlowConfig cfg;
    cfg.t_max = T;
    cfg.tol_R = 0;
    auto res = run_flow(cm, cfg, ops, nullptr);
    const auto& u = res.final_state.cm.u();
    double a = 0.5 * (u[0] - u[g.stride(0) * 8]);
    double rate = -std::log(a / eps) / T;
    double expect = 2.0 * kTwoPi * kTwoPi;
    return std::pair{std::abs(rate / expect - 1) < 0.01, "rate " + num(rate) + " vs " + num(expect)};
  });
  run(out, "flow", "min_max_principle", [] {
    auto g = unit_grid(3, 16);
    ConformalMetric cm(Background::flat(g), gen_cosine(g, 0.1));
    DiffOps ops(g, DiffScheme::spectral);
    FlowConfig cfg;
    FlowState s{0.0, cm, 0};
    double dt = stable_dt(cm, cfg), worst = 0;
    for (int k = 0; k < 200; ++k) {
      auto next = step_rk4(s, dt, ops, 1e-8);
      worst = std::max({worst, s.cm.u().min() - next.cm.u().min(), next.cm.u().max() - s.cm.u().max()});
      s = std::move(next);
    }
    return std::pair{worst <= 1e-10, "worst violation " + num(worst)};
  });
  run(out, "flow", "degeneracy_detected", [] {
    auto g = unit_grid(3, 8);
    ConformalMetric cm(Background::flat(g), gen_cosine(g, 0.5));
    DiffOps ops(g, DiffScheme::spectral);
    try {
      step_rk4(FlowState{0.0, cm, 0}, 1.0, ops, 1e-8);
    } catch (const NumericalError&) {
      return std::pair{true, std::string("NumericalError raised")};
    }
    return std::pair{false, std::string("oversized step was accepted")};
  });
}

void diagnostics_suite(std::vector<CheckResult>& out) {
  run(out, "diagnostics", "p0_thresholds", [] {
    double e3 = std::abs(p0_threshold(3) - 9.9), e4 = std::abs(p0_threshold(4) - 22.0 / 3.0);
    return std::pair{e3 < 1e-12 && e4 < 1e-12, "n=3 " + num(p0_threshold(3)) + ", n=4 " + num(p0_threshold(4))};
  });
  run(out, "diagnostics", "moser_ratio_at_least_one", [] {
    auto g = unit_grid(3, 16);
    ConformalMetric cm(Background::flat(g), gen_bandlimited(g, 3, 0.4, 2));
    double ratio = moser_product(cm, 0.5) / (cm.background().volume() * cm.background().volume());
    return std::pair{ratio >= 1 - 1e-10, "ratio " + num(ratio)};
  });
  run(out, "diagnostics", "curvature_composition", [] {
    auto g = unit_grid(3, 32);
    DiffOps ops(g, DiffScheme::spectral);
    ScalarField v = gen_bandlimited(g, 5, 0.2, 2), u = gen_bandlimited(g, 6, 0.2, 2);
    ScalarField uv(g);
    for (std::size_t i = 0; i < uv.size(); ++i) uv[i] = u[i] * v[i];
    auto r1 = scalar_curvature(ConformalMetric(Background::conformally_flat(v, ops), u), ops);
    auto r2 = scalar_curvature(ConformalMetric(Background::flat(g), uv), ops);
    double err = 0;
    for (std::size_t i = 0; i < r1.size(); ++i) err = std::max(err, std::abs(r1[i] - r2[i]));
    err /= std::max(1.0, r2.max_abs());
    return std::pair{err < 1e-8, "relative error " + num(err)};
  });
  run(out, "diagnostics", "volume_identity", [] {
    auto g = unit_grid(3, 16);
    ConformalMetric cm(Background::flat(g), gen_cosine(g, 0.1));
    DiffOps ops(g, DiffScheme::spectral);
    FlowState s0{0.0, cm, 0};
    FlowState s1 = step_rk4(s0, 1e-5, ops, 1e-8);
    double res = volume_identity_residual(s1, s0, ops);
    return std::pair{res < 1e-6, "residual " + num(res)};
  });
  run(out, "diagnostics", "flat_distance_of_constant", [] {
    auto g = unit_grid(3, 8);
    double d = flat_distance(ConformalMetric(Background::flat(g), ScalarField(g, 1.7)));
    return std::pair{d < 1e-15, "distance " + num(d)};
  });
}

}  // namespace

std::vector<CheckResult> run_selfcheck(const std::string& suite) {
  if (suite != "all" && suite != "grid" && suite != "flow" && suite != "diagnostics")
    throw ValidationError("check: unknown suite \"" + suite + "\" (expected all, grid, flow or diagnostics)");
  std::vector<CheckResult> out;
  if (suite == "all" || suite == "grid") grid_suite(out);
  if (suite == "all" || suite == "flow") flow_suite(out);
  if (suite == "all" || suite == "diagnostics") diagnostics_suite(out);
  return out;
}

}  // namespace yamabe
