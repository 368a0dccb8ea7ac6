#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "conformal.hpp"
#include "torus_grid.hpp"

namespace testing {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline yamabe::PeriodicGrid unit_grid(int n, int m) {
  std::vector<double> l(std::size_t(n), 1.0);
  return yamabe::PeriodicGrid(n, m, l);
}

inline double max_abs_diff(const yamabe::ScalarField& a, const yamabe::ScalarField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline yamabe::ConformalMetric flat_metric(const yamabe::ScalarField& u) {
  return yamabe::ConformalMetric(yamabe::Background::flat(u.grid()), u);
}

inline yamabe::ScalarField product(const yamabe::ScalarField& a, const yamabe::ScalarField& b) {
  yamabe::ScalarField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

}  // namespace testing
