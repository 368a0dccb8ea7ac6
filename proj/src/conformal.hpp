#pragma once

#include <cmath>
#include <memory>
#include <optional>

#include "spectral.hpp"
#include "torus_grid.hpp"

namespace yamabe {

/// Exponents of the conformal change g = u^{4/(n-2)} h in dimension n.
struct ConformalExponents {
  int n;
  double metric;     // 4/(n-2): g = u^metric h
  double critical;   // N = (n+2)/(n-2)
  double volume;     // 2n/(n-2): dmu_g = u^volume dmu_h
  double length;     // 2/(n-2): ds_g = u^length ds_h
  double laplace;    // 4(n-1)/(n-2), coefficient of the conformal Laplacian
  double reaction;   // (n-6)/(n-2), exponent of the R_h term of the flow

  explicit ConformalExponents(int dim);
};

/// x^e with an exact repeated-multiplication path when e is an integer.
inline double power(double x, double e) {
  if (e >= -16.0 && e <= 16.0) {
    const int r = int(e);
    if (double(r) == e) {
      const int k = r < 0 ? -r : r;
      double acc = 1.0;
      for (int i = 0; i < k; ++i) acc *= x;
      return r < 0 ? 1.0 / acc : acc;
    }
  }
  return std::pow(x, e);
}
ScalarField power(const ScalarField& f, double e);

/// Reference metric h: flat with the grid's side lengths, or v^{4/(n-2)} g_euc.
class Background {
 public:
  enum class Kind { flat, conformally_flat };

  static std::shared_ptr<const Background> flat(const PeriodicGrid& grid);
  /// Throws NumericalError unless v > 0 everywhere.
  static std::shared_ptr<const Background> conformally_flat(ScalarField v, DiffOps& ops);

  Kind kind() const { return kind_; }
  const PeriodicGrid& grid() const { return grid_; }
  const ConformalExponents& exponents() const { return exps_; }
  /// Present iff conformally flat.
  const std::optional<ScalarField>& factor() const { return v_; }
  const ScalarField& scalar_curvature() const { return r_h_; }
  double volume() const { return vol_h_; }
  /// Density of dmu_h with respect to dx (v^{2n/(n-2)}, or 1).
  const ScalarField& density() const { return density_; }
  /// Inverse metric scale v^{-4/(n-2)} (or 1).
  const ScalarField& inverse_scale() const { return inv_scale_; }
  /// log v (or 0).
  const ScalarField& log_factor() const { return log_v_; }

  /// Delta_h f = v^{-4/(n-2)} (Delta f + 2 grad log v . grad f).
  ScalarField laplacian(const ScalarField& f, DiffOps& ops) const;
  /// Integral of f against dmu_h.
  double integrate(const ScalarField& f) const;

  Background(Kind kind, const PeriodicGrid& grid);

 private:
  Kind kind_;
  PeriodicGrid grid_;
  ConformalExponents exps_;
  std::optional<ScalarField> v_;
  ScalarField r_h_;
  ScalarField density_;
  ScalarField inv_scale_;
  ScalarField log_v_;
  double vol_h_ = 0.0;
};

/// g = u^{4/(n-2)} h.
class ConformalMetric {
 public:
  /// Throws NumericalError (positivity) if u <= 0 somewhere and
  /// ValidationError on grid mismatch.
  ConformalMetric(std::shared_ptr<const Background> background, ScalarField u);

  const Background& background() const { return *background_; }
  const std::shared_ptr<const Background>& background_ptr() const { return background_; }
  const ScalarField& u() const { return u_; }
  const PeriodicGrid& grid() const { return u_.grid(); }
  const ConformalExponents& exponents() const { return background_->exponents(); }

 private:
  std::shared_ptr<const Background> background_;
  ScalarField u_;
};

void require_positive(const ScalarField& u, const char* context);

/// R_g = u^{-(n+2)/(n-2)} (R_h u - 4(n-1)/(n-2) Delta_h u).
ScalarField scalar_curvature(const ConformalMetric& cm, DiffOps& ops);
/// Delta_g f = u^{-4/(n-2)} (Delta_h f + 2 <grad_h log u, grad_h f>_h).
ScalarField conformal_laplacian(const ConformalMetric& cm, const ScalarField& f, DiffOps& ops);
/// Vol(M, g) = integral of u^{2n/(n-2)} dmu_h.
double volume(const ConformalMetric& cm);

enum class Measure { h, g };
/// (integral |f|^p dmu)^{1/p}; throws ValidationError for p <= 0.
double lp_norm(const ConformalMetric& cm, const ScalarField& f, double p, Measure measure);

/// w = log u - mean_h(log u).
ScalarField log_mean_field(const ConformalMetric& cm);
/// (integral u^eps dmu_h)(integral u^{-eps} dmu_h).
double moser_product(const ConformalMetric& cm, double eps);

/// Pointwise (u v)^{4/(n-2)}: g as a multiple of the Euclidean metric.
ScalarField composite_factor(const ConformalMetric& cm);

/// Graph shortest-path diameter estimate of g on the 3^n-1 neighbour stencil,
/// maximised over 8 fixed well-separated sources. An estimate, not the exact
/// diameter: the stencil metric slightly overestimates off-lattice directions.
double diameter_estimate(const ConformalMetric& cm);
/// Same estimate for the background metric h itself.
double diameter_estimate(const Background& background);

/// (integral |g1 - g2|_h^p dmu_h)^{1/p} with |g1 - g2|_h = sqrt(n)|u1^q - u2^q|.
double metric_lp_distance(const ConformalMetric& a, const ConformalMetric& b, double p);

bool same_background(const Background& a, const Background& b);

}  // namespace yamabe
