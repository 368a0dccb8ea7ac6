#include "conformal.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "error.hpp"

namespace yamabe {

ConformalExponents::ConformalExponents(int dim)
    : n(dim),
      metric(4.0 / (dim - 2)),
      critical(double(dim + 2) / (dim - 2)),
      volume(2.0 * dim / (dim - 2)),
      length(2.0 / (dim - 2)),
      laplace(4.0 * (dim - 1) / (dim - 2)),
      reaction(double(dim - 6) / (dim - 2)) {}

namespace {

// Same multiplication order as the scalar power().
template <int K>
void integer_power(const double* in, double* out, std::size_t size, bool invert) {
  for (std::size_t i = 0; i < size; ++i) {
    double acc = 1.0;
    for (int k = 0; k < K; ++k) acc *= in[i];
    out[i] = invert ? 1.0 / acc : acc;
  }
}

}  // namespace

ScalarField power(const ScalarField& f, double e) {
  ScalarField out(f.grid());
  const double* in = f.values().data();
  double* dst = out.values().data();
  const std::size_t size = f.size();
  const int r = e >= -16.0 && e <= 16.0 ? int(e) : 0;
  const bool integral = e >= -16.0 && e <= 16.0 && double(r) == e;
  const bool invert = r < 0;
  switch (integral ? (r < 0 ? -r : r) : -1) {
    case 1: integer_power<1>(in, dst, size, invert); break;
    case 2: integer_power<2>(in, dst, size, invert); break;
    case 3: integer_power<3>(in, dst, size, invert); break;
    case 4: integer_power<4>(in, dst, size, invert); break;
    case 5: integer_power<5>(in, dst, size, invert); break;
    case 6: integer_power<6>(in, dst, size, invert); break;
    default:
      for (std::size_t i = 0; i < size; ++i) dst[i] = power(in[i], e);
  }
  return out;
}

void require_positive(const ScalarField& u, const char* context) {
  std::size_t at = u.argmin();
  if (!(u[at] > 0.0) || !std::isfinite(u[at])) {
    std::ostringstream os;
    os << context << ": positivity violation, min value " << u[at] << " at index " << at;
    throw NumericalError(os.str());
  }
  u.require_finite(context);
}

Background::Background(Kind kind, const PeriodicGrid& grid)
    : kind_(kind),
      grid_(grid),
      exps_(grid.dim()),
      r_h_(grid),
      density_(grid, 1.0),
      inv_scale_(grid, 1.0),
      log_v_(grid) {
  vol_h_ = grid.volume();
}

std::shared_ptr<const Background> Background::flat(const PeriodicGrid& grid) {
  return std::make_shared<const Background>(Kind::flat, grid);
}

std::shared_ptr<const Background> Background::conformally_flat(ScalarField v, DiffOps& ops) {
  require_positive(v, "conformally flat background");
  auto bg = std::make_shared<Background>(Kind::conformally_flat, v.grid());
  const auto& e = bg->exps_;
  // R_h = -4(n-1)/(n-2) v^{-(n+2)/(n-2)} Delta v
  ScalarField lap_v = ops.laplacian(v);
  for (std::size_t i = 0; i < v.size(); ++i) {
    bg->r_h_[i] = -e.laplace * power(v[i], -e.critical) * lap_v[i];
    bg->density_[i] = power(v[i], e.volume);
    bg->inv_scale_[i] = power(v[i], -e.metric);
    bg->log_v_[i] = std::log(v[i]);
  }
  bg->r_h_.require_finite("background scalar curvature");
  bg->vol_h_ = yamabe::integrate(bg->density_);
  bg->v_ = std::move(v);
  return bg;
}

ScalarField Background::laplacian(const ScalarField& f, DiffOps& ops) const {
  ScalarField lap = ops.laplacian(f);
  if (kind_ == Kind::flat) return lap;
  ScalarField cross = ops.grad_inner(log_v_, f);
  for (std::size_t i = 0; i < lap.size(); ++i) lap[i] = inv_scale_[i] * (lap[i] + 2.0 * cross[i]);
  return lap;
}

double Background::integrate(const ScalarField& f) const {
  if (kind_ == Kind::flat) return yamabe::integrate(f);
  return yamabe::integrate(f, density_);
}

ConformalMetric::ConformalMetric(std::shared_ptr<const Background> background, ScalarField u)
    : background_(std::move(background)), u_(std::move(u)) {
  if (!background_) throw ValidationError("conformal metric: missing background");
  if (!(background_->grid() == u_.grid())) throw ValidationError("conformal metric: grid of u does not match background");
  require_positive(u_, "conformal factor u");
}

ScalarField scalar_curvature(const ConformalMetric& cm, DiffOps& ops) {
  const auto& bg = cm.background();
  const auto& e = cm.exponents();
  const auto& u = cm.u();
  ScalarField lap_u = bg.laplacian(u, ops);
  const auto& r_h = bg.scalar_curvature();
  ScalarField r = power(u, -e.critical);
  for (std::size_t i = 0; i < u.size(); ++i) r[i] *= r_h[i] * u[i] - e.laplace * lap_u[i];
  r.require_finite("scalar_curvature");
  return r;
}

ScalarField conformal_laplacian(const ConformalMetric& cm, const ScalarField& f, DiffOps& ops) {
  require_same_grid(cm.u(), f, "conformal_laplacian");
  const auto& bg = cm.background();
  const auto& e = cm.exponents();
  const auto& u = cm.u();
  ScalarField log_u(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) log_u[i] = std::log(u[i]);
  ScalarField lap_h = bg.laplacian(f, ops);
  ScalarField cross = ops.grad_inner(log_u, f);
  const auto& inv_scale = bg.inverse_scale();
  ScalarField out = power(u, -e.metric);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] *= lap_h[i] + 2.0 * inv_scale[i] * cross[i];
  out.require_finite("conformal_laplacian");
  return out;
}

double volume(const ConformalMetric& cm) {
  return cm.background().integrate(power(cm.u(), cm.exponents().volume));
}

double lp_norm(const ConformalMetric& cm, const ScalarField& f, double p, Measure measure) {
  if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("lp_norm: exponent p must be positive");
  require_same_grid(cm.u(), f, "lp_norm");
  const auto& u = cm.u();
  const double vol_exp = cm.exponents().volume;
  ScalarField integrand(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) {
    double w = power(std::abs(f[i]), p);
    if (measure == Measure::g) w *= power(u[i], vol_exp);
    integrand[i] = w;
  }
  return std::pow(cm.background().integrate(integrand), 1.0 / p);
}

ScalarField log_mean_field(const ConformalMetric& cm) {
  const auto& u = cm.u();
  ScalarField w(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) w[i] = std::log(u[i]);
  const double mean = cm.background().integrate(w) / cm.background().volume();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= mean;
  return w;
}

double moser_product(const ConformalMetric& cm, double eps) {
  if (!(eps > 0.0)) throw ValidationError("moser_product: epsilon must be positive");
  const auto& u = cm.u();
  ScalarField up(u.grid()), down(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) {
    up[i] = std::pow(u[i], eps);
    down[i] = 1.0 / up[i];
  }
  const auto& bg = cm.background();
  return bg.integrate(up) * bg.integrate(down);
}

ScalarField composite_factor(const ConformalMetric& cm) {
  const auto& u = cm.u();
  const auto& e = cm.exponents();
  ScalarField f(u.grid());
  const auto& v = cm.background().factor();
  for (std::size_t i = 0; i < u.size(); ++i) {
    double uv = v ? u[i] * (*v)[i] : u[i];
    f[i] = power(uv, e.metric);
  }
  return f;
}

namespace {

// Largest shortest-path distance from each of 8 fixed sources, with edge
// weight |step| * mean of the endpoint length factors.
double graph_diameter(const PeriodicGrid& grid, const std::vector<double>& length_factor) {
  const int n = grid.dim();
  const int m = grid.points_per_axis();

  struct Offset {
    std::array<int, kMaxDim> d;
    double len;
  };
  std::vector<Offset> offsets;
  int total = 1;
  for (int k = 0; k < n; ++k) total *= 3;
  for (int code = 0; code < total; ++code) {
    Offset o{};
    int c = code;
    bool zero = true;
    double len2 = 0.0;
    for (int k = 0; k < n; ++k) {
      o.d[k] = c % 3 - 1;
      c /= 3;
      if (o.d[k] != 0) zero = false;
      double s = o.d[k] * grid.spacing(k);
      len2 += s * s;
    }
    if (zero) continue;
    o.len = std::sqrt(len2);
    offsets.push_back(o);
  }

  double best = 0.0;
  std::vector<double> dist(grid.size());
  using Entry = std::pair<double, std::size_t>;
  for (int src = 0; src < 8; ++src) {
    std::array<int, kMaxDim> s{};
    int parity = 0;
    for (int k = 0; k < 3; ++k) {
      int b = (src >> k) & 1;
      s[k] = b * (m / 2);
      parity ^= b;
    }
    if (n == 4) s[3] = parity * (m / 2);
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    std::size_t s_idx = grid.ravel(s);
    dist[s_idx] = 0.0;
    queue.push({0.0, s_idx});
    while (!queue.empty()) {
      auto [d, i] = queue.top();
      queue.pop();
      if (d > dist[i]) continue;
      auto ijk = grid.unravel(i);
      for (const auto& o : offsets) {
        std::array<int, kMaxDim> nb{};
        for (int k = 0; k < n; ++k) nb[k] = ijk[k] + o.d[k];
        std::size_t j = grid.ravel(nb);
        double nd = d + o.len * 0.5 * (length_factor[i] + length_factor[j]);
        if (nd < dist[j]) {
          dist[j] = nd;
          queue.push({nd, j});
        }
      }
    }
    for (double d : dist) best = std::max(best, d);
  }
  return best;
}

}  // namespace

double diameter_estimate(const ConformalMetric& cm) {
  const auto& u = cm.u();
  const auto& e = cm.exponents();
  const auto& v = cm.background().factor();
  std::vector<double> factor(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    double uv = v ? u[i] * (*v)[i] : u[i];
    factor[i] = power(uv, e.length);
  }
  return graph_diameter(cm.grid(), factor);
}

double diameter_estimate(const Background& background) {
  const auto& v = background.factor();
  std::vector<double> factor(background.grid().size(), 1.0);
  if (v)
    for (std::size_t i = 0; i < factor.size(); ++i) factor[i] = power((*v)[i], background.exponents().length);
  return graph_diameter(background.grid(), factor);
}

bool same_background(const Background& a, const Background& b) {
  if (&a == &b) return true;
  if (a.kind() != b.kind() || !(a.grid() == b.grid())) return false;
  if (a.kind() == Background::Kind::flat) return true;
  auto va = a.factor()->values();
  auto vb = b.factor()->values();
  return std::equal(va.begin(), va.end(), vb.begin());
}

double metric_lp_distance(const ConformalMetric& a, const ConformalMetric& b, double p) {
  if (!same_background(a.background(), b.background()))
    throw ValidationError("metric_lp_distance: metrics have different backgrounds");
  if (!(p > 0.0)) throw ValidationError("metric_lp_distance: exponent p must be positive");
  const auto& e = a.exponents();
  const double root_n = std::sqrt(double(e.n));
  ScalarField integrand(a.grid());
  for (std::size_t i = 0; i < integrand.size(); ++i) {
    double diff = root_n * std::abs(power(a.u()[i], e.metric) - power(b.u()[i], e.metric));
    integrand[i] = power(diff, p);
  }
  return std::pow(a.background().integrate(integrand), 1.0 / p);
}

}  // namespace yamabe
