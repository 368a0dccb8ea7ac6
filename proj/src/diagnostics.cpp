#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "error.hpp"

namespace yamabe {

double p0_threshold(int n) {
  return n / 2.0 + 2.0 * n * (n + 4.0) / ((n - 2.0) * (n + 2.0));
}

void DiagnosticsConfig::validate(int n) const {
  const double threshold = p0_threshold(n);
  if (!(p0 > threshold)) {
    std::ostringstream os;
    os << "diagnostics/p0: hypothesis (B) exponent too small: need p0 > n/2 + 2n(n+4)/((n-2)(n+2)) = "
       << threshold << " for n = " << n << ", got " << p0;
    throw ValidationError(os.str());
  }
  if (p.empty()) throw ValidationError("diagnostics/p: need at least one exponent");
  for (double x : p)
    if (!(x > 0.0)) throw ValidationError("diagnostics/p: exponents must be positive");
  for (double a : alpha)
    if (!(a > 0.0 && a < 1.0)) throw ValidationError("diagnostics/alpha: entries must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw ValidationError("diagnostics/epsilon: must be positive");
  if (!(lambda > 0.0)) throw ValidationError("diagnostics/lambda: must be positive");
  if (!(delta > 0.0)) throw ValidationError("diagnostics/delta: must be positive");
}

double flat_distance(const ConformalMetric& cm) {
  ScalarField f = composite_factor(cm);
  const double lo = f.min();
  const double hi = f.max();
  return (hi - lo) / (hi + lo);
}

double flat_convergence_constant(const ConformalMetric& cm) {
  const auto& e = cm.exponents();
  double l_max = 0.0;
  for (double l : cm.grid().lengths()) l_max = std::max(l_max, l);
  const double f_max = composite_factor(cm).max();
  return 2.0 * e.metric * f_max * l_max * l_max / (e.laplace * 4.0 * std::numbers::pi * std::numbers::pi);
}

namespace {

double curvature_integral(const ConformalMetric& cm, const ScalarField& r) {
  ScalarField w(r.grid());
  const double e = cm.exponents().volume;
  for (std::size_t i = 0; i < r.size(); ++i) w[i] = r[i] * power(cm.u()[i], e);
  return cm.background().integrate(w);
}

double curvature_l1(const ConformalMetric& cm, const ScalarField& r) {
  ScalarField w(r.grid());
  const double e = cm.exponents().volume;
  for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::abs(r[i]) * power(cm.u()[i], e);
  return cm.background().integrate(w);
}

double identity_residual(double v1, double v2, double t1, double t2, double i1, double i2, int n) {
  if (!(t2 > t1)) return 0.0;
  return std::abs((v2 - v1) / (t2 - t1) + 0.5 * n * 0.5 * (i1 + i2)) / v1;
}

// L2(dmu_h) residual of (d/dt - (n-1) Delta_g) R - R^2 given dR/dt.
double evolution_residual_from(const ConformalMetric& cm, const ScalarField& r, const ScalarField& dr_dt,
                               DiffOps& ops) {
  const int n = cm.exponents().n;
  ScalarField lap = conformal_laplacian(cm, r, ops);
  ScalarField res2(r.grid()), r2(r.grid());
  for (std::size_t i = 0; i < r.size(); ++i) {
    double res = dr_dt[i] - (n - 1.0) * lap[i] - r[i] * r[i];
    res2[i] = res * res;
    r2[i] = r[i] * r[i];
  }
  const auto& bg = cm.background();
  return std::sqrt(bg.integrate(res2)) / (1.0 + bg.integrate(r2));
}

bool uniform_spacing(double t0, double t1, double t2) {
  double h1 = t1 - t0, h2 = t2 - t1;
  return h1 > 0.0 && h2 > 0.0 && std::abs(h1 - h2) <= 1e-9 * h1;
}

}  // namespace

double volume_identity_residual(const FlowState& state, const FlowState& prev, DiffOps& ops) {
  if (!(state.t > prev.t)) throw ValidationError("volume_identity_residual: need t2 > t1");
  ScalarField r1 = scalar_curvature(prev.cm, ops);
  ScalarField r2 = scalar_curvature(state.cm, ops);
  return identity_residual(volume(prev.cm), volume(state.cm), prev.t, state.t, curvature_integral(prev.cm, r1),
                           curvature_integral(state.cm, r2), prev.cm.exponents().n);
}

double scalar_evolution_residual(const FlowState& state, const FlowState& prev, const FlowState& next,
                                 DiffOps& ops) {
  if (!uniform_spacing(prev.t, state.t, next.t))
    throw ValidationError("scalar_evolution_residual: states are not uniformly spaced in time");
  ScalarField r0 = scalar_curvature(prev.cm, ops);
  ScalarField r1 = scalar_curvature(state.cm, ops);
  ScalarField r2 = scalar_curvature(next.cm, ops);
  ScalarField dr(r1.grid());
  const double inv = 1.0 / (next.t - prev.t);
  for (std::size_t i = 0; i < dr.size(); ++i) dr[i] = (r2[i] - r0[i]) * inv;
  return evolution_residual_from(state.cm, r1, dr, ops);
}

TrajectoryRecorder::TrajectoryRecorder(const ConformalMetric& initial, DiagnosticsConfig cfg, DiffOps& ops,
                                       Sink sink)
    : initial_(initial), cfg_(std::move(cfg)), ops_(ops), sink_(std::move(sink)) {}

FlowObserver TrajectoryRecorder::observer() {
  return [this](const FlowState& s, RecordKind kind) { observe(s, kind); };
}

void TrajectoryRecorder::observe(const FlowState& state, RecordKind) {
  const auto& cm = state.cm;
  ScalarField r = scalar_curvature(cm, ops_);
  DiagnosticsRecord rec;
  rec.t = state.t;
  rec.step = state.step_count;
  rec.u_min = cm.u().min();
  rec.u_max = cm.u().max();
  rec.vol_g = volume(cm);
  rec.R_min = r.min();
  rec.R_max = r.max();
  rec.R_l1 = curvature_l1(cm, r);
  rec.R_integral = curvature_integral(cm, r);
  for (double p : cfg_.p) rec.lp_dist_by_p.emplace_back(p, metric_lp_distance(cm, initial_, p));
  rec.lp_dist_initial = rec.lp_dist_by_p.front().second;
  rec.lp_dist_flat = flat_distance(cm);
  const double vol_h = cm.background().volume();
  rec.moser_ratio = moser_product(cm, cfg_.epsilon) / (vol_h * vol_h);
  if (total_ > 0) {
    const auto& prev = at(total_ - 1).record;
    rec.dt = rec.step > prev.step ? (rec.t - prev.t) / double(rec.step - prev.step) : prev.dt;
    rec.vol_identity_residual =
        identity_residual(prev.vol_g, rec.vol_g, prev.t, rec.t, prev.R_integral, rec.R_integral, cm.exponents().n);
  }
  window_.push_back(Snapshot{state, std::move(r), std::move(rec)});
  ++total_;
  emit_ready(false);
}

void TrajectoryRecorder::finish() { emit_ready(true); }

double TrajectoryRecorder::evolution_residual(std::size_t idx) {
  const Snapshot& s = at(idx);
  auto t_of = [&](std::size_t j) { return at(j).state.t; };
  auto r_of = [&](std::size_t j) -> const ScalarField& { return at(j).curvature; };
  ScalarField dr(s.curvature.grid());
  auto combine = [&](std::size_t a, double ca, std::size_t b, double cb, std::size_t c, double cc, double inv) {
    for (std::size_t i = 0; i < dr.size(); ++i) dr[i] = (ca * r_of(a)[i] + cb * r_of(b)[i] + cc * r_of(c)[i]) * inv;
  };
  if (idx >= 1 && idx + 1 < total_ && uniform_spacing(t_of(idx - 1), t_of(idx), t_of(idx + 1))) {
    combine(idx - 1, -1.0, idx, 0.0, idx + 1, 1.0, 1.0 / (t_of(idx + 1) - t_of(idx - 1)));
  } else if (idx + 2 < total_ && uniform_spacing(t_of(idx), t_of(idx + 1), t_of(idx + 2))) {
    combine(idx, -3.0, idx + 1, 4.0, idx + 2, -1.0, 0.5 / (t_of(idx + 1) - t_of(idx)));
  } else if (idx >= 2 && idx - 2 >= base_ && uniform_spacing(t_of(idx - 2), t_of(idx - 1), t_of(idx))) {
    combine(idx - 2, 1.0, idx - 1, -4.0, idx, 3.0, 0.5 / (t_of(idx) - t_of(idx - 1)));
  } else {
    return 0.0;
  }
  return evolution_residual_from(s.state.cm, s.curvature, dr, ops_);
}

void TrajectoryRecorder::emit_ready(bool flushing) {
  while (emitted_ < total_) {
    const std::size_t idx = emitted_;
    const std::size_t needed = idx == 0 ? idx + 3 : idx + 2;
    if (!flushing && total_ < needed) break;
    auto& snap = window_[idx - base_];
    snap.record.evoR_residual_l2 = evolution_residual(idx);
    if (sink_) sink_(snap.record);
    ++emitted_;
    while (base_ + 2 < emitted_) {
      window_.pop_front();
      ++base_;
    }
  }
}

Trajectory run_recorded_flow(const ConformalMetric& cm0, const FlowConfig& flow, const DiagnosticsConfig& diag,
                             DiffOps& ops) {
  Trajectory traj{{}, FlowOutcome{FlowState{0.0, cm0, 0}, Termination::t_max, 0.0, {}}};
  TrajectoryRecorder rec(cm0, diag, ops, [&](const DiagnosticsRecord& r) { traj.records.push_back(r); });
  traj.outcome = run_flow(cm0, flow, ops, rec.observer());
  rec.finish();
  return traj;
}

MonotonicityReport min_R_monotonicity(const std::vector<DiagnosticsRecord>& records) {
  MonotonicityReport rep;
  double max_abs = 0.0;
  for (const auto& r : records) max_abs = std::max({max_abs, std::abs(r.R_min), std::abs(r.R_max)});
  rep.tolerance = 1e-6 * (1.0 + max_abs);
  for (std::size_t k = 1; k < records.size(); ++k) {
    double inc = records[k].R_min - records[k - 1].R_min;
    if (k == 1 || inc < rep.worst_increment) rep.worst_increment = inc;
  }
  rep.passed = rep.worst_increment >= -rep.tolerance;
  return rep;
}

namespace {

DriftFit drift_fit(const std::vector<DiagnosticsRecord>& records, double exponent) {
  if (records.size() < 10)
    throw ValidationError("volume drift fit: need at least 10 records, got " + std::to_string(records.size()));
  const double v0 = records.front().vol_g;
  const double t0 = records.front().t;
  std::vector<double> ratio;
  for (const auto& r : records) {
    double t = r.t - t0;
    if (t > 0.0) ratio.push_back(std::abs(r.vol_g - v0) / std::pow(t, exponent));
  }
  DriftFit fit;
  if (ratio.empty()) return fit;
  fit.c_fit = *std::max_element(ratio.begin(), ratio.end());
  if (fit.c_fit > 0.0)
    for (std::size_t k = ratio.size() / 2; k < ratio.size(); ++k)
      fit.max_violation = std::max(fit.max_violation, ratio[k] / fit.c_fit);
  return fit;
}

}  // namespace

DriftFit volume_drift_fit(const std::vector<DiagnosticsRecord>& records, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("volume_drift_fit: alpha must lie in (0, 1)");
  return drift_fit(records, 1.0 - alpha);
}

DriftFit volume_drift_rate(const std::vector<DiagnosticsRecord>& records) { return drift_fit(records, 1.0); }

LpConvergenceReport lp_convergence_check(const std::vector<DiagnosticsRecord>& records, double p) {
  if (!(p > 0.0)) throw ValidationError("lp_convergence_check: p must be positive");
  LpConvergenceReport rep;
  rep.p = p;
  if (records.empty()) return rep;
  const double t0 = records.front().t;
  for (const auto& r : records) {
    double t = r.t - t0;
    if (!(t > 0.0)) continue;
    auto it = std::find_if(r.lp_dist_by_p.begin(), r.lp_dist_by_p.end(),
                           [p](const auto& e) { return e.first == p; });
    if (it == r.lp_dist_by_p.end())
      throw ValidationError("lp_convergence_check: distance for p = " + std::to_string(p) + " was not recorded");
    rep.sup_ratio = std::max(rep.sup_ratio, std::pow(it->second, p) / (t + std::pow(t, p)));
  }
  rep.finite = std::isfinite(rep.sup_ratio);
  return rep;
}

bool AssumptionsAudit::all_passed() const {
  return std::all_of(items.begin(), items.end(), [](const AuditItem& i) { return !i.evaluated || i.passed; });
}

const AuditItem& AssumptionsAudit::item(const std::string& name) const {
  for (const auto& i : items)
    if (i.name == name) return i;
  throw ValidationError("no audit item named " + name);
}

AssumptionsAudit assumptions_check(const ConformalMetric& cm, double lambda, double p0, double delta,
                                   DiffOps& ops) {
  AssumptionsAudit audit;
  audit.lambda = lambda;
  audit.p0 = p0;
  audit.delta = delta;
  const auto& bg = cm.background();

  double norm = lp_norm(cm, cm.u(), p0, Measure::h);
  audit.items.push_back({"u_lp0_norm", norm, lambda, norm <= lambda, true});
  double vol = volume(cm);
  audit.items.push_back({"volume_g", vol, 1.0 / lambda, vol >= 1.0 / lambda, true});
  double r_min = scalar_curvature(cm, ops).min();
  audit.items.push_back({"min_scalar_curvature", r_min, -delta, r_min >= -delta, true});
  double diam_g = diameter_estimate(cm);
  audit.items.push_back({"diameter_g", diam_g, lambda, diam_g <= lambda, true});

  double r_h = bg.scalar_curvature().max_abs();
  audit.items.push_back({"background_curvature", r_h, lambda, r_h <= lambda, true});
  double diam_h = diameter_estimate(bg);
  audit.items.push_back({"diameter_h", diam_h, lambda, diam_h <= lambda, true});
  if (bg.kind() == Background::Kind::flat) {
    double inj = 0.5 * *std::min_element(bg.grid().lengths().begin(), bg.grid().lengths().end());
    audit.items.push_back({"injectivity_radius_h", inj, 1.0 / lambda, inj >= 1.0 / lambda, true});
  } else {
    audit.items.push_back({"injectivity_radius_h", 0.0, 1.0 / lambda, true, false});
  }
  return audit;
}

}  // namespace yamabe
