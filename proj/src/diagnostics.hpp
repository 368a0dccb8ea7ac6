#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "flow.hpp"

namespace yamabe {

struct DiagnosticsConfig {
  double p0 = 12.0;
  std::vector<double> p = {1.0, 2.0};
  std::vector<double> alpha = {0.6, 0.9};
  double epsilon = 0.5;
  double lambda = 2.0;
  double delta = 1e-3;

  void validate(int n) const;
  bool operator==(const DiagnosticsConfig&) const = default;
};

/// Smallest admissible integrability exponent: n/2 + 2n(n+4)/((n-2)(n+2)).
double p0_threshold(int n);

/// One row of per-record scalar diagnostics.
struct DiagnosticsRecord {
  double t = 0.0;
  double dt = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
  double vol_g = 0.0;
  double R_min = 0.0;
  double R_max = 0.0;
  double R_l1 = 0.0;
  double vol_identity_residual = 0.0;
  double evoR_residual_l2 = 0.0;
  double lp_dist_initial = 0.0;
  double lp_dist_flat = 0.0;
  double moser_ratio = 0.0;

  // Not part of the CSV row.
  std::int64_t step = 0;
  double R_integral = 0.0;  // integral of R dmu_g
  std::vector<std::pair<double, double>> lp_dist_by_p;
};

/// Sup distance to the closest constant multiple of the Euclidean metric:
/// min_c ||F - c||_inf / c with F = (u v)^{4/(n-2)}, attained at c = (max+min)/2.
double flat_distance(const ConformalMetric& cm);

/// Linearised bound flat_distance <= kappa * sup|R| for nearly flat metrics:
/// kappa = 2 * (4/(n-2)) * max F * L_max^2 / (4(n-1)/(n-2) * 4 pi^2).
double flat_convergence_constant(const ConformalMetric& cm);

/// |(V2 - V1)/(t2 - t1) + (n/2) * mean(int R dmu_g at both states)| / V1.
double volume_identity_residual(const FlowState& state, const FlowState& prev, DiffOps& ops);

/// L2(dmu_h) norm of [centred dR/dt - (n-1) Delta_g R - R^2] at `state`,
/// divided by (1 + ||R||_2^2). Requires uniformly spaced prev/state/next.
double scalar_evolution_residual(const FlowState& state, const FlowState& prev, const FlowState& next,
                                 DiffOps& ops);

/// Turns observed flow states into DiagnosticsRecords. Records are emitted
/// in time order, each as soon as the states needed for its time-derivative
/// stencil are available; call finish() after the run.
class TrajectoryRecorder {
 public:
  using Sink = std::function<void(const DiagnosticsRecord&)>;

  TrajectoryRecorder(const ConformalMetric& initial, DiagnosticsConfig cfg, DiffOps& ops, Sink sink);
  void observe(const FlowState& state, RecordKind kind);
  void finish();
  FlowObserver observer();

 private:
  struct Snapshot {
    FlowState state;
    ScalarField curvature;
    DiagnosticsRecord record;
  };
  void emit_ready(bool flushing);
  double evolution_residual(std::size_t idx);
  const Snapshot& at(std::size_t global) const { return window_[global - base_]; }

  ConformalMetric initial_;
  DiagnosticsConfig cfg_;
  DiffOps& ops_;
  Sink sink_;
  std::deque<Snapshot> window_;
  std::size_t base_ = 0;
  std::size_t total_ = 0;
  std::size_t emitted_ = 0;
};

struct Trajectory {
  std::vector<DiagnosticsRecord> records;
  FlowOutcome outcome;
};

/// run_flow with a TrajectoryRecorder attached.
Trajectory run_recorded_flow(const ConformalMetric& cm0, const FlowConfig& flow, const DiagnosticsConfig& diag,
                             DiffOps& ops);

struct MonotonicityReport {
  double worst_increment = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};
/// Minimum principle audit on R_min: worst R_min(t_{k+1}) - R_min(t_k)
/// against tol = 1e-6 (1 + max|R|).
MonotonicityReport min_R_monotonicity(const std::vector<DiagnosticsRecord>& records);

struct DriftFit {
  double c_fit = 0.0;
  double max_violation = 0.0;
};
/// C_fit = max_{t>0} |Vol(t) - Vol(0)| / t^{1-alpha}; max_violation is the
/// largest ratio/C_fit over the later half of the records (<= 1 by
/// construction; reported for audit). Needs >= 10 records.
DriftFit volume_drift_fit(const std::vector<DiagnosticsRecord>& records, double alpha);
/// Same functional with exponent 1: max |Vol(t) - Vol(0)| / t.
DriftFit volume_drift_rate(const std::vector<DiagnosticsRecord>& records);

struct LpConvergenceReport {
  double p = 0.0;
  double sup_ratio = 0.0;
  bool finite = true;
};
/// sup over records with t>0 of dist_p(g(t), g(0))^p / (t + t^p). The
/// distance for this p must have been recorded (DiagnosticsConfig::p).
LpConvergenceReport lp_convergence_check(const std::vector<DiagnosticsRecord>& records, double p);

struct AuditItem {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool passed = true;
  bool evaluated = true;
};

struct AssumptionsAudit {
  double lambda = 0.0;
  double p0 = 0.0;
  double delta = 0.0;
  std::vector<AuditItem> items;
  bool all_passed() const;
  const AuditItem& item(const std::string& name) const;
};

/// Audits the hypotheses on (h, u): L^{p0} bound, volume floor, scalar
/// curvature floor, diameter bounds and background curvature/injectivity.
AssumptionsAudit assumptions_check(const ConformalMetric& cm, double lambda, double p0, double delta,
                                   DiffOps& ops);

}  // namespace yamabe
