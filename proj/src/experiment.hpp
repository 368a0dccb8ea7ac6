#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "diagnostics.hpp"
#include "initial_data.hpp"

namespace yamabe {

/// Everything measured on one flow trajectory.
struct RunResult {
  explicit RunResult(Trajectory t) : trajectory(std::move(t)) {}

  Trajectory trajectory;
  AssumptionsAudit initial_audit;
  MonotonicityReport min_R;
  std::vector<std::pair<double, DriftFit>> drift_fits;  // keyed by alpha
  std::optional<DriftFit> drift_rate;                   // exponent 1; needs >= 10 records
  std::vector<LpConvergenceReport> lp_checks;
  double initial_volume = 0.0;
  double final_volume = 0.0;
  double final_flat_distance = 0.0;
  double final_R_sup = 0.0;
  /// flat_distance <= kappa * sup|R| bound constant at the final state.
  double kappa = 0.0;
  double runtime_seconds = 0.0;

  bool failed() const { return trajectory.outcome.termination == Termination::failed; }
};

/// Runs and audits a flow from cm0; `delta` is the curvature floor used by
/// the initial assumptions audit.
RunResult run_trajectory(const ConformalMetric& cm0, const ExperimentConfig& cfg, double delta, DiffOps& ops);

/// Builds background and initial data from the config and runs one flow.
RunResult run_experiment(const ExperimentConfig& cfg);

struct MemberResult {
  int index = 0;  // 1-based
  double delta = 0.0;
  double amplitude = 0.0;
  double calibrated_min_R = 0.0;
  std::uint64_t seed = 0;
  RunResult run;
};

struct SequenceSummary {
  static constexpr double kMonotoneSlack = 0.1;
  static constexpr double kFinalThreshold = 1e-3;
  static constexpr double kDriftDecrease = 5.0;

  /// max_i flat_distance(final_{i+1}) / flat_distance(final_i).
  double worst_ratio = 0.0;
  bool monotone = true;
  double last_flat_distance = 0.0;
  bool last_small = true;
  /// Linear volume drift constants per member and first/last ratio.
  std::vector<double> c_fit;
  double c_fit_decrease = 0.0;
  bool drift_decreasing = true;
  /// Every member has min R in [-1.01 delta_i, -0.99 delta_i].
  bool calibration_ok = true;
  /// Every member passes its initial assumptions audit.
  bool audits_ok = true;

  bool passed() const { return monotone && last_small && drift_decreasing && calibration_ok && audits_ok; }
};

struct SequenceResult {
  std::vector<MemberResult> members;  // ordered by index
  SequenceSummary summary;
  /// Set when a member failed; members then holds the ones that completed.
  std::optional<int> failed_member;
  std::string failure;
};

/// Calibrates and runs the delta family described by cfg.sequence. Members
/// run on up to `threads` worker threads (0 = hardware concurrency); the
/// result does not depend on the thread count.
SequenceResult run_sequence_experiment(const ExperimentConfig& cfg, unsigned threads = 0);
SequenceSummary summarize_sequence(const std::vector<MemberResult>& members);

/// Writes trajectory.csv, summary.json, optional SVG plots and snapshot.
void emit_run_outputs(const ExperimentConfig& cfg, const RunResult& result, const std::string& dir);
/// Writes member_<i>/ run outputs and sequence_summary.json.
void emit_sequence_outputs(const ExperimentConfig& cfg, const SequenceResult& result, const std::string& dir);

std::string run_summary_json(const ExperimentConfig& cfg, const RunResult& result);
std::string sequence_summary_json(const ExperimentConfig& cfg, const SequenceResult& result);

}  // namespace yamabe
