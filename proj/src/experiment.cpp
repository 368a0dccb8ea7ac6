#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "error.hpp"
#include "outputs.hpp"

namespace yamabe {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::ordered_json;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

RunResult run_trajectory(const ConformalMetric& cm0, const ExperimentConfig& cfg, double delta, DiffOps& ops) {
  const auto start = Clock::now();
  auto audit = assumptions_check(cm0, cfg.diagnostics.lambda, cfg.diagnostics.p0, delta, ops);
  RunResult r(run_recorded_flow(cm0, cfg.flow, cfg.diagnostics, ops));
  r.initial_audit = std::move(audit);

  const auto& recs = r.trajectory.records;
  r.min_R = min_R_monotonicity(recs);
  if (recs.size() >= 10) {
    for (double a : cfg.diagnostics.alpha) r.drift_fits.emplace_back(a, volume_drift_fit(recs, a));
    r.drift_rate = volume_drift_rate(recs);
  }
  for (double p : cfg.diagnostics.p) r.lp_checks.push_back(lp_convergence_check(recs, p));

  const ConformalMetric& last = r.trajectory.outcome.final_state.cm;
  r.initial_volume = volume(cm0);
  r.final_volume = volume(last);
  r.final_flat_distance = flat_distance(last);
  r.final_R_sup = scalar_curvature(last, ops).max_abs();
  r.kappa = flat_convergence_constant(last);
  r.runtime_seconds = seconds_since(start);
  return r;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  DiffOps ops(make_grid(cfg.grid), cfg.flow.scheme);
  auto bg = make_background(cfg, ops);
  ConformalMetric cm0 = make_initial_metric(cfg, bg, ops);
  return run_trajectory(cm0, cfg, cfg.diagnostics.delta, ops);
}

SequenceSummary summarize_sequence(const std::vector<MemberResult>& members) {
  SequenceSummary s;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& m = members[i];
    if (!(m.calibrated_min_R <= -0.99 * m.delta && m.calibrated_min_R >= -1.01 * m.delta)) s.calibration_ok = false;
    if (!m.run.initial_audit.all_passed()) s.audits_ok = false;
    s.c_fit.push_back(m.run.drift_rate ? m.run.drift_rate->c_fit : NAN);
    if (i > 0) {
      double prev = members[i - 1].run.final_flat_distance;
      double cur = m.run.final_flat_distance;
      double ratio = prev > 0.0 ? cur / prev : (cur > 0.0 ? INFINITY : 1.0);
      s.worst_ratio = std::max(s.worst_ratio, ratio);
      if (!(cur <= (1.0 + SequenceSummary::kMonotoneSlack) * prev)) s.monotone = false;
    }
  }
  if (members.empty()) {
    s.last_small = false;
    s.drift_decreasing = false;
    return s;
  }
  s.last_flat_distance = members.back().run.final_flat_distance;
  s.last_small = s.last_flat_distance < SequenceSummary::kFinalThreshold;
  if (members.size() == 1) {
    s.c_fit_decrease = 1.0;
    s.drift_decreasing = true;
  } else {
    double first = s.c_fit.front(), last = s.c_fit.back();
    s.c_fit_decrease = last > 0.0 ? first / last : (first > 0.0 ? INFINITY : 1.0);
    s.drift_decreasing = s.c_fit_decrease >= SequenceSummary::kDriftDecrease;
  }
  return s;
}

SequenceResult run_sequence_experiment(const ExperimentConfig& cfg, unsigned threads) {
  cfg.validate();
  const auto deltas = cfg.sequence.schedule();
  const PeriodicGrid grid = make_grid(cfg.grid);
  std::shared_ptr<const Background> bg;
  {
    DiffOps ops(grid, cfg.flow.scheme);
    bg = make_background(cfg, ops);
  }
  Shape base;
  base.kind = cfg.sequence.shape == "cosine" ? Shape::Kind::cosine : Shape::Kind::bandlimited;
  base.seed = cfg.sequence.base_seed;
  base.kmax = cfg.sequence.kmax;

  const std::size_t count = deltas.size();
  std::vector<std::optional<MemberResult>> slots(count);
  std::vector<std::string> errors(count);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    DiffOps ops(grid, cfg.flow.scheme);
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        Shape s = base;
        s.seed = base.seed + std::uint64_t(i) * cfg.sequence.seed_stride;
        CalibratedMember cal = calibrate_amplitude(bg, s, deltas[i], ops);
        MemberResult m{.index = int(i) + 1,
                       .delta = deltas[i],
                       .amplitude = cal.amplitude,
                       .calibrated_min_R = cal.min_R,
                       .seed = s.seed,
                       .run = run_trajectory(cal.metric, cfg, deltas[i], ops)};
        if (m.run.failed()) errors[i] = m.run.trajectory.outcome.failure;
        slots[i] = std::move(m);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  unsigned hw = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  unsigned nthreads = unsigned(std::min<std::size_t>(hw, count));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < nthreads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SequenceResult out;
  for (std::size_t i = 0; i < count; ++i) {
    if (!errors[i].empty() && !out.failed_member) {
      out.failed_member = int(i) + 1;
      out.failure = "member " + std::to_string(i + 1) + ": " + errors[i];
    }
    if (slots[i] && errors[i].empty()) out.members.push_back(std::move(*slots[i]));
  }
  out.summary = summarize_sequence(out.members);
  return out;
}

namespace {

ordered_json audit_json(const AssumptionsAudit& a) {
  ordered_json j;
  j["lambda"] = a.lambda;
  j["p0"] = a.p0;
  j["delta"] = a.delta;
  j["all_passed"] = a.all_passed();
  ordered_json items = ordered_json::array();
  for (const auto& it : a.items)
    items.push_back({{"name", it.name},
                     {"measured", it.measured},
                     {"bound", it.bound},
                     {"evaluated", it.evaluated},
                     {"passed", it.passed}});
  j["items"] = std::move(items);
  return j;
}

ordered_json run_results_json(const RunResult& r) {
  const auto& out = r.trajectory.outcome;
  ordered_json j;
  j["termination"] = to_string(out.termination);
  if (!out.failure.empty()) j["failure"] = out.failure;
  j["steps"] = out.final_state.step_count;
  j["t_final"] = out.final_state.t;
  j["dt"] = out.dt;
  j["records"] = r.trajectory.records.size();
  j["initial_volume"] = r.initial_volume;
  j["final_volume"] = r.final_volume;
  j["volume_drift"] = r.final_volume - r.initial_volume;
  j["final_flat_distance"] = r.final_flat_distance;
  j["final_R_sup"] = r.final_R_sup;
  j["kappa"] = r.kappa;
  j["min_R_monotonicity"] = {{"worst_increment", r.min_R.worst_increment},
                             {"tolerance", r.min_R.tolerance},
                             {"passed", r.min_R.passed}};
  ordered_json fits = ordered_json::array();
  for (const auto& [a, f] : r.drift_fits)
    fits.push_back({{"alpha", a}, {"c_fit", f.c_fit}, {"max_violation", f.max_violation}});
  j["volume_drift_fits"] = std::move(fits);
  if (r.drift_rate) j["volume_drift_rate"] = r.drift_rate->c_fit;
  ordered_json lp = ordered_json::array();
  for (const auto& c : r.lp_checks) lp.push_back({{"p", c.p}, {"sup_ratio", c.sup_ratio}, {"finite", c.finite}});
  j["lp_convergence"] = std::move(lp);
  j["initial_audit"] = audit_json(r.initial_audit);
  j["runtime_seconds"] = r.runtime_seconds;
  return j;
}

std::vector<std::pair<double, double>> series(const std::vector<DiagnosticsRecord>& recs,
                                              double DiagnosticsRecord::*field) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(recs.size());
  for (const auto& r : recs) pts.emplace_back(r.t, r.*field);
  return pts;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

std::string run_summary_json(const ExperimentConfig& cfg, const RunResult& result) {
  ordered_json j;
  j["config"] = ordered_json::parse(canonical_config(cfg));
  j["results"] = run_results_json(result);
  return j.dump(2) + "\n";
}

std::string sequence_summary_json(const ExperimentConfig& cfg, const SequenceResult& result) {
  ordered_json j;
  j["config"] = ordered_json::parse(canonical_config(cfg));
  ordered_json members = ordered_json::array();
  for (const auto& m : result.members) {
    ordered_json e;
    e["index"] = m.index;
    e["delta"] = m.delta;
    e["seed"] = m.seed;
    e["amplitude"] = m.amplitude;
    e["calibrated_min_R"] = m.calibrated_min_R;
    e["results"] = run_results_json(m.run);
    members.push_back(std::move(e));
  }
  const auto& s = result.summary;
  ordered_json summary;
  summary["worst_flat_distance_ratio"] = s.worst_ratio;
  summary["monotone_within_slack"] = s.monotone;
  summary["slack"] = SequenceSummary::kMonotoneSlack;
  summary["last_flat_distance"] = s.last_flat_distance;
  summary["last_below_threshold"] = s.last_small;
  summary["threshold"] = SequenceSummary::kFinalThreshold;
  summary["volume_drift_rates"] = s.c_fit;
  summary["drift_rate_decrease"] = s.c_fit_decrease;
  summary["drift_rate_decreasing"] = s.drift_decreasing;
  summary["calibration_ok"] = s.calibration_ok;
  summary["audits_ok"] = s.audits_ok;
  summary["passed"] = s.passed();
  ordered_json results;
  results["members"] = std::move(members);
  results["summary"] = std::move(summary);
  if (result.failed_member) {
    results["failed_member"] = *result.failed_member;
    results["failure"] = result.failure;
  }
  j["results"] = std::move(results);
  return j.dump(2) + "\n";
}

void emit_run_outputs(const ExperimentConfig& cfg, const RunResult& result, const std::string& dir) {
  ensure_directory(dir);
  const auto& recs = result.trajectory.records;
  write_trajectory_csv(join(dir, "trajectory.csv"), recs);
  write_text_file(join(dir, "summary.json"), run_summary_json(cfg, result));
  if (cfg.output.plots) {
    write_svg_plot(join(dir, "R_min.svg"), "min R_g", "t", {{"R_min", series(recs, &DiagnosticsRecord::R_min)}});
    write_svg_plot(join(dir, "volume.svg"), "Vol(g)", "t", {{"vol_g", series(recs, &DiagnosticsRecord::vol_g)}});
    write_svg_plot(join(dir, "flat_distance.svg"), "flat distance", "t",
                   {{"flat_distance", series(recs, &DiagnosticsRecord::lp_dist_flat)}}, true);
  }
  if (cfg.output.snapshot) write_snapshot(join(dir, "final_u.bin"), result.trajectory.outcome.final_state.cm.u());
}

void emit_sequence_outputs(const ExperimentConfig& cfg, const SequenceResult& result, const std::string& dir) {
  ensure_directory(dir);
  ExperimentConfig member_cfg = cfg;
  member_cfg.output.plots = false;
  std::vector<PlotSeries> fd, rmin;
  for (const auto& m : result.members) {
    char name[32];
    std::snprintf(name, sizeof name, "member_%02d", m.index);
    emit_run_outputs(member_cfg, m.run, join(dir, name));
    const std::string label = "i=" + std::to_string(m.index);
    fd.push_back({label, series(m.run.trajectory.records, &DiagnosticsRecord::lp_dist_flat)});
    rmin.push_back({label, series(m.run.trajectory.records, &DiagnosticsRecord::R_min)});
  }
  write_text_file(join(dir, "sequence_summary.json"), sequence_summary_json(cfg, result));
  if (cfg.output.plots && !result.members.empty()) {
    write_svg_plot(join(dir, "flat_distance.svg"), "flat distance", "t", fd, true);
    write_svg_plot(join(dir, "R_min.svg"), "min R_g", "t", rmin);
    std::vector<std::pair<double, double>> drift;
    for (const auto& m : result.members)
      if (m.run.drift_rate) drift.emplace_back(m.index, m.run.drift_rate->c_fit);
    write_svg_plot(join(dir, "volume_drift.svg"), "volume drift rate C_fit", "member", {{"C_fit", drift}}, true);
  }
}

}  // namespace yamabe
