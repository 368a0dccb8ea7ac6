#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "conformal.hpp"

namespace yamabe {

struct FlowConfig {
  double t_max = 0.1;
  double cfl_safety = 0.25;
  /// Stop once sup|R_g| drops below this; 0 disables the check.
  double tol_R = 1e-8;
  int record_every = 10;
  double u_floor = 1e-8;
  /// Keep dt fixed for the whole run (dt = t_max / ceil(t_max / stable_dt(u0))).
  /// Required for the centred-difference residual diagnostics.
  bool uniform_dt = true;
  /// Optional explicit step; overrides the CFL choice when set.
  std::optional<double> fixed_dt;
  /// 0 means unlimited.
  std::int64_t max_steps = 0;
  DiffScheme scheme = DiffScheme::spectral;

  /// Throws ValidationError naming the offending field.
  void validate() const;
  bool operator==(const FlowConfig&) const = default;
};

struct FlowState {
  double t = 0.0;
  ConformalMetric cm;
  std::int64_t step_count = 0;
};

/// du/dt = (n-1) u^{-4/(n-2)} Delta_h u - (n-2)/4 R_h u^{(n-6)/(n-2)}.
ScalarField yamabe_rhs(const ConformalMetric& cm, DiffOps& ops);

/// cfl_safety * h_min^2 / (2n(n-1) max((u v)^{-4/(n-2)})).
double stable_dt(const ConformalMetric& cm, const FlowConfig& cfg);

/// One classical RK4 step of the non-conservative form. Throws NumericalError
/// when a stage drops to u <= u_floor (naming min u and its lattice index) or
/// produces a non-finite value. `k1`, when given, must be yamabe_rhs(state).
FlowState step_rk4(const FlowState& state, double dt, DiffOps& ops, double u_floor,
                   const ScalarField* k1 = nullptr);

enum class Termination { t_max, converged, max_steps, failed };
const char* to_string(Termination t);

/// What a FlowObserver is told about each emitted state.
enum class RecordKind { initial, periodic, final };

using FlowObserver = std::function<void(const FlowState&, RecordKind)>;

struct FlowOutcome {
  FlowState final_state;
  Termination termination = Termination::t_max;
  /// Step size of a uniform run (the last step size otherwise).
  double dt = 0.0;
  std::string failure;
};

/// Integrates from cm0 until t >= t_max, sup|R| < tol_R, or max_steps.
/// The observer sees the initial state, every record_every-th step and the
/// final state. Numerical failures end the run with Termination::failed; the
/// observer has already seen the last good state as `final`.
FlowOutcome run_flow(const ConformalMetric& cm0, const FlowConfig& cfg, DiffOps& ops,
                     const FlowObserver& observer);

}  // namespace yamabe
