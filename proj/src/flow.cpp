#include "flow.hpp"

#include <cmath>
#include <sstream>

#include "error.hpp"

namespace yamabe {

void FlowConfig::validate() const {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("flow/t_max: must be positive");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw ValidationError("flow/cfl_safety: must lie in (0, 1]");
  if (!(tol_R >= 0.0)) throw ValidationError("flow/tol_R: must be non-negative");
  if (record_every < 1) throw ValidationError("flow/record_every: must be >= 1");
  if (!(u_floor >= 0.0)) throw ValidationError("flow/u_floor: must be non-negative");
  if (fixed_dt && !(*fixed_dt > 0.0)) throw ValidationError("flow/fixed_dt: must be positive");
  if (max_steps < 0) throw ValidationError("flow/max_steps: must be >= 0");
}

namespace {

ScalarField rhs_of(const Background& bg, const ScalarField& u, DiffOps& ops) {
  const auto& e = bg.exponents();
  ScalarField lap = bg.laplacian(u, ops);
  const double diff = e.n - 1.0;
  ScalarField out = power(u, -e.metric);
  if (bg.kind() == Background::Kind::flat) {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = diff * out[i] * lap[i];
  } else {
    const double react = (e.n - 2.0) / 4.0;
    const auto& r_h = bg.scalar_curvature();
    ScalarField reaction = power(u, e.reaction);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = diff * out[i] * lap[i] - react * r_h[i] * reaction[i];
  }
  return out;
}

void check_stage(const ScalarField& u, double u_floor, const char* stage) {
  // x - x is zero for finite x and NaN otherwise
  double probe = 0.0, lowest = INFINITY;
  for (double x : u.values()) {
    probe += x - x;
    lowest = x < lowest ? x : lowest;
  }
  if (probe == 0.0 && lowest > u_floor) return;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i])) {
      std::ostringstream os;
      os << "instability: non-finite u at index " << i << " in " << stage
         << "; reduce cfl_safety";
      throw NumericalError(os.str());
    }
  }
  std::size_t at = u.argmin();
  if (!(u[at] > u_floor)) {
    std::ostringstream os;
    auto ijk = u.grid().unravel(at);
    os << "flow degeneracy: min u = " << u[at] << " <= u_floor = " << u_floor << " at lattice point (";
    for (int k = 0; k < u.grid().dim(); ++k) os << (k ? "," : "") << ijk[k];
    os << ") in " << stage;
    throw NumericalError(os.str());
  }
}

ScalarField axpy(const ScalarField& u, double a, const ScalarField& k) {
  ScalarField out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + a * k[i];
  return out;
}

double max_abs_curvature_from_rhs(const ConformalMetric& cm, const ScalarField& k1) {
  // rhs = -(n-2)/4 R u
  const double scale = 4.0 / (cm.exponents().n - 2.0);
  double r = 0.0;
  for (std::size_t i = 0; i < k1.size(); ++i) r = std::max(r, std::abs(scale * k1[i] / cm.u()[i]));
  return r;
}

}  // namespace

ScalarField yamabe_rhs(const ConformalMetric& cm, DiffOps& ops) {
  auto out = rhs_of(cm.background(), cm.u(), ops);
  out.require_finite("yamabe_rhs");
  return out;
}

double stable_dt(const ConformalMetric& cm, const FlowConfig& cfg) {
  const auto& e = cm.exponents();
  const auto& u = cm.u();
  const auto& inv_scale = cm.background().inverse_scale();
  double diffusivity = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    diffusivity = std::max(diffusivity, power(u[i], -e.metric) * inv_scale[i]);
  const double h = cm.grid().min_spacing();
  double dt = cfg.cfl_safety * h * h / (2.0 * e.n * (e.n - 1.0) * diffusivity);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw NumericalError("stable_dt: non-positive step");
  return dt;
}

FlowState step_rk4(const FlowState& state, double dt, DiffOps& ops, double u_floor, const ScalarField* k1_in) {
  if (!(dt > 0.0)) throw ValidationError("step_rk4: dt must be positive");
  const auto& bg = state.cm.background();
  const ScalarField& u = state.cm.u();
  check_stage(u, u_floor, "step input");
  ScalarField k1 = k1_in ? *k1_in : rhs_of(bg, u, ops);
  ScalarField u2 = axpy(u, 0.5 * dt, k1);
  check_stage(u2, u_floor, "stage 2");
  ScalarField k2 = rhs_of(bg, u2, ops);
  ScalarField u3 = axpy(u, 0.5 * dt, k2);
  check_stage(u3, u_floor, "stage 3");
  ScalarField k3 = rhs_of(bg, u3, ops);
  ScalarField u4 = axpy(u, dt, k3);
  check_stage(u4, u_floor, "stage 4");
  ScalarField k4 = rhs_of(bg, u4, ops);
  ScalarField next(u.grid());
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    next[i] = u[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  check_stage(next, u_floor, "step output");
  return FlowState{state.t + dt, ConformalMetric(state.cm.background_ptr(), std::move(next)),
                   state.step_count + 1};
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::t_max: return "t_max";
    case Termination::converged: return "converged";
    case Termination::max_steps: return "max_steps";
    case Termination::failed: return "failed";
  }
  return "unknown";
}

FlowOutcome run_flow(const ConformalMetric& cm0, const FlowConfig& cfg, DiffOps& ops,
                     const FlowObserver& observer) {
  cfg.validate();
  FlowState state{0.0, cm0, 0};
  FlowOutcome outcome{state, Termination::t_max, 0.0, {}};
  auto notify = [&](RecordKind kind) {
    if (observer) observer(state, kind);
  };
  notify(RecordKind::initial);

  // Uniform runs land exactly on t_max after total_steps steps.
  std::int64_t total_steps = 0;
  double uniform = 0.0;
  if (cfg.uniform_dt || cfg.fixed_dt) {
    double dt0 = cfg.fixed_dt ? *cfg.fixed_dt : stable_dt(cm0, cfg);
    total_steps = std::int64_t(std::ceil(cfg.t_max / dt0 * (1.0 - 1e-12)));
    if (total_steps < 1) total_steps = 1;
    uniform = cfg.t_max / double(total_steps);
    outcome.dt = uniform;
  }

  std::int64_t last_recorded = 0;
  try {
    while (true) {
      if (cfg.max_steps > 0 && state.step_count >= cfg.max_steps) {
        outcome.termination = Termination::max_steps;
        break;
      }
      if (uniform > 0.0 ? state.step_count >= total_steps : state.t >= cfg.t_max) {
        outcome.termination = Termination::t_max;
        break;
      }
      ScalarField k1 = rhs_of(state.cm.background(), state.cm.u(), ops);
      if (cfg.tol_R > 0.0 && max_abs_curvature_from_rhs(state.cm, k1) < cfg.tol_R) {
        outcome.termination = Termination::converged;
        break;
      }
      double dt;
      bool last = false;
      if (uniform > 0.0) {
        dt = uniform;
        if (!cfg.fixed_dt && dt > 2.0 * stable_dt(state.cm, cfg)) {
          std::ostringstream os;
          os << "instability: uniform dt = " << dt << " exceeds twice the current stable step "
             << stable_dt(state.cm, cfg) << " at t = " << state.t
             << "; reduce cfl_safety or disable uniform_dt";
          throw NumericalError(os.str());
        }
        last = state.step_count + 1 == total_steps;
      } else {
        dt = stable_dt(state.cm, cfg);
        if (cfg.t_max - state.t <= dt) {
          dt = cfg.t_max - state.t;
          last = true;
        }
        outcome.dt = dt;
      }
      FlowState next = step_rk4(state, dt, ops, cfg.u_floor, &k1);
      if (uniform > 0.0) next.t = double(next.step_count) * uniform;
      if (last) next.t = cfg.t_max;
      state = std::move(next);
      if (state.step_count % cfg.record_every == 0) {
        notify(RecordKind::periodic);
        last_recorded = state.step_count;
      }
    }
  } catch (const NumericalError& err) {
    outcome.termination = Termination::failed;
    outcome.failure = err.what();
  }
  if (state.step_count == 0 || last_recorded != state.step_count) notify(RecordKind::final);
  outcome.final_state = state;
  return outcome;
}

}  // namespace yamabe
