#include "yamabe/yamabe.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "error.hpp"
#include "experiment.hpp"
#include "outputs.hpp"
#include "selfcheck.hpp"

struct yb_config {
  yamabe::ExperimentConfig cfg;
};
struct yb_grid {
  yamabe::PeriodicGrid grid;
};
struct yb_field {
  yamabe::ScalarField field;
};
struct yb_run {
  yamabe::RunResult result;
};
struct yb_sequence {
  yamabe::SequenceResult result;
};
struct yb_family {
  std::vector<yamabe::CalibratedMember> members;
};

namespace {

thread_local std::string g_last_error;

template <class F>
yb_status guard(F&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const yamabe::Error& e) {
    g_last_error = e.what();
    switch (e.kind()) {
      case yamabe::ErrorKind::validation: return YB_ERR_VALIDATION;
      case yamabe::ErrorKind::numerical: return YB_ERR_NUMERICAL;
      case yamabe::ErrorKind::io: return YB_ERR_IO;
    }
    return YB_ERR_INTERNAL;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return YB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return YB_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw yamabe::ValidationError(what);
}

char* dup_string(const std::string& s) {
  char* p = new char[s.size() + 1];
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

yamabe::ConformalMetric metric_of(const yb_field* v, const yb_field* u, yamabe::DiffOps& ops) {
  const auto& grid = u->field.grid();
  if (!v) return yamabe::ConformalMetric(yamabe::Background::flat(grid), u->field);
  yamabe::require_same_grid(v->field, u->field, "background factor and conformal factor");
  return yamabe::ConformalMetric(yamabe::Background::conformally_flat(v->field, ops), u->field);
}

yb_record to_record(const yamabe::DiagnosticsRecord& r) {
  return yb_record{r.t,     r.dt,   r.u_min,  r.u_max,
                   r.vol_g, r.R_min, r.R_max, r.R_l1,
                   r.vol_identity_residual,   r.evoR_residual_l2,
                   r.lp_dist_initial,         r.lp_dist_flat,
                   r.moser_ratio};
}

}  // namespace

extern "C" {

const char* yb_version(void) { return "1.0.0"; }
const char* yb_last_error(void) { return g_last_error.c_str(); }
void yb_string_free(char* s) { delete[] s; }

yb_status yb_config_parse(const char* text, yb_config** out) {
  return guard([&] {
    require(text && out, "yb_config_parse: null argument");
    *out = new yb_config{yamabe::parse_config(text)};
    return YB_OK;
  });
}

yb_status yb_config_load(const char* path, yb_config** out) {
  return guard([&] {
    require(path && out, "yb_config_load: null argument");
    *out = new yb_config{yamabe::load_config(path)};
    return YB_OK;
  });
}

yb_status yb_config_canonical(const yb_config* cfg, char** out) {
  return guard([&] {
    require(cfg && out, "yb_config_canonical: null argument");
    *out = dup_string(yamabe::canonical_config(cfg->cfg));
    return YB_OK;
  });
}

void yb_config_free(yb_config* cfg) { delete cfg; }

yb_status yb_grid_create(int n, int m, const double* lengths, yb_grid** out) {
  return guard([&] {
    require(lengths && out, "yb_grid_create: null argument");
    require(n > 2 && n <= yamabe::kMaxDim, "yb_grid_create: dimension must satisfy 2 < n <= 4");
    *out = new yb_grid{yamabe::PeriodicGrid(n, m, std::span<const double>(lengths, std::size_t(n)))};
    return YB_OK;
  });
}

int yb_grid_dim(const yb_grid* grid) { return grid ? grid->grid.dim() : 0; }
int yb_grid_points_per_axis(const yb_grid* grid) { return grid ? grid->grid.points_per_axis() : 0; }
size_t yb_grid_size(const yb_grid* grid) { return grid ? grid->grid.size() : 0; }
void yb_grid_free(yb_grid* grid) { delete grid; }

yb_status yb_field_from_values(const yb_grid* grid, const double* values, size_t count, yb_field** out) {
  return guard([&] {
    require(grid && values && out, "yb_field_from_values: null argument");
    require(count == grid->grid.size(), "yb_field_from_values: count does not match grid size");
    *out = new yb_field{yamabe::ScalarField(grid->grid, std::vector<double>(values, values + count))};
    return YB_OK;
  });
}

yb_status yb_field_gen_bandlimited(const yb_grid* grid, uint64_t seed, double amplitude, int kmax, yb_field** out) {
  return guard([&] {
    require(grid && out, "yb_field_gen_bandlimited: null argument");
    *out = new yb_field{yamabe::gen_bandlimited(grid->grid, seed, amplitude, kmax)};
    return YB_OK;
  });
}

yb_status yb_field_gen_cosine(const yb_grid* grid, double amplitude, int axis, int mode, yb_field** out) {
  return guard([&] {
    require(grid && out, "yb_field_gen_cosine: null argument");
    *out = new yb_field{yamabe::gen_cosine(grid->grid, amplitude, axis, mode)};
    return YB_OK;
  });
}

size_t yb_field_size(const yb_field* field) { return field ? field->field.size() : 0; }

yb_status yb_field_values(const yb_field* field, double* out, size_t count) {
  return guard([&] {
    require(field && out, "yb_field_values: null argument");
    require(count == field->field.size(), "yb_field_values: count does not match field size");
    std::memcpy(out, field->field.values().data(), count * sizeof(double));
    return YB_OK;
  });
}

yb_status yb_field_write_snapshot(const yb_field* field, const char* path) {
  return guard([&] {
    require(field && path, "yb_field_write_snapshot: null argument");
    yamabe::write_snapshot(path, field->field);
    return YB_OK;
  });
}

yb_status yb_field_read_snapshot(const char* path, yb_field** out) {
  return guard([&] {
    require(path && out, "yb_field_read_snapshot: null argument");
    *out = new yb_field{yamabe::read_snapshot(path)};
    return YB_OK;
  });
}

void yb_field_free(yb_field* field) { delete field; }

yb_status yb_scalar_curvature(const yb_field* v, const yb_field* u, yb_field** out) {
  return guard([&] {
    require(u && out, "yb_scalar_curvature: null argument");
    yamabe::DiffOps ops(u->field.grid(), yamabe::DiffScheme::spectral);
    *out = new yb_field{yamabe::scalar_curvature(metric_of(v, u, ops), ops)};
    return YB_OK;
  });
}

yb_status yb_volume(const yb_field* v, const yb_field* u, double* out) {
  return guard([&] {
    require(u && out, "yb_volume: null argument");
    yamabe::DiffOps ops(u->field.grid(), yamabe::DiffScheme::spectral);
    *out = yamabe::volume(metric_of(v, u, ops));
    return YB_OK;
  });
}

yb_status yb_run_experiment(const yb_config* cfg, yb_run** out) {
  return guard([&] {
    require(cfg && out, "yb_run_experiment: null argument");
    auto* run = new yb_run{yamabe::run_experiment(cfg->cfg)};
    *out = run;
    if (run->result.failed()) {
      g_last_error = run->result.trajectory.outcome.failure;
      return YB_ERR_NUMERICAL;
    }
    return YB_OK;
  });
}

yb_status yb_run_emit(const yb_config* cfg, const yb_run* run, const char* dir) {
  return guard([&] {
    require(cfg && run && dir, "yb_run_emit: null argument");
    yamabe::emit_run_outputs(cfg->cfg, run->result, dir);
    return YB_OK;
  });
}

size_t yb_run_record_count(const yb_run* run) { return run ? run->result.trajectory.records.size() : 0; }

yb_status yb_run_record(const yb_run* run, size_t i, yb_record* out) {
  return guard([&] {
    require(run && out, "yb_run_record: null argument");
    require(i < run->result.trajectory.records.size(), "yb_run_record: index out of range");
    *out = to_record(run->result.trajectory.records[i]);
    return YB_OK;
  });
}

const char* yb_run_termination(const yb_run* run) {
  return run ? yamabe::to_string(run->result.trajectory.outcome.termination) : "";
}

void yb_run_free(yb_run* run) { delete run; }

yb_status yb_sequence_run(const yb_config* cfg, unsigned threads, yb_sequence** out) {
  return guard([&] {
    require(cfg && out, "yb_sequence_run: null argument");
    auto* seq = new yb_sequence{yamabe::run_sequence_experiment(cfg->cfg, threads)};
    *out = seq;
    if (seq->result.failed_member) {
      g_last_error = seq->result.failure;
      return YB_ERR_NUMERICAL;
    }
    return YB_OK;
  });
}

yb_status yb_sequence_emit(const yb_config* cfg, const yb_sequence* seq, const char* dir) {
  return guard([&] {
    require(cfg && seq && dir, "yb_sequence_emit: null argument");
    yamabe::emit_sequence_outputs(cfg->cfg, seq->result, dir);
    return YB_OK;
  });
}

size_t yb_sequence_member_count(const yb_sequence* seq) { return seq ? seq->result.members.size() : 0; }

yb_status yb_sequence_member(const yb_sequence* seq, size_t i, yb_member_summary* out) {
  return guard([&] {
    require(seq && out, "yb_sequence_member: null argument");
    require(i < seq->result.members.size(), "yb_sequence_member: index out of range");
    const auto& m = seq->result.members[i];
    out->index = m.index;
    out->delta = m.delta;
    out->amplitude = m.amplitude;
    out->calibrated_min_R = m.calibrated_min_R;
    out->final_flat_distance = m.run.final_flat_distance;
    out->final_R_sup = m.run.final_R_sup;
    out->volume_drift = m.run.final_volume - m.run.initial_volume;
    out->volume_drift_rate = m.run.drift_rate ? m.run.drift_rate->c_fit : -1.0;
    out->audit_passed = m.run.initial_audit.all_passed() ? 1 : 0;
    return YB_OK;
  });
}

int yb_sequence_passed(const yb_sequence* seq) {
  return seq && !seq->result.failed_member && seq->result.summary.passed() ? 1 : 0;
}

void yb_sequence_free(yb_sequence* seq) { delete seq; }

yb_status yb_family_create(const yb_config* cfg, yb_family** out) {
  return guard([&] {
    require(cfg && out, "yb_family_create: null argument");
    const auto& c = cfg->cfg;
    c.validate();
    yamabe::DiffOps ops(yamabe::make_grid(c.grid), c.flow.scheme);
    auto bg = yamabe::make_background(c, ops);
    yamabe::Shape shape;
    shape.kind = c.sequence.shape == "cosine" ? yamabe::Shape::Kind::cosine : yamabe::Shape::Kind::bandlimited;
    shape.seed = c.sequence.base_seed;
    shape.kmax = c.sequence.kmax;
    *out = new yb_family{
        yamabe::calibrate_delta_family(bg, shape, c.sequence.seed_stride, c.sequence.schedule(), ops)};
    return YB_OK;
  });
}

size_t yb_family_size(const yb_family* family) { return family ? family->members.size() : 0; }

yb_status yb_family_member(const yb_family* family, size_t i, double* delta, double* amplitude, double* min_R,
                           yb_field** field) {
  return guard([&] {
    require(family, "yb_family_member: null argument");
    require(i < family->members.size(), "yb_family_member: index out of range");
    const auto& m = family->members[i];
    if (delta) *delta = m.delta;
    if (amplitude) *amplitude = m.amplitude;
    if (min_R) *min_R = m.min_R;
    if (field) *field = new yb_field{m.metric.u()};
    return YB_OK;
  });
}

void yb_family_free(yb_family* family) { delete family; }

yb_status yb_check(const char* suite, yb_check_callback callback, void* user, int* all_passed) {
  return guard([&] {
    require(suite, "yb_check: null suite");
    bool ok = true;
    for (const auto& r : yamabe::run_selfcheck(suite)) {
      ok = ok && r.passed;
      if (callback) callback(r.suite.c_str(), r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), user);
    }
    if (all_passed) *all_passed = ok ? 1 : 0;
    return YB_OK;
  });
}

}  // extern "C"
