#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace yamabe {

using nlohmann::json;

std::vector<double> SequenceSpec::schedule() const {
  if (!deltas.empty()) return deltas;
  std::vector<double> out;
  for (int i = 1; i <= count; ++i) out.push_back(1.0 / i);
  return out;
}

namespace {

// Walks one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_ + ": expected an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string child(const std::string& key) const { return path_ + "/" + key; }

  template <typename T>
  void get(const std::string& key, T& out) {
    const json* v = find(key);
    if (!v) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) throw std::invalid_argument("expected a boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) throw std::invalid_argument("expected a string");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v->is_number_integer()) throw std::invalid_argument("expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v->is_number_integer() && !v->is_number_unsigned() && v->get<std::int64_t>() < 0)
            throw std::invalid_argument("expected a non-negative integer");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v->is_number()) throw std::invalid_argument("expected a number");
      }
      out = v->get<T>();
    } catch (const std::exception& e) {
      throw ValidationError(child(key) + ": " + e.what());
    }
  }

  void get_list(const std::string& key, std::vector<double>& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_array()) throw ValidationError(child(key) + ": expected an array of numbers");
    out.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number())
        throw ValidationError(child(key) + "/" + std::to_string(i) + ": expected a number");
      out.push_back((*v)[i].get<double>());
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ValidationError(child(it.key()) + ": unknown key \"" + it.key() + "\"");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

FieldSpec read_field(const json& j, const std::string& path) {
  FieldSpec f;
  ObjectReader r(j, path);
  r.get("kind", f.kind);
  r.get("value", f.value);
  r.get("amplitude", f.amplitude);
  r.get("axis", f.axis);
  r.get("mode", f.mode);
  r.get("seed", f.seed);
  r.get("kmax", f.kmax);
  r.get("scale", f.scale);
  r.finish();
  return f;
}

json field_json(const FieldSpec& f) {
  return json{{"kind", f.kind}, {"value", f.value}, {"amplitude", f.amplitude}, {"axis", f.axis},
              {"mode", f.mode}, {"seed", f.seed},   {"kmax", f.kmax},           {"scale", f.scale}};
}

const char* scheme_name(DiffScheme s) { return s == DiffScheme::spectral ? "spectral" : "finite_difference"; }

void validate_field(const FieldSpec& f, const GridSpec& g, const std::string& path, bool allow_delta) {
  static const std::set<std::string> kinds = {"constant", "cosine", "bandlimited", "delta"};
  if (!kinds.count(f.kind) || (f.kind == "delta" && !allow_delta))
    throw ValidationError(path + "/kind: unsupported generator \"" + f.kind + "\"");
  if (!(f.scale > 0.0)) throw ValidationError(path + "/scale: must be positive");
  if (f.kind == "constant" && !(f.value > 0.0)) throw ValidationError(path + "/value: must be positive");
  if (f.kind == "cosine") {
    if (f.axis < 0 || f.axis >= g.n) throw ValidationError(path + "/axis: out of range");
    if (f.mode < 1 || f.mode > g.m / 4) throw ValidationError(path + "/mode: must lie in [1, m/4]");
    if (!(std::abs(f.amplitude) < 1.0)) throw ValidationError(path + "/amplitude: |amplitude| < 1 keeps u positive");
  }
  if (f.kind == "bandlimited" || f.kind == "delta") {
    if (f.kmax < 1 || f.kmax > g.m / 4) throw ValidationError(path + "/kmax: must lie in [1, m/4] (aliasing guard)");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (grid.lengths.size() != std::size_t(grid.n))
    throw ValidationError("/grid/lengths: expected " + std::to_string(grid.n) + " entries");
  PeriodicGrid g(grid.n, grid.m, grid.lengths);
  (void)g;
  if (background.kind != "flat" && background.kind != "conformally_flat")
    throw ValidationError("/background/kind: expected \"flat\" or \"conformally_flat\"");
  if (background.kind == "conformally_flat") {
    if (!background.v) throw ValidationError("/background/v: required for a conformally flat background");
    validate_field(*background.v, grid, "/background/v", false);
  } else if (background.v) {
    throw ValidationError("/background/v: only allowed for a conformally flat background");
  }
  validate_field(initial, grid, "/initial", true);
  try {
    flow.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("/") + e.what());
  }
  try {
    diagnostics.validate(grid.n);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("/") + e.what());
  }
  if (sequence.count < 1) throw ValidationError("/sequence/count: must be >= 1");
  if (!sequence.deltas.empty() && sequence.deltas.size() != std::size_t(sequence.count))
    throw ValidationError("/sequence/deltas: expected " + std::to_string(sequence.count) + " entries");
  for (std::size_t i = 0; i < sequence.deltas.size(); ++i) {
    if (!(sequence.deltas[i] > 0.0)) throw ValidationError("/sequence/deltas: entries must be positive");
    if (i > 0 && sequence.deltas[i] > sequence.deltas[i - 1])
      throw ValidationError("/sequence/deltas: schedule must be non-increasing");
  }
  if (sequence.shape != "bandlimited" && sequence.shape != "cosine")
    throw ValidationError("/sequence/shape: expected \"bandlimited\" or \"cosine\"");
  if (sequence.kmax < 1 || sequence.kmax > grid.m / 4)
    throw ValidationError("/sequence/kmax: must lie in [1, m/4] (aliasing guard)");
  if (output.dir.empty()) throw ValidationError("/output/dir: must not be empty");
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  ObjectReader root(j, "");

  if (const json* g = root.find("grid")) {
    ObjectReader r(*g, "/grid");
    r.get("n", cfg.grid.n);
    r.get("m", cfg.grid.m);
    cfg.grid.lengths.assign(std::size_t(std::max(cfg.grid.n, 0)), 1.0);
    r.get_list("lengths", cfg.grid.lengths);
    r.finish();
  }
  if (const json* b = root.find("background")) {
    ObjectReader r(*b, "/background");
    r.get("kind", cfg.background.kind);
    if (const json* v = r.find("v"); v && !v->is_null()) cfg.background.v = read_field(*v, "/background/v");
    r.finish();
  }
  if (const json* i = root.find("initial")) cfg.initial = read_field(*i, "/initial");
  if (const json* f = root.find("flow")) {
    ObjectReader r(*f, "/flow");
    r.get("t_max", cfg.flow.t_max);
    r.get("cfl_safety", cfg.flow.cfl_safety);
    r.get("tol_R", cfg.flow.tol_R);
    r.get("record_every", cfg.flow.record_every);
    r.get("u_floor", cfg.flow.u_floor);
    r.get("uniform_dt", cfg.flow.uniform_dt);
    if (const json* d = r.find("fixed_dt"); d && !d->is_null()) {
      if (!d->is_number()) throw ValidationError("/flow/fixed_dt: expected a number or null");
      cfg.flow.fixed_dt = d->get<double>();
    }
    r.get("max_steps", cfg.flow.max_steps);
    std::string scheme = scheme_name(cfg.flow.scheme);
    r.get("scheme", scheme);
    if (scheme == "spectral") cfg.flow.scheme = DiffScheme::spectral;
    else if (scheme == "finite_difference") cfg.flow.scheme = DiffScheme::finite_difference;
    else throw ValidationError("/flow/scheme: expected \"spectral\" or \"finite_difference\"");
    r.finish();
  }
  if (const json* d = root.find("diagnostics")) {
    ObjectReader r(*d, "/diagnostics");
    r.get("p0", cfg.diagnostics.p0);
    r.get_list("p", cfg.diagnostics.p);
    r.get_list("alpha", cfg.diagnostics.alpha);
    r.get("epsilon", cfg.diagnostics.epsilon);
    r.get("lambda", cfg.diagnostics.lambda);
    r.get("delta", cfg.diagnostics.delta);
    r.finish();
  }
  if (const json* s = root.find("sequence")) {
    ObjectReader r(*s, "/sequence");
    r.get("count", cfg.sequence.count);
    r.get_list("deltas", cfg.sequence.deltas);
    r.get("shape", cfg.sequence.shape);
    r.get("base_seed", cfg.sequence.base_seed);
    r.get("seed_stride", cfg.sequence.seed_stride);
    r.get("kmax", cfg.sequence.kmax);
    r.finish();
  }
  if (const json* o = root.find("output")) {
    ObjectReader r(*o, "/output");
    r.get("dir", cfg.output.dir);
    r.get("plots", cfg.output.plots);
    r.get("snapshot", cfg.output.snapshot);
    r.finish();
  }
  root.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_config(const ExperimentConfig& cfg) {
  json j;
  j["grid"] = {{"n", cfg.grid.n}, {"m", cfg.grid.m}, {"lengths", cfg.grid.lengths}};
  j["background"] = {{"kind", cfg.background.kind},
                     {"v", cfg.background.v ? field_json(*cfg.background.v) : json(nullptr)}};
  j["initial"] = field_json(cfg.initial);
  const auto& f = cfg.flow;
  j["flow"] = {{"t_max", f.t_max},
               {"cfl_safety", f.cfl_safety},
               {"tol_R", f.tol_R},
               {"record_every", f.record_every},
               {"u_floor", f.u_floor},
               {"uniform_dt", f.uniform_dt},
               {"fixed_dt", f.fixed_dt ? json(*f.fixed_dt) : json(nullptr)},
               {"max_steps", f.max_steps},
               {"scheme", scheme_name(f.scheme)}};
  const auto& d = cfg.diagnostics;
  j["diagnostics"] = {{"p0", d.p0},           {"p", d.p},           {"alpha", d.alpha},
                      {"epsilon", d.epsilon}, {"lambda", d.lambda}, {"delta", d.delta}};
  const auto& s = cfg.sequence;
  j["sequence"] = {{"count", s.count},         {"deltas", s.deltas},           {"shape", s.shape},
                   {"base_seed", s.base_seed}, {"seed_stride", s.seed_stride}, {"kmax", s.kmax}};
  j["output"] = {{"dir", cfg.output.dir}, {"plots", cfg.output.plots}, {"snapshot", cfg.output.snapshot}};
  return j.dump(2);
}

}  // namespace yamabe
