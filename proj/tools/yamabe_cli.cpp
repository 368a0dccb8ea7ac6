// Command-line front end; talks to the library only through the C API.
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "yamabe/yamabe.h"

namespace {

int fail(yb_status st, const std::string& what) {
  std::fprintf(stderr, "yamabe: %s: %s\n", what.c_str(), yb_last_error());
  return int(st);
}

struct ConfigHandle {
  yb_config* p = nullptr;
  ~ConfigHandle() { yb_config_free(p); }
};

yb_status load(const std::string& path, ConfigHandle& cfg) { return yb_config_load(path.c_str(), &cfg.p); }

std::string out_dir_or_default(const std::string& out, const yb_config* cfg) {
  if (!out.empty()) return out;
  char* text = nullptr;
  if (yb_config_canonical(cfg, &text) != YB_OK) return "out";
  // canonical form always carries "dir": "<value>"
  std::string s(text);
  yb_string_free(text);
  auto key = s.find("\"dir\": \"");
  if (key == std::string::npos) return "out";
  auto start = key + 8, end = s.find('"', start);
  return s.substr(start, end - start);
}

int cmd_run(const std::string& config, const std::string& out) {
  ConfigHandle cfg;
  if (auto st = load(config, cfg)) return fail(st, "config");
  const std::string dir = out_dir_or_default(out, cfg.p);
  yb_run* run = nullptr;
  yb_status st = yb_run_experiment(cfg.p, &run);
  std::string flow_error = st == YB_OK ? "" : yb_last_error();
  if (run) {
    if (auto e = yb_run_emit(cfg.p, run, dir.c_str())) {
      yb_run_free(run);
      return fail(e, "output");
    }
    std::printf("%s: %zu records, termination %s\n", dir.c_str(), yb_run_record_count(run),
                yb_run_termination(run));
    yb_run_free(run);
  }
  if (st != YB_OK) {
    std::fprintf(stderr, "yamabe: run: %s\n", run ? flow_error.c_str() : yb_last_error());
    return int(st);
  }
  return 0;
}

int cmd_sequence(const std::string& config, const std::string& out, unsigned threads) {
  ConfigHandle cfg;
  if (auto st = load(config, cfg)) return fail(st, "config");
  const std::string dir = out_dir_or_default(out, cfg.p);
  yb_sequence* seq = nullptr;
  yb_status st = yb_sequence_run(cfg.p, threads, &seq);
  std::string seq_error = st == YB_OK ? "" : yb_last_error();
  if (seq) {
    if (auto e = yb_sequence_emit(cfg.p, seq, dir.c_str())) {
      yb_sequence_free(seq);
      return fail(e, "output");
    }
    std::printf("%5s %12s %14s %14s %14s\n", "i", "delta", "flat_dist", "sup|R|", "vol_rate");
    for (size_t i = 0; i < yb_sequence_member_count(seq); ++i) {
      yb_member_summary m;
      yb_sequence_member(seq, i, &m);
      std::printf("%5d %12.5g %14.6e %14.6e %14.6e\n", m.index, m.delta, m.final_flat_distance, m.final_R_sup,
                  m.volume_drift_rate);
    }
    std::printf("sequence summary: %s\n", yb_sequence_passed(seq) ? "PASS" : "FAIL");
    yb_sequence_free(seq);
  }
  if (st != YB_OK) {
    std::fprintf(stderr, "yamabe: sequence: %s\n", seq ? seq_error.c_str() : yb_last_error());
    return int(st);
  }
  return 0;
}

int cmd_check(const std::string& suite) {
  int all = 0;
  auto print = [](const char* s, const char* name, int passed, const char* detail, void*) {
    std::printf("[%s] %s/%s: %s\n", passed ? "PASS" : "FAIL", s, name, detail);
  };
  if (auto st = yb_check(suite.c_str(), print, nullptr, &all)) return fail(st, "check");
  return all ? 0 : 1;
}

struct GenOptions {
  std::string kind;
  std::uint64_t seed = 1;
  int n = 3;
  int m = 32;
  double amplitude = 0.3;
  int kmax = 2;
  int count = 8;
  std::string config;
  std::string out;
};

int cmd_gen(const GenOptions& o) {
  if (o.kind == "bandlimited") {
    std::vector<double> lengths(std::size_t(std::max(o.n, 0)), 1.0);
    yb_grid* grid = nullptr;
    if (auto st = yb_grid_create(o.n, o.m, lengths.data(), &grid)) return fail(st, "grid");
    yb_field* f = nullptr;
    yb_status st = yb_field_gen_bandlimited(grid, o.seed, o.amplitude, o.kmax, &f);
    yb_grid_free(grid);
    if (st) return fail(st, "gen");
    std::string path = o.out.empty() ? "bandlimited_" + std::to_string(o.seed) + ".bin" : o.out;
    st = yb_field_write_snapshot(f, path.c_str());
    yb_field_free(f);
    if (st) return fail(st, "output");
    std::printf("%s\n", path.c_str());
    return 0;
  }

  ConfigHandle cfg;
  if (!o.config.empty()) {
    if (auto st = load(o.config, cfg)) return fail(st, "config");
  } else {
    std::string lengths;
    for (int k = 0; k < o.n; ++k) lengths += k ? ",1.0" : "1.0";
    std::string text = "{\"grid\":{\"n\":" + std::to_string(o.n) + ",\"m\":" + std::to_string(o.m) +
                       ",\"lengths\":[" + lengths + "]},\"sequence\":{\"count\":" + std::to_string(o.count) +
                       ",\"base_seed\":" + std::to_string(o.seed) + ",\"kmax\":" + std::to_string(o.kmax) + "}}";
    if (auto st = yb_config_parse(text.c_str(), &cfg.p)) return fail(st, "config");
  }
  yb_family* fam = nullptr;
  if (auto st = yb_family_create(cfg.p, &fam)) return fail(st, "calibration");
  const std::string dir = o.out.empty() ? "delta_family" : o.out;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    yb_family_free(fam);
    std::fprintf(stderr, "yamabe: output: cannot create %s\n", dir.c_str());
    return int(YB_ERR_IO);
  }
  for (size_t i = 0; i < yb_family_size(fam); ++i) {
    double delta, amp, min_r;
    yb_field* f = nullptr;
    yb_family_member(fam, i, &delta, &amp, &min_r, &f);
    char name[32];
    std::snprintf(name, sizeof name, "member_%02zu.bin", i + 1);
    std::string path = (std::filesystem::path(dir) / name).string();
    yb_status st = yb_field_write_snapshot(f, path.c_str());
    yb_field_free(f);
    if (st) {
      yb_family_free(fam);
      return fail(st, "output");
    }
    std::printf("%s delta=%.6g amplitude=%.9g min_R=%.9g\n", path.c_str(), delta, amp, min_r);
  }
  yb_family_free(fam);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Yamabe flow on flat and conformally flat tori"};
  app.require_subcommand(1);
  app.set_version_flag("--version", yb_version());

  std::string config, out, suite = "all";
  unsigned threads = 0;
  auto* run = app.add_subcommand("run", "run one flow and write trajectory outputs");
  run->add_option("--config", config, "experiment config (JSON)")->required();
  run->add_option("--out", out, "output directory (default: output.dir from the config)");

  auto* seq = app.add_subcommand("sequence", "run the delta-family sequence experiment");
  seq->add_option("--config", config, "experiment config (JSON)")->required();
  seq->add_option("--out", out, "output directory (default: output.dir from the config)");
  seq->add_option("--threads", threads, "worker threads, 0 = all cores");

  auto* check = app.add_subcommand("check", "run the built-in property checks");
  check->add_option("--suite", suite, "suite to run")->check(CLI::IsMember({"all", "grid", "flow", "diagnostics"}));

  GenOptions gen_opts;
  auto* gen = app.add_subcommand("gen", "write initial-data snapshots");
  gen->add_option("--kind", gen_opts.kind, "generator")->required()->check(CLI::IsMember({"bandlimited", "delta-family"}));
  gen->add_option("--seed", gen_opts.seed, "shape seed")->required();
  gen->add_option("--n", gen_opts.n, "dimension (3 or 4)");
  gen->add_option("--m", gen_opts.m, "points per axis");
  gen->add_option("--amplitude", gen_opts.amplitude, "max |log u| (bandlimited)");
  gen->add_option("--kmax", gen_opts.kmax, "largest wavenumber per axis");
  gen->add_option("--count", gen_opts.count, "family size (delta-family)");
  gen->add_option("--config", gen_opts.config, "take grid, background and sequence settings from a config");
  gen->add_option("--out", gen_opts.out, "output file (bandlimited) or directory (delta-family)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : int(YB_ERR_VALIDATION);
  }

  if (*run) return cmd_run(config, out);
  if (*seq) return cmd_sequence(config, out, threads);
  if (*check) return cmd_check(suite);
  return cmd_gen(gen_opts);
}
