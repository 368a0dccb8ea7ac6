#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "yamabe/yamabe.h"

TEST_CASE("version and error reporting") {
  CHECK(std::string(yb_version()) == "1.0.0");
  yb_config* cfg = nullptr;
  CHECK(yb_config_parse("{\"gamma\": 1}", &cfg) == YB_ERR_VALIDATION);
  CHECK(cfg == nullptr);
  CHECK(std::string(yb_last_error()).find("gamma") != std::string::npos);
  CHECK(yb_config_parse("{\"diagnostics\": {\"p0\": 9}}", &cfg) == YB_ERR_VALIDATION);
  CHECK(std::string(yb_last_error()).find("too small") != std::string::npos);
  CHECK(yb_config_load("/nonexistent/config.json", &cfg) == YB_ERR_IO);
  CHECK(yb_config_parse(nullptr, &cfg) == YB_ERR_VALIDATION);
  CHECK(yb_config_parse("{}", &cfg) == YB_OK);
  CHECK(std::string(yb_last_error()).empty());
  char* text = nullptr;
  CHECK(yb_config_canonical(cfg, &text) == YB_OK);
  CHECK(std::string(text).find("\"t_max\": 0.1") != std::string::npos);
  yb_string_free(text);
  yb_config_free(cfg);
}

TEST_CASE("grids and fields") {
  double lengths[3] = {1.0, 1.0, 1.0};
  yb_grid* grid = nullptr;
  CHECK(yb_grid_create(2, 16, lengths, &grid) == YB_ERR_VALIDATION);
  CHECK(yb_grid_create(3, 12, lengths, &grid) == YB_ERR_VALIDATION);
  REQUIRE(yb_grid_create(3, 16, lengths, &grid) == YB_OK);
  CHECK(yb_grid_dim(grid) == 3);
  CHECK(yb_grid_points_per_axis(grid) == 16);
  CHECK(yb_grid_size(grid) == 4096);

  yb_field* u = nullptr;
  REQUIRE(yb_field_gen_cosine(grid, 0.1, 0, 1, &u) == YB_OK);
  yb_field* r = nullptr;
  REQUIRE(yb_scalar_curvature(nullptr, u, &r) == YB_OK);
  std::vector<double> rv(yb_field_size(r));
  REQUIRE(yb_field_values(r, rv.data(), rv.size()) == YB_OK);
  const double two_pi = 2 * M_PI;
  CHECK(rv[0] == doctest::Approx(0.8 * two_pi * two_pi / std::pow(1.1, 5)).epsilon(1e-10));
  CHECK(yb_field_values(r, rv.data(), 3) == YB_ERR_VALIDATION);

  double vol = 0;
  std::vector<double> twos(4096, 2.0);
  yb_field* c = nullptr;
  REQUIRE(yb_field_from_values(grid, twos.data(), twos.size(), &c) == YB_OK);
  CHECK(yb_volume(nullptr, c, &vol) == YB_OK);
  CHECK(vol == doctest::Approx(64.0));
  CHECK(yb_field_from_values(grid, twos.data(), 10, &c) == YB_ERR_VALIDATION);

  // background v with factor u equals flat background with u v
  yb_field* v = nullptr;
  REQUIRE(yb_field_gen_bandlimited(grid, 3, 0.1, 2, &v) == YB_OK);
  yb_field* rv_field = nullptr;
  REQUIRE(yb_scalar_curvature(v, c, &rv_field) == YB_OK);
  CHECK(yb_field_gen_bandlimited(grid, 3, 0.1, 9, &v) == YB_ERR_VALIDATION);

  std::vector<double> neg(4096, 1.0);
  neg[5] = -1.0;
  yb_field* bad = nullptr;
  REQUIRE(yb_field_from_values(grid, neg.data(), neg.size(), &bad) == YB_OK);
  yb_field* rb = nullptr;
  CHECK(yb_scalar_curvature(nullptr, bad, &rb) == YB_ERR_NUMERICAL);
  CHECK(std::string(yb_last_error()).find("positivity") != std::string::npos);

  auto path = (std::filesystem::temp_directory_path() / "yamabe_capi_u.bin").string();
  CHECK(yb_field_write_snapshot(u, path.c_str()) == YB_OK);
  yb_field* back = nullptr;
  REQUIRE(yb_field_read_snapshot(path.c_str(), &back) == YB_OK);
  std::vector<double> a(4096), b(4096);
  yb_field_values(u, a.data(), a.size());
  yb_field_values(back, b.data(), b.size());
  CHECK(a == b);
  CHECK(yb_field_write_snapshot(u, "/nonexistent/dir/u.bin") == YB_ERR_IO);

  for (auto* f : {u, r, c, v, rv_field, bad, back}) yb_field_free(f);
  yb_grid_free(grid);
}

TEST_CASE("runs and records") {
  yb_config* cfg = nullptr;
  REQUIRE(yb_config_parse(R"({"grid": {"m": 16}, "initial": {"kind": "cosine", "amplitude": 0.05},
                              "flow": {"t_max": 0.001}})",
                          &cfg) == YB_OK);
  yb_run* run = nullptr;
  REQUIRE(yb_run_experiment(cfg, &run) == YB_OK);
  CHECK(std::string(yb_run_termination(run)) == "t_max");
  REQUIRE(yb_run_record_count(run) > 2);
  yb_record first, last;
  REQUIRE(yb_run_record(run, 0, &first) == YB_OK);
  REQUIRE(yb_run_record(run, yb_run_record_count(run) - 1, &last) == YB_OK);
  CHECK(first.t == 0.0);
  CHECK(last.t == doctest::Approx(0.001));
  CHECK(last.u_min >= first.u_min);
  CHECK(first.moser_ratio >= 1.0);
  CHECK(yb_run_record(run, 100000, &last) == YB_ERR_VALIDATION);
  auto dir = (std::filesystem::temp_directory_path() / "yamabe_capi_run").string();
  CHECK(yb_run_emit(cfg, run, dir.c_str()) == YB_OK);
  CHECK(std::filesystem::exists(dir + "/trajectory.csv"));
  yb_run_free(run);
  yb_config_free(cfg);

  REQUIRE(yb_config_parse(R"({"grid": {"m": 8}, "initial": {"kind": "cosine", "amplitude": 0.5},
                              "flow": {"t_max": 1.0, "fixed_dt": 0.2, "tol_R": 0}})",
                          &cfg) == YB_OK);
  run = nullptr;
  CHECK(yb_run_experiment(cfg, &run) == YB_ERR_NUMERICAL);
  REQUIRE(run != nullptr);
  CHECK(std::string(yb_run_termination(run)) == "failed");
  CHECK(std::string(yb_last_error()).find("flow degeneracy") != std::string::npos);
  CHECK(yb_run_record_count(run) == 2);
  yb_run_free(run);
  yb_config_free(cfg);
}

TEST_CASE("sequence and family") {
  yb_config* cfg = nullptr;
  REQUIRE(yb_config_parse(R"({"grid": {"m": 16}, "flow": {"t_max": 0.01}, "sequence": {"count": 3}})", &cfg) ==
          YB_OK);
  yb_sequence* seq = nullptr;
  REQUIRE(yb_sequence_run(cfg, 0, &seq) == YB_OK);
  REQUIRE(yb_sequence_member_count(seq) == 3);
  yb_member_summary m;
  REQUIRE(yb_sequence_member(seq, 2, &m) == YB_OK);
  CHECK(m.index == 3);
  CHECK(m.delta == doctest::Approx(1.0 / 3));
  CHECK(m.calibrated_min_R <= -0.99 * m.delta);
  CHECK(m.audit_passed == 1);
  CHECK(m.volume_drift < 0.0);
  auto dir = (std::filesystem::temp_directory_path() / "yamabe_capi_seq").string();
  CHECK(yb_sequence_emit(cfg, seq, dir.c_str()) == YB_OK);
  CHECK(std::filesystem::exists(dir + "/sequence_summary.json"));
  yb_sequence_free(seq);

  yb_family* fam = nullptr;
  REQUIRE(yb_family_create(cfg, &fam) == YB_OK);
  REQUIRE(yb_family_size(fam) == 3);
  double delta, amp, min_r;
  yb_field* f = nullptr;
  REQUIRE(yb_family_member(fam, 1, &delta, &amp, &min_r, &f) == YB_OK);
  CHECK(delta == 0.5);
  CHECK(min_r >= -0.5);
  CHECK(min_r <= -0.495);
  CHECK(yb_field_size(f) == 4096);
  yb_field_free(f);
  CHECK(yb_family_member(fam, 7, &delta, &amp, &min_r, &f) == YB_ERR_VALIDATION);
  yb_family_free(fam);
  yb_config_free(cfg);
}

TEST_CASE("self checks through the callback") {
  int passed = 0, count = 0;
  auto cb = [](const char*, const char*, int, const char*, void* user) { ++*static_cast<int*>(user); };
  CHECK(yb_check("grid", cb, &count, &passed) == YB_OK);
  CHECK(count >= 4);
  CHECK(passed == 1);
  CHECK(yb_check("nonsense", cb, &count, &passed) == YB_ERR_VALIDATION);
}
