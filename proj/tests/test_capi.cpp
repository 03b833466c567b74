// Exercises the shared library through its C interface only.

#include "rhomb/rhomb.h"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

namespace {

std::string temp_path(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("rhomb_capi_" + name);
  std::filesystem::remove(p);
  return p.string();
}

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("status strings and argument checks") {
  CHECK(std::string(rhomb_status_string(RHOMB_OK)) == "ok");
  rhomb_orbit* o = nullptr;
  CHECK(rhomb_find_orbit(0.0, nullptr, nullptr, &o) == RHOMB_ERR_INVALID_ARGUMENT);
  CHECK(o == nullptr);
  CHECK(std::strlen(rhomb_last_error()) > 0);
  CHECK(rhomb_find_orbit(0.5, nullptr, nullptr, nullptr) == RHOMB_ERR_INVALID_ARGUMENT);
  rhomb_orbit_info info;
  CHECK(rhomb_orbit_info_get(nullptr, &info) == RHOMB_ERR_INVALID_ARGUMENT);
  double a = 0;
  CHECK(rhomb_alpha(1.5, &a, nullptr) == RHOMB_ERR_INVALID_ARGUMENT);
  rhomb_find_options bad;
  rhomb_find_options_defaults(&bad);
  bad.integrator.h_min = 1.0;
  CHECK(rhomb_find_orbit(0.5, nullptr, &bad, &o) == RHOMB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("orbit lifecycle") {
  rhomb_find_options opt;
  rhomb_find_options_defaults(&opt);
  rhomb_orbit* o = nullptr;
  REQUIRE(rhomb_find_orbit(1.0, nullptr, &opt, &o) == RHOMB_OK);
  rhomb_orbit_info info;
  REQUIRE(rhomb_orbit_info_get(o, &info) == RHOMB_OK);
  CHECK(info.m == 1.0);
  CHECK(info.zeta == doctest::Approx(2.7916343278745).epsilon(1e-9));
  CHECK(info.period_residual < 1e-8);
  CHECK(info.harmonics > 0);

  double z[4];
  REQUIRE(rhomb_orbit_initial_state(o, z) == RHOMB_OK);
  CHECK(z[2] == doctest::Approx(std::sqrt(8.0)));
  REQUIRE(rhomb_orbit_model_state(o, 0.0, z) == RHOMB_OK);
  CHECK(z[0] == 0.0);

  double sym[3];
  REQUIRE(rhomb_orbit_symmetry(o, sym) == RHOMB_OK);
  CHECK(sym[1] < 1e-6);

  rhomb_orbit* r = nullptr;
  REQUIRE(rhomb_orbit_rescale(o, 2.0, &r) == RHOMB_OK);
  rhomb_orbit_info ri;
  rhomb_orbit_info_get(r, &ri);
  CHECK(ri.zeta == doctest::Approx(2 * info.zeta));
  CHECK(rhomb_orbit_rescale(o, -1.0, &r) == RHOMB_ERR_INVALID_ARGUMENT);

  rhomb_stability_info s;
  REQUIRE(rhomb_analyze(o, nullptr, &s) == RHOMB_OK);
  CHECK(s.collinear == RHOMB_LINEARLY_STABLE);
  CHECK(s.planar == RHOMB_UNSTABLE);
  CHECK(s.K[0] == doctest::Approx(-1.0));
  CHECK(std::string(rhomb_verdict_string(s.collinear)) == "linearly-stable");

  rhomb_monodromy_info mono;
  REQUIRE(rhomb_monodromy_2df(o, nullptr, &mono) == RHOMB_OK);
  CHECK(mono.stable == 1);
  CHECK(std::abs(mono.determinant - 1.0) < 1e-7);

  rhomb_trace_info t;
  REQUIRE(rhomb_periodic_trace(o, 8, &t) == RHOMB_OK);
  CHECK(t.return_distance < 1e-4);

  char* csv = nullptr;
  int escaped = -1;
  REQUIRE(rhomb_simulate_orbit(o, 1.0, nullptr, &csv, &escaped) == RHOMB_OK);
  CHECK(std::string(csv).rfind("s,Q1,Q2,P1,P2,gamma\n", 0) == 0);
  CHECK(escaped == 0);
  rhomb_string_free(csv);

  rhomb_orbit_list* list = nullptr;
  int calls = 0;
  auto cb = [](const rhomb_orbit_info*, void* user) { ++*static_cast<int*>(user); };
  opt.method = RHOMB_METHOD_SHOOT;
  REQUIRE(rhomb_continue(o, 0.9, 0.05, &opt, cb, &calls, &list) == RHOMB_OK);
  CHECK(rhomb_orbit_list_size(list) == 3);
  CHECK(calls == 3);
  rhomb_sweep* sw = nullptr;
  REQUIRE(rhomb_sweep_run(list, nullptr, &sw) == RHOMB_OK);
  CHECK(rhomb_sweep_size(sw) == 3);
  REQUIRE(rhomb_sweep_csv(sw, &csv) == RHOMB_OK);
  CHECK(std::string(csv).rfind("m,zeta,E,a,b,c,d,e,corner14,lambda_block,classification,", 0) == 0);
  rhomb_string_free(csv);
  int has_cross = 1, has_stable = 1;
  REQUIRE(rhomb_sweep_window(sw, &has_cross, nullptr, &has_stable, nullptr) == RHOMB_OK);
  CHECK(has_cross == 0);
  CHECK(has_stable == 0);
  CHECK(rhomb_orbit_list_get(list, 10) == nullptr);

  rhomb_sweep_free(sw);
  rhomb_orbit_list_free(list);
  rhomb_orbit_free(r);
  rhomb_orbit_free(o);
}

TEST_CASE("store through the C interface") {
  const std::string path = temp_path("orbits.db");
  rhomb_orbit* none = reinterpret_cast<rhomb_orbit*>(1);
  REQUIRE(rhomb_store_nearest(path.c_str(), 0.5, &none) == RHOMB_OK);
  CHECK(none == nullptr);

  rhomb_find_options opt;
  rhomb_find_options_defaults(&opt);
  opt.method = RHOMB_METHOD_SHOOT;
  rhomb_orbit* o = nullptr;
  REQUIRE(rhomb_find_orbit(0.9, nullptr, &opt, &o) == RHOMB_OK);
  REQUIRE(rhomb_store_append(path.c_str(), o) == RHOMB_OK);
  rhomb_orbit* near = nullptr;
  REQUIRE(rhomb_store_nearest(path.c_str(), 0.5, &near) == RHOMB_OK);
  REQUIRE(near != nullptr);
  rhomb_orbit_info a, b;
  rhomb_orbit_info_get(o, &a);
  rhomb_orbit_info_get(near, &b);
  CHECK(a.zeta == b.zeta);
  CHECK(a.energy == b.energy);

  // Seeded search from the stored record.
  rhomb_orbit* seeded = nullptr;
  REQUIRE(rhomb_find_orbit(0.85, near, &opt, &seeded) == RHOMB_OK);
  rhomb_orbit_info c;
  rhomb_orbit_info_get(seeded, &c);
  CHECK(c.m == 0.85);
  CHECK(c.period_residual < 1e-8);

  rhomb_orbit_list* all = nullptr;
  REQUIRE(rhomb_store_load(path.c_str(), &all) == RHOMB_OK);
  CHECK(rhomb_orbit_list_size(all) == 1);
  rhomb_orbit_list_free(all);
  CHECK(rhomb_store_append("/nonexistent/dir/x.db", o) == RHOMB_ERR_IO);

  rhomb_orbit_free(seeded);
  rhomb_orbit_free(near);
  rhomb_orbit_free(o);
  std::filesystem::remove(path);
}

TEST_CASE("section through the C interface") {
  double alpha = 0, rmax = 0;
  REQUIRE(rhomb_alpha(1.0, &alpha, &rmax) == RHOMB_OK);
  CHECK(alpha == 1.0);
  CHECK(rmax == doctest::Approx(1 + 2 * std::sqrt(2.0)));

  rhomb_section_config cfg;
  rhomb_section_config_defaults(&cfg);
  CHECK(cfg.r_count == 9);
  CHECK(cfg.theta_count == 15);
  CHECK(cfg.max_crossings == 200);
  cfg.r_count = 2;
  cfg.theta_count = 2;
  cfg.max_crossings = 5;
  rhomb_section* sec = nullptr;
  REQUIRE(rhomb_section_grid(&cfg, &sec) == RHOMB_OK);
  REQUIRE(rhomb_section_size(sec) == 4);
  int total = 0;
  for (size_t i = 0; i < 4; ++i) {
    rhomb_seed_summary s;
    REQUIRE(rhomb_section_seed(sec, i, &s) == RHOMB_OK);
    total += s.crossings_found;
  }
  char* csv = nullptr;
  REQUIRE(rhomb_section_csv(sec, &csv) == RHOMB_OK);
  int lines = 0;
  for (const char* p = csv; *p; ++p) lines += *p == '\n';
  CHECK(lines == total + 1);
  rhomb_string_free(csv);
  rhomb_section_free(sec);

  cfg.r_count = 0;
  CHECK(rhomb_section_grid(&cfg, &sec) == RHOMB_ERR_INVALID_ARGUMENT);

  double drift = 1.0;
  REQUIRE(rhomb_homographic_drift(0.5, 0.5, 10.0, &drift) == RHOMB_OK);
  CHECK(drift < 1e-6);
}

TEST_CASE("verify through the C interface") {
  rhomb_verify_options opt;
  rhomb_verify_options_defaults(&opt);
  const double masses[] = {1.0};
  opt.masses = masses;
  opt.mass_count = 1;
  opt.fd_states = 20;
  char* json = nullptr;
  int passed = 0;
  REQUIRE(rhomb_verify(&opt, &json, &passed) == RHOMB_OK);
  CHECK(passed == 1);
  CHECK(std::string(json).find("\"items\"") != std::string::npos);
  rhomb_string_free(json);
  opt.break_symmetry = 1;
  REQUIRE(rhomb_verify(&opt, &json, &passed) == RHOMB_OK);
  CHECK(passed == 0);
  rhomb_string_free(json);
}

}  // TEST_SUITE
