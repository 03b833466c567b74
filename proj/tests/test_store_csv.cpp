#include "core/csv.hpp"
#include "core/orbit_store.hpp"
#include "core/verify.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rhomb;
using namespace testing;

namespace {

std::string temp_path(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("rhomb_test_" + name);
  std::filesystem::remove(p);
  return p.string();
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_SUITE("store") {

TEST_CASE("17 significant digits round-trip exactly") {
  for (double x : {0.1, 1.0 / 3.0, -0.41955141289735, 1e-300, 6.02214076e23}) {
    CHECK(std::stod(csv::num(x)) == x);
  }
  CHECK(csv::num(0.5) == "0.5");
}

TEST_CASE("record round trip is bit exact") {
  const OrbitSolution& o = fit_orbit(1.0);
  const OrbitSolution back = orbit_store::parse_record(orbit_store::format_record(o));
  CHECK(back.m == o.m);
  CHECK(back.zeta == o.zeta);
  CHECK(back.energy == o.energy);
  CHECK(back.period == o.period);
  CHECK(back.model.n == o.model.n);
  CHECK(back.model.a == o.model.a);
  CHECK(back.model.b == o.model.b);
  CHECK(back.model.c == o.model.c);
  CHECK(back.model.d == o.model.d);
  CHECK(back.period_residual == o.period_residual);
  CHECK(back.zeta1 == o.zeta1);
  CHECK(back.fit_residual == o.fit_residual);
  CHECK(orbit_store::format_record(o).find('\n') == std::string::npos);
}

TEST_CASE("malformed records are rejected") {
  const std::string good = orbit_store::format_record(shot_orbit(1.0));
  CHECK_THROWS_AS(orbit_store::parse_record(good + " colour=blue"), IoError);
  CHECK_THROWS_AS(orbit_store::parse_record("v=1 m=0.5 zeta=1"), IoError);
  CHECK_THROWS_AS(orbit_store::parse_record("v=2 m=0.5 zeta=1 E=-1 n=0"), IoError);
  CHECK_THROWS_AS(orbit_store::parse_record("v=1 m=abc zeta=1 E=-1 n=0"), IoError);
  CHECK_THROWS_AS(orbit_store::parse_record("v=1 m=0 zeta=1 E=-1 n=0"), IoError);
  CHECK_THROWS_AS(orbit_store::parse_record("v=1 m=0.5 zeta=1 E=-1 n=1 a=1 b=1,2 c=1,2 d=1,2"), IoError);
  CHECK_NOTHROW(orbit_store::parse_record("v=1 m=0.5 zeta=1 E=-1 n=0"));
}

TEST_CASE("append-only store: newest wins, nearest lookup") {
  const std::string path = temp_path("store.db");
  CHECK(orbit_store::load(path).empty());
  CHECK_FALSE(orbit_store::nearest(path, 0.5));

  OrbitSolution a = shot_orbit(1.0);
  OrbitSolution b = shot_orbit(0.5);
  orbit_store::append(path, a);
  orbit_store::append(path, b);
  OrbitSolution newer = a;
  newer.zeta += 1e-3;
  orbit_store::append(path, newer);
  {
    std::ofstream out(path, std::ios::app);
    out << "# comment\n\n";
  }
  const auto all = orbit_store::load(path);
  REQUIRE(all.size() == 2);
  CHECK(all[0].m == 0.5);
  CHECK(all[1].m == 1.0);
  CHECK(all[1].zeta == newer.zeta);
  CHECK(orbit_store::nearest(path, 0.6)->m == 0.5);
  CHECK(orbit_store::nearest(path, 0.9)->m == 1.0);

  {
    std::ofstream out(path, std::ios::app);
    out << "garbage line\n";
  }
  CHECK_THROWS_AS(orbit_store::load(path), IoError);
  std::filesystem::remove(path);
}

TEST_CASE("stability CSV layout") {
  stability::StabilityReport ok;
  ok.m = 0.5;
  ok.eigenvalues.assign(4, {0.0, 0.0});
  ok.K.e = 0.25;
  stability::StabilityReport failed;
  failed.m = 0.4;
  std::ostringstream os;
  csv::write_stability(os, {ok, failed});
  const std::string s = os.str();
  CHECK(s.rfind("m,zeta,E,a,b,c,d,e,corner14,lambda_block,classification,symplectic_defect,pattern_defect\n", 0) == 0);
  CHECK(count_lines(s) == 3);
  CHECK(s.find("\r") == std::string::npos);
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 12);
  }
}

TEST_CASE("section CSV has one row per crossing") {
  poincare::SectionSeries a, b, c;
  a.seed = {0.1, -0.5};
  a.crossings = {{0.2, -0.4}, {0.3, -0.3}};
  b.seed = {0.2, -0.5};
  b.escaped = true;
  b.crossings = {{0.4, 0.1}};
  c.seed = {0.9, -0.1};
  c.feasible = false;
  std::ostringstream os;
  csv::write_sections(os, {a, b, c});
  const std::string s = os.str();
  CHECK(s.rfind("seed_r,seed_theta,crossing_index,r,theta,escaped_flag\n", 0) == 0);
  CHECK(count_lines(s) == 1 + 3);
  CHECK(s.find("0.20000000000000001,-0.5,1,0.40000000000000002,0.10000000000000001,1\n") != std::string::npos);

  std::ostringstream sum;
  csv::write_section_summary(sum, {a, b, c});
  CHECK(count_lines(sum.str()) == 4);
}

TEST_CASE("verify battery and its negative control") {
  verify::VerifyOptions opt;
  opt.masses = {1.0};
  opt.fd_states = 50;
  const auto rep = verify::run(opt);
  CHECK(rep.all_passed());
  opt.break_symmetry = true;
  const auto broken = verify::run(opt);
  CHECK_FALSE(broken.all_passed());
  for (const auto& item : broken.items) {
    const bool symmetry = item.name.find("symmetry") != std::string::npos;
    CHECK(item.passed != symmetry);
  }
  const auto back = verify::from_json(verify::to_json(broken));
  REQUIRE(back.items.size() == broken.items.size());
  for (std::size_t i = 0; i < back.items.size(); ++i) {
    CHECK(back.items[i].name == broken.items[i].name);
    CHECK(back.items[i].measured == broken.items[i].measured);
    CHECK(back.items[i].passed == broken.items[i].passed);
  }
  CHECK_THROWS_AS(verify::from_json("{not json"), IoError);
}

}  // TEST_SUITE
