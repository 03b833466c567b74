#include "core/orbit_store.hpp"

#include "core/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace rhomb::orbit_store {

namespace {

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += csv::num(v[i]);
  }
  return s;
}

double to_double(const std::string& key, const std::string& text) {
  double x = 0.0;
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || p != end) throw IoError("orbit store: bad number for " + key + ": '" + text + "'");
  return x;
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  return out;
}

}  // namespace

std::string format_record(const OrbitSolution& o) {
  std::string s = "v=1 m=" + csv::num(o.m) + " zeta=" + csv::num(o.zeta) +
                  " E=" + csv::num(o.energy) + " period=" + csv::num(o.period) +
                  " frequency=" + csv::num(o.model.frequency) + " n=" + std::to_string(o.model.n);
  s += " a=" + join(o.model.a) + " b=" + join(o.model.b) + " c=" + join(o.model.c) +
       " d=" + join(o.model.d);
  s += " period_residual=" + csv::num(o.period_residual) + " zeta1=" + csv::num(o.zeta1) +
       " fit_residual=" + csv::num(o.fit_residual);
  return s;
}

OrbitSolution parse_record(const std::string& line) {
  std::istringstream in(line);
  std::string tok;
  std::map<std::string, std::string> kv;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) throw IoError("orbit store: malformed token '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    if (kv.count(key)) throw IoError("orbit store: duplicate key " + key);
    kv[key] = tok.substr(eq + 1);
  }
  static const std::set<std::string> known = {"v", "m", "zeta", "E", "period", "frequency", "n",
                                              "a", "b", "c", "d", "period_residual", "zeta1",
                                              "fit_residual"};
  for (const auto& [k, v] : kv) {
    if (!known.count(k)) throw IoError("orbit store: unknown key " + k);
  }
  for (const char* k : {"v", "m", "zeta", "E", "n"}) {
    if (!kv.count(k)) throw IoError(std::string("orbit store: missing key ") + k);
  }
  if (kv["v"] != "1") throw IoError("orbit store: unsupported record version " + kv["v"]);
  OrbitSolution o;
  o.m = to_double("m", kv["m"]);
  o.zeta = to_double("zeta", kv["zeta"]);
  o.energy = to_double("E", kv["E"]);
  if (kv.count("period")) o.period = to_double("period", kv["period"]);
  const int n = static_cast<int>(to_double("n", kv["n"]));
  if (n < 0) throw IoError("orbit store: negative harmonic count");
  o.model = TrigModel(n);
  if (kv.count("frequency")) o.model.frequency = to_double("frequency", kv["frequency"]);
  for (auto [key, dst] : {std::pair{"a", &o.model.a}, std::pair{"b", &o.model.b},
                          std::pair{"c", &o.model.c}, std::pair{"d", &o.model.d}}) {
    if (!kv.count(key)) {
      if (n == 0) continue;
      throw IoError(std::string("orbit store: missing coefficients ") + key);
    }
    auto v = to_list(key, kv[key]);
    if (v.size() != static_cast<std::size_t>(n + 1)) {
      throw IoError(std::string("orbit store: wrong coefficient count for ") + key);
    }
    *dst = std::move(v);
  }
  if (kv.count("period_residual")) o.period_residual = to_double("period_residual", kv["period_residual"]);
  if (kv.count("zeta1")) o.zeta1 = to_double("zeta1", kv["zeta1"]);
  if (kv.count("fit_residual")) o.fit_residual = to_double("fit_residual", kv["fit_residual"]);
  if (!(o.m > 0.0 && o.m <= 1.0)) throw IoError("orbit store: m out of range");
  return o;
}

void append(const std::string& path, const OrbitSolution& orbit) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot open orbit store for appending: " + path);
  out << format_record(orbit) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::vector<OrbitSolution> load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return {};
  std::map<double, OrbitSolution> latest;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      OrbitSolution o = parse_record(line);
      latest[o.m] = std::move(o);
    } catch (const IoError& e) {
      throw IoError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  std::vector<OrbitSolution> out;
  for (auto& [m, o] : latest) out.push_back(std::move(o));
  return out;
}

std::optional<OrbitSolution> nearest(const std::string& path, double m) {
  std::optional<OrbitSolution> best;
  for (auto& o : load(path)) {
    if (!best || std::abs(o.m - m) < std::abs(best->m - m)) best = std::move(o);
  }
  return best;
}

}  // namespace rhomb::orbit_store
