// Command-line front end. Talks to the library through the C interface only.

#include "rhomb/rhomb.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

struct Failure {
  int code;
  std::string message;
};

void check(rhomb_status st, const std::string& what) {
  if (st == RHOMB_OK) return;
  std::string msg = what + ": " + rhomb_status_string(st);
  if (*rhomb_last_error()) msg += ": " + std::string(rhomb_last_error());
  throw Failure{st == RHOMB_ERR_INVALID_ARGUMENT ? kExitUsage : kExitNumerical, msg};
}

[[noreturn]] void usage(const std::string& msg) { throw Failure{kExitUsage, msg}; }

struct OrbitDeleter {
  void operator()(rhomb_orbit* o) const { rhomb_orbit_free(o); }
};
struct ListDeleter {
  void operator()(rhomb_orbit_list* l) const { rhomb_orbit_list_free(l); }
};
struct SweepDeleter {
  void operator()(rhomb_sweep* s) const { rhomb_sweep_free(s); }
};
struct SectionDeleter {
  void operator()(rhomb_section* s) const { rhomb_section_free(s); }
};
struct StringDeleter {
  void operator()(char* s) const { rhomb_string_free(s); }
};
using OrbitPtr = std::unique_ptr<rhomb_orbit, OrbitDeleter>;
using ListPtr = std::unique_ptr<rhomb_orbit_list, ListDeleter>;
using SweepPtr = std::unique_ptr<rhomb_sweep, SweepDeleter>;
using SectionPtr = std::unique_ptr<rhomb_section, SectionDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Writes text to path, or to stdout when path is empty or "-".
void emit(const std::string& path, const char* text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{kExitNumerical, "cannot open " + path + " for writing"};
  out << text;
  if (!out) throw Failure{kExitNumerical, "write failed: " + path};
}

// ---- options shared by the commands ----

struct Common {
  std::string store = "orbits.db";
  std::string method = "fit";
  int harmonics = 0;
  double tol = 1e-12;  // integrator tolerance
  double shoot_tol = 1e-12;
  double continuation_dm = 0.05;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--store", c.store, "Orbit store file (read for seeds, appended to)");
  sub->add_option("--method", c.method, "Orbit method: fit or shoot")
      ->check(CLI::IsMember({"fit", "shoot"}));
  sub->add_option("--harmonics", c.harmonics, "Harmonic count for the fit (0: automatic)")
      ->check(CLI::Range(0, 200));
  sub->add_option("--tol", c.tol, "Integrator absolute and relative tolerance")
      ->check(CLI::Range(1e-15, 1e-3));
  sub->add_option("--shoot-tol", c.shoot_tol, "Shooting Newton tolerance")
      ->check(CLI::Range(1e-15, 1e-3));
  sub->add_option("--seed-dm", c.continuation_dm,
                  "Largest mass step when continuing from a seed orbit")
      ->check(CLI::Range(1e-4, 0.5));
}

rhomb_integrator integrator_of(const Common& c) {
  rhomb_integrator cfg;
  rhomb_integrator_defaults(&cfg);
  cfg.abs_tol = cfg.rel_tol = c.tol;
  return cfg;
}

rhomb_find_options find_options_of(const Common& c) {
  rhomb_find_options o;
  rhomb_find_options_defaults(&o);
  o.method = c.method == "shoot" ? RHOMB_METHOD_SHOOT : RHOMB_METHOD_FIT;
  o.harmonics = c.harmonics;
  o.shoot_tol = c.shoot_tol;
  o.dm = c.continuation_dm;
  o.integrator = integrator_of(c);
  return o;
}

rhomb_orbit_info info_of(const rhomb_orbit* o) {
  rhomb_orbit_info i;
  check(rhomb_orbit_info_get(o, &i), "orbit info");
  return i;
}

void print_orbit(const rhomb_orbit_info& i) {
  std::cout << "m=" << num(i.m) << " zeta=" << num(i.zeta) << " E=" << num(i.energy)
            << " period_residual=" << num(i.period_residual) << " harmonics=" << i.harmonics
            << '\n';
}

OrbitPtr nearest_seed(const std::string& path, double m) {
  if (path.empty()) return nullptr;
  rhomb_orbit* o = nullptr;
  check(rhomb_store_nearest(path.c_str(), m, &o), "reading orbit store " + path);
  return OrbitPtr(o);
}

// Orbit at m: reuses an exact store record, otherwise solves from the nearest
// stored orbit (or the m = 1 bootstrap) and records the result.
OrbitPtr obtain_orbit(double m, const Common& c, bool reuse_exact) {
  OrbitPtr seed = nearest_seed(c.store, m);
  if (seed && reuse_exact && info_of(seed.get()).m == m) return seed;
  const auto opt = find_options_of(c);
  rhomb_orbit* o = nullptr;
  check(rhomb_find_orbit(m, seed.get(), &opt, &o), "find-orbit at m = " + num(m));
  OrbitPtr out(o);
  if (!c.store.empty()) check(rhomb_store_append(c.store.c_str(), out.get()), "writing store");
  return out;
}

// ---- config file ----

// key=value lines, '#' comments. Keys are long option names of the command;
// the optional key `version` must be 1. Entries become --key=value arguments
// placed before the command line ones, which therefore take precedence.
std::vector<std::string> config_args(const std::string& path, CLI::App* sub) {
  std::ifstream in(path);
  if (!in) usage("cannot read config file " + path);
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) usage(path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "version") {
      if (value != "1") usage(path + ": unsupported config version " + value);
      continue;
    }
    if (key == "config" || !sub->get_option_no_throw("--" + key)) {
      usage(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "' for " +
            sub->get_name());
    }
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

// ---- commands ----

int cmd_find_orbit(double m, const std::string& seed_path, const Common& c) {
  OrbitPtr seed = nearest_seed(seed_path, m);
  const auto opt = find_options_of(c);
  rhomb_orbit* o = nullptr;
  check(rhomb_find_orbit(m, seed.get(), &opt, &o), "find-orbit");
  OrbitPtr orbit(o);
  if (!c.store.empty()) check(rhomb_store_append(c.store.c_str(), orbit.get()), "writing store");
  const auto info = info_of(orbit.get());
  print_orbit(info);
  if (info.period_residual > 1e-8) {
    std::cerr << "warning: period residual " << num(info.period_residual) << " above 1e-8\n";
    return kExitNumerical;
  }
  return kExitOk;
}

ListPtr continuation(double from, double to, double dm, const Common& c, bool* complete) {
  if (from == to) usage("empty mass range");
  if (!(dm > 0.0)) usage("dm must be positive");
  OrbitPtr seed = obtain_orbit(from, c, true);
  const auto opt = find_options_of(c);
  struct Ctx {
    const Common* c;
  } ctx{&c};
  auto on_point = [](const rhomb_orbit_info* i, void*) {
    std::cerr << "  m=" << num(i->m) << " zeta=" << num(i->zeta) << " E=" << num(i->energy)
              << '\n';
  };
  rhomb_orbit_list* l = nullptr;
  const rhomb_status st = rhomb_continue(seed.get(), to, dm, &opt, on_point, &ctx, &l);
  ListPtr list(l);
  *complete = st == RHOMB_OK;
  if (st != RHOMB_OK) {
    if (!list || st == RHOMB_ERR_INVALID_ARGUMENT) check(st, "continue");
    std::cerr << "error: continuation incomplete: " << rhomb_last_error() << '\n';
  }
  if (!c.store.empty()) {
    for (std::size_t i = 1; i < rhomb_orbit_list_size(list.get()); ++i) {
      OrbitPtr o(rhomb_orbit_list_get(list.get(), i));
      check(rhomb_store_append(c.store.c_str(), o.get()), "writing store");
    }
  }
  return list;
}

int cmd_continue(double from, double to, double dm, const std::string& out, const Common& c) {
  bool complete = true;
  ListPtr list = continuation(from, to, dm, c, &complete);
  char* text = nullptr;
  check(rhomb_orbit_list_csv(list.get(), &text), "orbit table");
  StringPtr hold(text);
  emit(out, text);
  return complete ? kExitOk : kExitNumerical;
}

int cmd_sweep(double from, double to, double dm, const std::string& out, const Common& c) {
  bool complete = true;
  ListPtr list = continuation(from, to, dm, c, &complete);
  rhomb_analyze_options aopt;
  rhomb_analyze_options_defaults(&aopt);
  aopt.integrator = integrator_of(c);
  rhomb_sweep* s = nullptr;
  check(rhomb_sweep_run(list.get(), &aopt, &s), "stability sweep");
  SweepPtr sw(s);
  char* text = nullptr;
  check(rhomb_sweep_csv(sw.get(), &text), "stability csv");
  StringPtr hold(text);
  emit(out, text);

  bool rows_ok = true;
  for (std::size_t i = 0; i < rhomb_sweep_size(sw.get()); ++i) {
    rhomb_stability_info r;
    check(rhomb_sweep_row(sw.get(), i, &r), "sweep row");
    if (r.failed || !r.structural_ok) rows_ok = false;
  }
  int has_cross = 0, has_stable = 0;
  double cross[2] = {0, 0}, stable[2] = {0, 0};
  check(rhomb_sweep_window(sw.get(), &has_cross, cross, &has_stable, stable), "window");
  std::ostream& summary = (out.empty() || out == "-") ? std::cerr : std::cout;
  summary << "summary: stable_window=";
  if (has_stable) {
    summary << '[' << num(stable[0]) << ", " << num(stable[1]) << ']';
  } else {
    summary << "none";
  }
  summary << " lambda_block_zero_crossing=";
  if (has_cross) {
    summary << '[' << num(cross[0]) << ", " << num(cross[1]) << ']';
  } else {
    summary << "none";
  }
  summary << " rows=" << rhomb_sweep_size(sw.get()) << (complete ? "" : " (incomplete)") << '\n';
  return complete && rows_ok ? kExitOk : kExitNumerical;
}

struct PoincareArgs {
  double m = 1.0;
  bool alpha_only = false;
  std::string out, summary;
  int trace_returns = 8;
};

int cmd_poincare(const PoincareArgs& p, rhomb_section_config cfg, const Common& c) {
  double alpha = 0, rmax = 0;
  check(rhomb_alpha(p.m, &alpha, &rmax), "alpha");
  if (p.alpha_only) {
    std::cout << "m=" << num(p.m) << " alpha=" << num(alpha) << " r_max=" << num(rmax) << '\n';
    return kExitOk;
  }
  std::cerr << "m=" << num(p.m) << " alpha=" << num(alpha) << " r_max=" << num(rmax) << '\n';
  cfg.m = p.m;
  cfg.integrator = integrator_of(c);
  rhomb_section* s = nullptr;
  check(rhomb_section_grid(&cfg, &s), "section grid");
  SectionPtr sec(s);

  char* text = nullptr;
  check(rhomb_section_csv(sec.get(), &text), "section csv");
  StringPtr hold(text);
  emit(p.out, text);
  if (!p.summary.empty()) {
    char* sum = nullptr;
    check(rhomb_section_summary_csv(sec.get(), &sum), "section summary");
    StringPtr hold2(sum);
    emit(p.summary, sum);
  }

  int feasible = 0, survived = 0, escaped = 0;
  double widest = 0.0;
  for (std::size_t i = 0; i < rhomb_section_size(sec.get()); ++i) {
    rhomb_seed_summary r;
    check(rhomb_section_seed(sec.get(), i, &r), "seed summary");
    if (!r.feasible) continue;
    ++feasible;
    if (r.escaped) ++escaped;
    if (!r.escaped && r.crossings_found >= cfg.max_crossings) ++survived;
    widest = std::max(widest, r.r_extent);
  }
  std::cerr << "summary: seeds=" << rhomb_section_size(sec.get()) << " feasible=" << feasible
            << " survived=" << survived << " escaped=" << escaped
            << " max_r_extent=" << num(widest) << '\n';

  if (p.trace_returns > 0) {
    OrbitPtr orbit = obtain_orbit(p.m, c, true);
    rhomb_trace_info t;
    check(rhomb_periodic_trace(orbit.get(), p.trace_returns, &t), "periodic trace");
    std::cerr << "periodic_trace: r=" << num(t.r) << " theta=" << num(t.theta)
              << " return_index=" << t.return_index
              << " return_distance=" << num(t.return_distance) << '\n';
  }
  return kExitOk;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      usage(std::string("bad number in ") + what + ": '" + item + "'");
    }
  }
  return out;
}

struct SimulateArgs {
  double m = 1.0;
  double energy = std::nan("");
  std::string z0_text;
  double s_end = 2.0 * M_PI;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a, const Common& c) {
  const rhomb_integrator cfg = integrator_of(c);
  char* text = nullptr;
  int escaped = 0;
  const std::vector<double> z0 = parse_list(a.z0_text, "--z0");
  if (z0.empty()) {
    OrbitPtr orbit = obtain_orbit(a.m, c, true);
    check(rhomb_simulate_orbit(orbit.get(), a.s_end, &cfg, &text, &escaped), "simulate");
  } else {
    if (z0.size() != 4) usage("--z0 takes four values Q1,Q2,P1,P2");
    if (std::isnan(a.energy)) usage("--E is required with --z0");
    check(rhomb_simulate(z0.data(), a.m, a.energy, a.s_end, &cfg, &text, &escaped),
          "simulate");
  }
  StringPtr hold(text);
  emit(a.out, text);
  if (escaped) std::cerr << "trajectory escaped\n";
  return kExitOk;
}

int cmd_verify(const std::vector<double>& masses, bool json, bool break_symmetry, int fd_states) {
  rhomb_verify_options o;
  rhomb_verify_options_defaults(&o);
  if (!masses.empty()) {
    o.masses = masses.data();
    o.mass_count = masses.size();
  }
  o.break_symmetry = break_symmetry ? 1 : 0;
  o.fd_states = fd_states;
  char* text = nullptr;
  int passed = 0;
  check(rhomb_verify(&o, &text, &passed), "verify");
  StringPtr hold(text);
  if (json) {
    std::cout << text << '\n';
  } else {
    const auto j = nlohmann::json::parse(text);
    for (const auto& it : j.at("items")) {
      std::cout << (it.at("passed").get<bool>() ? "PASS " : "FAIL ") << it.at("name").get<std::string>();
      if (it.at("m").get<double>() > 0.0) std::cout << " [m=" << num(it.at("m").get<double>()) << ']';
      std::cout << " measured=" << num(it.at("measured").is_null() ? NAN : it.at("measured").get<double>())
                << " threshold=" << it.at("threshold").get<double>() << '\n';
    }
    std::cout << (passed ? "all checks passed" : "some checks FAILED") << '\n';
  }
  return passed ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rhomboidal four-body orbits: finding, continuation, stability, Poincare sections"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", rhomb_version());
  std::string config_path;
  app.add_option("--config", config_path, "key=value file; command-line flags take precedence");

  Common common;

  double m = 1.0;
  std::string seed_path;
  auto* find = app.add_subcommand("find-orbit", "Find the symmetric periodic orbit at one mass ratio");
  find->add_option("--m", m, "Mass ratio in (0, 1]")->required();
  find->add_option("--seed", seed_path, "Orbit store whose nearest record seeds the search");
  add_common(find, common);

  double from = 1.0, to = 0.5, dm = 0.01;
  std::string out;
  auto* cont = app.add_subcommand("continue", "Continue the orbit family in the mass ratio");
  cont->add_option("--from", from, "Start mass ratio")->required();
  cont->add_option("--to", to, "End mass ratio")->required();
  cont->add_option("--dm", dm, "Mass step")->required();
  cont->add_option("--out", out, "Orbit table CSV (stdout by default)");
  add_common(cont, common);

  auto* sweep = app.add_subcommand("sweep", "Continuation plus linear stability per mass ratio");
  sweep->add_option("--from", from, "Start mass ratio")->required();
  sweep->add_option("--to", to, "End mass ratio")->required();
  sweep->add_option("--dm", dm, "Mass step")->required();
  sweep->add_option("--out", out, "Stability CSV (stdout by default)");
  add_common(sweep, common);

  PoincareArgs pa;
  rhomb_section_config sc;
  rhomb_section_config_defaults(&sc);
  auto* poin = app.add_subcommand("poincare", "Poincare section grid sweep of the collinear problem");
  poin->add_option("--m", pa.m, "Mass ratio in (0, 1]")->required();
  poin->add_flag("--alpha-only", pa.alpha_only, "Print alpha and r_max only");
  poin->add_option("--out", pa.out, "Crossing CSV (stdout by default)");
  poin->add_option("--summary", pa.summary, "Per-seed summary CSV");
  poin->add_option("--r-count", sc.r_count, "Seeds along r");
  poin->add_option("--r-lo", sc.r_lo, "Smallest seed r");
  poin->add_option("--r-hi", sc.r_hi, "Largest seed r");
  poin->add_option("--theta-count", sc.theta_count, "Seeds along theta");
  poin->add_option("--theta-lo", sc.theta_lo, "Smallest seed theta");
  poin->add_option("--theta-hi", sc.theta_hi, "Largest seed theta");
  poin->add_option("--max-crossings", sc.max_crossings, "Crossings per seed");
  poin->add_option("--horizon", sc.horizon, "Longest regularized time between crossings");
  poin->add_option("--escape-ratio", sc.escape_ratio, "Hyperbolic escape test ratio (0 disables)");
  poin->add_option("--trace-returns", pa.trace_returns,
                   "Section returns searched for the periodic orbit trace (0 skips it)");
  add_common(poin, common);

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Raw 2DF trajectory dump");
  sim->add_option("--m", sa.m, "Mass ratio in (0, 1]")->required();
  sim->add_option("--E", sa.energy, "Energy (with --z0)");
  sim->add_option("--z0", sa.z0_text, "Initial state Q1,Q2,P1,P2 (default: the periodic orbit)");
  sim->add_option("--s-end", sa.s_end, "Regularized end time");
  sim->add_option("--out", sa.out, "Trajectory CSV (stdout by default)");
  add_common(sim, common);

  bool json = false, break_symmetry = false;
  std::string masses_text;
  int fd_states = 1000;
  auto* ver = app.add_subcommand("verify", "Cross-module invariant battery");
  ver->add_flag("--json", json, "Machine-readable report");
  ver->add_flag("--break-symmetry", break_symmetry, "Perturb the orbits before the symmetry check");
  ver->add_option("--masses", masses_text, "Comma-separated mass ratios (default 0.25,0.5,1.0)");
  ver->add_option("--fd-states", fd_states, "Random states for the finite-difference check")
      ->check(CLI::PositiveNumber);

  try {
    // The config file is spliced in ahead of the command's own arguments.
    std::vector<std::string> args(argv + 1, argv + argc);
    std::vector<std::string> rest;
    std::string cfg_file;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config") {
        if (i + 1 >= args.size()) usage("--config needs a file");
        cfg_file = args[++i];
      } else if (args[i].rfind("--config=", 0) == 0) {
        cfg_file = args[i].substr(9);
      } else {
        rest.push_back(args[i]);
      }
    }
    if (!cfg_file.empty()) {
      auto sub_it = std::find_if(rest.begin(), rest.end(),
                                 [](const std::string& a) { return !a.empty() && a[0] != '-'; });
      if (sub_it == rest.end()) usage("--config needs a command");
      CLI::App* sub = app.get_subcommand_no_throw(*sub_it);
      if (!sub) usage("unknown command '" + *sub_it + "'");
      const auto extra = config_args(cfg_file, sub);
      rest.insert(sub_it + 1, extra.begin(), extra.end());
    }
    std::reverse(rest.begin(), rest.end());
    app.parse(rest);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  } catch (const Failure& f) {
    std::cerr << "usage error: " << f.message << '\n';
    return kExitUsage;
  }

  try {
    if (*find) return cmd_find_orbit(m, seed_path, common);
    if (*cont) return cmd_continue(from, to, dm, out, common);
    if (*sweep) return cmd_sweep(from, to, dm, out, common);
    if (*poin) return cmd_poincare(pa, sc, common);
    if (*sim) return cmd_simulate(sa, common);
    if (*ver) return cmd_verify(parse_list(masses_text, "--masses"), json, break_symmetry, fd_states);
  } catch (const Failure& f) {
    std::cerr << (f.code == kExitUsage ? "usage error: " : "error: ") << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
