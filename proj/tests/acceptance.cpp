// Acceptance checks, one line per criterion:
//   PASS|FAIL criterion N: <what> measured=<...>
// Usage: acceptance [N ...]   (no argument runs all ten)

#include "core/dynamics.hpp"
#include "core/flow.hpp"
#include "core/model.hpp"
#include "core/orbit.hpp"
#include "core/poincare.hpp"
#include "core/stability.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace rhomb;

namespace {

struct Outcome {
  bool pass = true;
  std::string what;
  std::ostringstream measured;
};

double max_abs(const Eigen::Ref<const Eigen::MatrixXd>& M) { return M.cwiseAbs().maxCoeff(); }

std::string g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// ---- shared families, built on first use ----

orbit::ContinuationOptions fit_options() { return {}; }

const std::vector<OrbitSolution>& long_family() {
  static const std::vector<OrbitSolution> fam = [] {
    const auto opt = fit_options();
    const OrbitSolution seed = orbit::find_orbit(MassRatio(1.0), std::nullopt, opt);
    auto res = orbit::continue_in_mass(seed, 0.02, 0.01, opt);
    if (!res.complete) std::fprintf(stderr, "long sweep incomplete: %s\n", res.failure.c_str());
    return res.orbits;
  }();
  return fam;
}

const std::vector<OrbitSolution>& window_family() {
  static const std::vector<OrbitSolution> fam = [] {
    const auto opt = fit_options();
    const OrbitSolution seed = orbit::find_orbit(MassRatio(0.41), std::nullopt, opt);
    auto res = orbit::continue_in_mass(seed, 0.39, 0.001, opt);
    if (!res.complete) std::fprintf(stderr, "window sweep incomplete: %s\n", res.failure.c_str());
    return res.orbits;
  }();
  return fam;
}

const std::vector<stability::StabilityReport>& long_sweep() {
  static const auto rows = stability::sweep(long_family());
  return rows;
}

const std::vector<stability::StabilityReport>& window_sweep() {
  static const auto rows = stability::sweep(window_family());
  return rows;
}

const stability::StabilityReport* row_at(const std::vector<stability::StabilityReport>& rows,
                                         double m) {
  for (const auto& r : rows) {
    if (std::abs(r.m - m) < 1e-9) return &r;
  }
  return nullptr;
}

// ---- criteria ----

void c1(Outcome& o) {
  o.what = "structure identities";
  const Mat4 S2 = model::S2(), J2 = model::J2();
  const Mat8 S4 = model::S4(), J4 = model::J4(), Y0 = model::Y0();
  const double d = std::max({max_abs(S2 * S2 - Mat4::Identity()),
                             max_abs(S4 * S4 - Mat8::Identity()),
                             max_abs(S2 * J2 + J2 * S2),
                             max_abs(S4 * J4 + J4 * S4),
                             max_abs(Y0.transpose() * Y0 - Mat8::Identity()),
                             max_abs(Y0.transpose() * J4 * Y0 - J4),
                             max_abs(-Y0.inverse() * S4 * Y0 - model::Lambda())});
  o.pass = d <= 1e-14;
  o.measured << "max_defect=" << g(d) << " threshold=1e-14";
}

template <class Vec, class Mat, class Gamma, class Field>
double fd_error(const Vec& z, const Mat& J, Gamma gamma, Field field) {
  Vec grad;
  for (int i = 0; i < z.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(z[i]));
    Vec zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    grad[i] = (gamma(zp) - gamma(zm)) / (2.0 * h);
  }
  const Vec exact = field(z);
  return (J * grad - exact).template lpNorm<Eigen::Infinity>() /
         std::max(1.0, exact.template lpNorm<Eigen::Infinity>());
}

void c2(Outcome& o) {
  o.what = "vector field and Gamma conservation";
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> uq(0.2, 2.0), up(-3.0, 3.0), um(0.05, 1.0),
      ue(-2.0, -0.1), coin(0.0, 1.0);
  double err = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const MassRatio m(um(rng));
    const double E = ue(rng);
    const Vec4 z2(uq(rng), uq(rng), up(rng), up(rng));
    Vec8 z4;
    for (int i = 0; i < 4; ++i) z4[i] = uq(rng) * (coin(rng) < 0.5 ? -1.0 : 1.0);
    for (int i = 4; i < 8; ++i) z4[i] = up(rng);
    err = std::max(err, fd_error(z2, model::J2(), [&](const Vec4& z) { return model::gamma_2df(z, m, E); },
                                 [&](const Vec4& z) { return dynamics::vf_2df(z, m, E); }));
    err = std::max(err, fd_error(z4, model::J4(), [&](const Vec8& z) { return model::gamma_4df(z, m, E); },
                                 [&](const Vec8& z) { return dynamics::vf_4df(z, m, E); }));
  }
  const OrbitSolution orb = orbit::find_orbit(MassRatio(1.0), std::nullopt, fit_options());
  const MassRatio m1(1.0);
  const auto tr = flow::trajectory_2df(orb.initial_state(), m1, orb.energy, orb.period);
  double drift = 0.0;
  for (const auto& s : tr.samples) drift = std::max(drift, std::abs(model::gamma_2df(s.y, m1, orb.energy)));
  o.pass = err < 1e-6 && drift < 1e-9;
  o.measured << "fd_rel_error=" << g(err) << " (<1e-6) gamma_drift=" << g(drift) << " (<1e-9)";
}

void c3(Outcome& o) {
  o.what = "shooting and fit agree for m = 0.1..1.0";
  std::vector<double> masses;
  for (int k = 1; k <= 10; ++k) masses.push_back(k / 10.0);
  orbit::ContinuationOptions shoot;
  shoot.method = orbit::Method::Shoot;
  const auto shot = orbit::find_family(masses, shoot, 0.01);
  double agree = 0.0, period = 0.0, sym = 0.0;
  double worst_m = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const OrbitSolution& s = shot[i];
    const OrbitSolution f = orbit::fit_orbit(MassRatio(masses[i]), s.energy, s.model);
    const double a = std::max(std::abs(s.zeta - f.zeta), std::abs(s.energy - f.energy));
    if (a > agree) worst_m = masses[i];
    agree = std::max(agree, a);
    period = std::max(period, f.period_residual);
    const auto r = orbit::symmetry_residuals(f);
    sym = std::max({sym, r.reversal, r.half});
  }
  o.pass = agree < 1e-6 && period < 1e-8 && sym < 1e-6;
  o.measured << "agreement=" << g(agree) << " at m=" << worst_m << " (<1e-6) period_defect="
             << g(period) << " (<1e-8) symmetry=" << g(sym) << " (<1e-6)";
}

void c4(Outcome& o) {
  o.what = "K structure at every sweep m";
  double first = 0, pattern = 0, bc = 0, wblock = 0, imag = 0;
  int rows = 0, failed = 0;
  for (const auto* sweep : {&long_sweep(), &window_sweep()}) {
    for (const auto& r : *sweep) {
      ++rows;
      if (r.eigenvalues.empty()) {
        ++failed;
        continue;
      }
      first = std::max(first, r.K.first_column_defect);
      pattern = std::max(pattern, r.K.pattern_defect);
      bc = std::max({bc, r.K.b_relation_defect, r.K.c_relation_defect});
      wblock = std::max(wblock, r.w_block_defect);
      imag = std::max(imag, r.max_imag);
    }
  }
  o.pass = failed == 0 && first < 1e-7 && pattern < 1e-8 && bc < 1e-7 && wblock < 1e-6 && imag == 0.0;
  o.measured << "rows=" << rows << " failed=" << failed << " first_column=" << g(first)
             << " (<1e-7) pattern=" << g(pattern) << " (<1e-8) b_c=" << g(bc)
             << " (<1e-7) w_block=" << g(wblock) << " (<1e-6) max_imag=" << g(imag);
}

void c5(Outcome& o) {
  o.what = "2DF linear stability down to m = 0.02";
  const auto& rows = long_sweep();
  double lowest = 1.0, max_e = 0.0;
  bool all = !rows.empty();
  for (const auto& r : rows) {
    if (r.eigenvalues.empty() || !(std::abs(r.K.e) < 1.0)) {
      all = false;
      break;
    }
    lowest = std::min(lowest, r.m);
    max_e = std::max(max_e, std::abs(r.K.e));
  }
  const auto* one = row_at(rows, 1.0);
  const bool one_stable = one && one->verdict.collinear == stability::Verdict::LinearlyStable;
  o.pass = all && lowest <= 0.02 + 1e-9 && one_stable;
  o.measured << "lowest_passing_m=" << lowest << " max|e|=" << g(max_e)
             << " m1_collinear=" << (one ? stability::to_string(one->verdict.collinear) : "missing");
}

void c6(Outcome& o) {
  o.what = "4DF stability window near m = 0.4";
  const auto& rows = window_sweep();
  const auto* lo = row_at(rows, 0.395);
  const auto* hi = row_at(rows, 0.401);
  bool interior = false;
  for (const auto& r : rows) {
    if (r.m > 0.395 + 1e-9 && r.m < 0.401 - 1e-9 &&
        r.verdict.planar == stability::Verdict::LinearlyStable) {
      interior = true;
    }
  }
  const auto w = stability::summarize(rows);
  const bool crossing = w.zero_crossing && w.zero_crossing->first >= 0.39 - 1e-9 &&
                        w.zero_crossing->second <= 0.41 + 1e-9;
  const bool lo_unstable = lo && lo->verdict.planar == stability::Verdict::Unstable;
  const bool hi_unstable = hi && hi->verdict.planar == stability::Verdict::Unstable;
  o.pass = lo_unstable && hi_unstable && interior && crossing;
  o.measured << "m0.395=" << (lo ? stability::to_string(lo->verdict.planar) : "missing")
             << " (lambda " << (lo ? g(lo->verdict.lambda_block) : "-") << ")"
             << " m0.401=" << (hi ? stability::to_string(hi->verdict.planar) : "missing")
             << " (lambda " << (hi ? g(hi->verdict.lambda_block) : "-") << ")"
             << " interior_stable=" << (interior ? "yes" : "no");
  if (w.stable_range) o.measured << " stable=[" << w.stable_range->first << "," << w.stable_range->second << "]";
  if (w.zero_crossing) {
    o.measured << " zero_crossing=[" << w.zero_crossing->first << "," << w.zero_crossing->second << "]";
  } else {
    o.measured << " zero_crossing=none";
  }
}

void c7(Outcome& o) {
  o.what = "monodromy oracle agrees with the e verdict";
  int rows = 0, mismatches = 0;
  double first_bad = 0.0;
  for (const auto* fam : {&long_family(), &window_family()}) {
    const auto& reports = fam == &long_family() ? long_sweep() : window_sweep();
    for (std::size_t i = 0; i < fam->size(); ++i) {
      ++rows;
      const auto mono = stability::monodromy_oracle_2df((*fam)[i]);
      const bool by_e = !reports[i].eigenvalues.empty() &&
                        reports[i].verdict.collinear == stability::Verdict::LinearlyStable;
      if (mono.stable != by_e) {
        if (mismatches == 0) first_bad = (*fam)[i].m;
        ++mismatches;
      }
    }
  }
  o.pass = rows > 0 && mismatches == 0;
  o.measured << "rows=" << rows << " mismatches=" << mismatches;
  if (mismatches) o.measured << " first_at_m=" << first_bad;
}

void c8(Outcome& o) {
  o.what = "alpha and section geometry";
  const double a1 = poincare::solve_alpha(1.0);
  const double limit = std::abs(poincare::solve_alpha(1e-6) - 1.0 / std::sqrt(3.0));
  double poly = 0.0;
  for (int k = 1; k <= 1000; ++k) {
    const double m = k / 1000.0;
    poly = std::max(poly, std::abs(poincare::alpha_polynomial(m, poincare::solve_alpha(m))));
  }
  double drift = 0.0;
  for (double m : {1.0, 0.5, 0.1}) drift = std::max(drift, poincare::homographic_drift(m, 0.5, 50.0));
  double trip = 0.0;
  for (double m : {1.0, 0.4, 0.05}) {
    const poincare::Section sec(m);
    for (double r : {0.1, 0.35, 0.6, 0.85}) {
      for (double th : {-1.4, -0.7, -0.1, 0.3, 1.2}) {
        Vec4 z;
        try {
          z = poincare::lift(sec, r, th);
        } catch (const DomainError&) {
          continue;
        }
        const auto p = poincare::section_coords(sec, z);
        trip = std::max({trip, std::abs(p.r - r), std::abs(p.theta - th)});
      }
    }
  }
  o.pass = a1 == 1.0 && limit < 1e-3 && poly < 1e-12 && drift < 1e-6 && trip < 1e-10;
  o.measured << "alpha(1)=" << a1 << " limit_err=" << g(limit) << " poly_residual=" << g(poly)
             << " homographic_drift=" << g(drift) << " round_trip=" << g(trip);
}

void c9(Outcome& o) {
  o.what = "Poincare phenomenology at m = 1";
  poincare::SectionConfig cfg;
  cfg.m = 1.0;
  const auto grid = poincare::grid_sweep(cfg);
  int feasible = 0, survived = 0;
  double extent = 0.0;
  for (const auto& s : grid) {
    if (!s.feasible) continue;
    ++feasible;
    if (!s.escaped && s.crossings_found() == cfg.max_crossings) ++survived;
    extent = std::max(extent, s.r_extent());
  }
  const double frac = feasible ? static_cast<double>(survived) / feasible : 0.0;
  const OrbitSolution orb = orbit::find_orbit(MassRatio(1.0), std::nullopt, fit_options());
  const auto trace = poincare::periodic_trace(orb);
  o.pass = frac >= 0.8 && extent < 1.0 && trace.return_distance < 1e-4;
  o.measured << "survived=" << survived << "/" << feasible << " (" << g(100 * frac)
             << "%, need 80%) max_r_extent=" << g(extent) << " trace_return=" << g(trace.return_distance);
}

void c10(Outcome& o) {
  o.what = "K eigenvalues invariant under rescaling";
  double diff = 0.0;
  for (double mv : {1.0, 0.5, 0.2}) {
    const OrbitSolution orb = orbit::find_orbit(MassRatio(mv), std::nullopt, fit_options());
    auto eig = [](const OrbitSolution& x) {
      auto e = stability::analyze(x).eigenvalues;
      std::sort(e.begin(), e.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
      });
      return e;
    };
    const auto e0 = eig(orb);
    const auto e2 = eig(model::rescale_solution(orb, 2.0));
    for (std::size_t i = 0; i < e0.size(); ++i) diff = std::max(diff, std::abs(e0[i] - e2[i]));
  }
  o.pass = diff < 1e-7;
  o.measured << "max_eigenvalue_change=" << g(diff) << " (<1e-7)";
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<void(Outcome&)>> criteria = {
      {1, c1}, {2, c2}, {3, c3}, {4, c4}, {5, c5}, {6, c6}, {7, c7}, {8, c8}, {9, c9}, {10, c10}};
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  if (wanted.empty()) {
    for (const auto& [k, _] : criteria) wanted.push_back(k);
  }
  int failures = 0;
  for (int k : wanted) {
    auto it = criteria.find(k);
    if (it == criteria.end()) {
      std::fprintf(stderr, "unknown criterion %d\n", k);
      return 2;
    }
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      it->second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.measured << "error: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d: %s measured: %s time=%.1fs\n", o.pass ? "PASS" : "FAIL", k,
                o.what.c_str(), o.measured.str().c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures ? 1 : 0;
}
