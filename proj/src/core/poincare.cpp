#include "core/poincare.hpp"

#include "core/dynamics.hpp"
#include "core/flow.hpp"
#include "core/model.hpp"
#include "core/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace rhomb::poincare {

namespace {

// Square-root form of the alpha polynomial; positive at 0, negative at 1 for m < 1.
double alpha_function(double m, double a) {
  const double a3 = a * a * a;
  return std::pow(1.0 + a * a, 1.5) * (1.0 - m * a3) - 8.0 * a3 * (1.0 - m);
}

double potential(double m, double x1, double x2) {
  return 1.0 / (2.0 * x1) + m * m / (2.0 * x2) + 4.0 * m / std::hypot(x1, x2);
}

}  // namespace

double alpha_polynomial(double m, double a) {
  const double a2 = a * a, a3 = a2 * a;
  const double u = 1.0 + a2;
  const double v = m * a3 - 1.0;
  return u * u * u * v * v - 64.0 * a3 * a3 * (1.0 - m) * (1.0 - m);
}

double solve_alpha(double m) {
  (void)MassRatio(m);
  if (m == 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  if (!(alpha_function(m, lo) > 0.0 && alpha_function(m, hi) < 0.0)) {
    throw ConvergenceError("solve_alpha: no sign change on (0, 1]");
  }
  while (hi - lo > 0.0) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (alpha_function(m, mid) > 0.0 ? lo : hi) = mid;
  }
  return std::abs(alpha_function(m, lo)) < std::abs(alpha_function(m, hi)) ? lo : hi;
}

double r_max(double m, double alpha) {
  return 0.5 + 0.5 * m * m * alpha + 4.0 * m / std::sqrt(1.0 + 1.0 / (alpha * alpha));
}

Section::Section(double mass) : m(mass), alpha(solve_alpha(mass)), rmax(r_max(mass, alpha)) {}

Vec4 lift(const Section& sec, double r, double theta) {
  if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("lift: r must lie in (0, 1)");
  const double x1 = r * sec.rmax;
  const double x2 = x1 / sec.alpha;
  const double ke = potential(sec.m, x1, x2) - 1.0;
  if (ke < 0.0) throw DomainError("lift: infeasible, U - 1 < 0");
  const double st = std::sin(theta), ct = std::cos(theta);
  const double rho = std::sqrt(ke / (sec.alpha * sec.alpha * st * st + sec.m * ct * ct));
  const double v1 = rho * sec.alpha * st;
  const double v2 = rho * ct;
  const double q1 = std::sqrt(x1), q2 = std::sqrt(x2);
  return Vec4(q1, q2, 4.0 * q1 * v1, 4.0 * sec.m * q2 * v2);
}

bool pair_escaping(double m, const Vec4& z, double ratio) {
  if (!(ratio > 0.0) || z[kQ1] == 0.0 || z[kQ2] == 0.0) return false;
  const double x1 = z[kQ1] * z[kQ1], x2 = z[kQ2] * z[kQ2];
  const double v1 = z[kP1] / (4.0 * z[kQ1]);
  const double v2 = z[kP2] / (4.0 * m * z[kQ2]);
  // Mass-m pair leaving the unit-mass binary.
  if (x2 > ratio * x1 && v2 > 0.0 && m * v2 * v2 - m * m / (2.0 * x2) - 4.0 * m / x2 > 0.0) {
    return true;
  }
  // Unit-mass pair leaving the mass-m binary.
  return x1 > ratio * x2 && v1 > 0.0 && v1 * v1 - 1.0 / (2.0 * x1) - 4.0 * m / x1 > 0.0;
}

double section_function(const Section& sec, const Vec4& z) {
  return z[kQ1] * z[kQ1] - sec.alpha * z[kQ2] * z[kQ2];
}

SectionPoint section_coords(const Section& sec, const Vec4& z) {
  if (z[kQ1] == 0.0 || z[kQ2] == 0.0) throw DomainError("section_coords: state at a collision");
  const double x1 = z[kQ1] * z[kQ1];
  const double v1 = z[kP1] / (4.0 * z[kQ1]);
  const double v2 = z[kP2] / (4.0 * sec.m * z[kQ2]);
  if (v1 == 0.0 && v2 == 0.0) throw DomainError("section_coords: both velocities vanish");
  SectionPoint p;
  p.r = x1 / sec.rmax;
  if (v2 == 0.0) {
    p.theta = v1 > 0.0 ? kPi / 2 : -kPi / 2;
  } else {
    p.theta = std::atan(v1 / (sec.alpha * v2));
  }
  return p;
}

void SectionConfig::validate() const {
  (void)MassRatio(m);
  if (r_count < 1 || theta_count < 1) throw InvalidArgument("grid counts must be >= 1");
  if (!(0.0 < r_lo && r_lo <= r_hi && r_hi < 1.0)) throw InvalidArgument("r range must lie in (0, 1)");
  if (!(-kPi / 2 < theta_lo && theta_lo <= theta_hi && theta_hi < kPi / 2)) {
    throw InvalidArgument("theta range must lie in (-pi/2, pi/2)");
  }
  if (max_crossings < 1) throw InvalidArgument("max_crossings must be >= 1");
  if (!(horizon > 0.0)) throw InvalidArgument("horizon must be positive");
  if (escape_ratio < 0.0) throw InvalidArgument("escape_ratio must be >= 0");
  integrator.validate();
}

double SectionSeries::r_extent() const {
  if (crossings.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(crossings.begin(), crossings.end(),
                                      [](const auto& a, const auto& b) { return a.r < b.r; });
  return hi->r - lo->r;
}

SectionSeries iterate_section(const Section& sec, const Vec4& z0, SectionPoint seed,
                              const SectionConfig& cfg) {
  const MassRatio m(sec.m);
  auto rhs = [m](const Vec4& z) { return dynamics::vf_2df(z, m, -1.0); };
  integrate::EventSpec<Vec4> ev;
  ev.g = [&sec](double, const Vec4& z) { return section_function(sec, z); };
  ev.direction = integrate::Direction::Both;
  if (cfg.escape_ratio > 0.0) {
    ev.escape = [&sec, &cfg](const Vec4& z) { return pair_escaping(sec.m, z, cfg.escape_ratio); };
  }

  SectionSeries out;
  out.seed = seed;
  Vec4 z = z0;
  while (out.crossings_found() < cfg.max_crossings) {
    try {
      const auto hit = integrate::integrate_until<Vec4>(rhs, z, ev, cfg.integrator, cfg.horizon);
      if (hit.reason == integrate::StopReason::Escaped) {
        out.escaped = true;
        break;
      }
      z = hit.y;
      out.crossings.push_back(section_coords(sec, z));
    } catch (const Error& e) {
      out.note = e.what();
      break;
    }
  }
  return out;
}

SectionSeries iterate_section(SectionPoint seed, const SectionConfig& cfg) {
  cfg.validate();
  const Section sec(cfg.m);
  return iterate_section(sec, lift(sec, seed.r, seed.theta), seed, cfg);
}

std::vector<SectionSeries> grid_sweep(const SectionConfig& cfg) {
  cfg.validate();
  const Section sec(cfg.m);
  auto node = [&](int n, int count, double lo, double hi) {
    return count == 1 ? lo : lo + (hi - lo) * n / (count - 1);
  };
  std::vector<SectionSeries> out(static_cast<std::size_t>(cfg.r_count) * cfg.theta_count);
  parallel::for_each_index(out.size(), [&](std::size_t k) {
    const int i = static_cast<int>(k) / cfg.theta_count;
    const int j = static_cast<int>(k) % cfg.theta_count;
    const SectionPoint seed{node(i, cfg.r_count, cfg.r_lo, cfg.r_hi),
                            node(j, cfg.theta_count, cfg.theta_lo, cfg.theta_hi)};
    Vec4 z0;
    try {
      z0 = lift(sec, seed.r, seed.theta);
    } catch (const DomainError& e) {
      out[k].seed = seed;
      out[k].feasible = false;
      out[k].note = e.what();
      return;
    }
    out[k] = iterate_section(sec, z0, seed, cfg);
  });
  return out;
}

PeriodicTrace periodic_trace(const OrbitSolution& orbit, int max_returns,
                             const IntegratorConfig& cfg) {
  if (!(orbit.energy < 0.0)) throw InvalidArgument("periodic_trace: orbit energy must be negative");
  const OrbitSolution unit = model::rescale_solution(orbit, std::sqrt(-orbit.energy));
  const Section sec(orbit.m);
  const MassRatio m(orbit.m);
  auto rhs = [m](const Vec4& z) { return dynamics::vf_2df(z, m, -1.0); };
  integrate::EventSpec<Vec4> ev;
  ev.g = [&sec](double, const Vec4& z) { return section_function(sec, z); };
  const auto hit = integrate::integrate_until<Vec4>(rhs, unit.initial_state(), ev, cfg,
                                                    4.0 * unit.period);
  if (hit.reason != integrate::StopReason::Event) throw DomainError("periodic_trace: orbit escaped");

  PeriodicTrace out;
  out.point = section_coords(sec, hit.y);
  SectionConfig sc;
  sc.m = orbit.m;
  sc.max_crossings = max_returns;
  sc.integrator = cfg;
  const SectionSeries series =
      iterate_section(sec, lift(sec, out.point.r, out.point.theta), out.point, sc);
  out.return_distance = std::numeric_limits<double>::infinity();
  for (int k = 0; k < series.crossings_found(); ++k) {
    const auto& p = series.crossings[k];
    const double d = std::max(std::abs(p.r - out.point.r), std::abs(p.theta - out.point.theta));
    if (d < out.return_distance) {
      out.return_distance = d;
      out.return_index = k + 1;
    }
  }
  return out;
}

double homographic_drift(double m, double r, double s_end, const IntegratorConfig& cfg) {
  const Section sec(m);
  const Vec4 z0 = lift(sec, r, kPi / 4);
  const auto tr = flow::trajectory_2df(z0, MassRatio(m), -1.0, s_end, cfg);
  double drift = 0.0;
  for (const auto& smp : tr.samples) {
    const double ratio = (smp.y[kQ1] * smp.y[kQ1]) / (smp.y[kQ2] * smp.y[kQ2]);
    drift = std::max(drift, std::abs(ratio - sec.alpha));
  }
  if (tr.escaped) throw DomainError("homographic_drift: trajectory escaped");
  return drift;
}

}  // namespace rhomb::poincare
