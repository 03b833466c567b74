#pragma once

// Poincare section of the collinear problem at E = -1 on the homographic
// plane x1 = alpha x2.

#include "core/integrate.hpp"
#include "core/orbit_types.hpp"
#include "core/types.hpp"

#include <string>
#include <vector>

namespace rhomb::poincare {

using integrate::IntegratorConfig;

// Root in (0, 1] of (1 + a^2)^3 (m a^3 - 1)^2 - 64 a^6 (1 - m)^2, on the
// branch through alpha(1) = 1. Found by bisection on the square-root form
// (1 + a^2)^{3/2} (1 - m a^3) - 8 a^3 (1 - m).
double solve_alpha(double m);
double alpha_polynomial(double m, double alpha);

double r_max(double m, double alpha);

struct Section {
  double m, alpha, rmax;
  explicit Section(double mass);
};

struct SectionPoint {
  double r, theta;
};

// Regularized state at E = -1 on the section for the given (r, theta).
// Throws DomainError when U - 1 < 0 at x1 = r r_max.
Vec4 lift(const Section& sec, double r, double theta);

// Requires x1 > 0 and x2 > 0 (the sign of Q carries the branch); throws
// DomainError when both velocities vanish.
SectionPoint section_coords(const Section& sec, const Vec4& z);

// True when one pair has positive two-body energy relative to the other
// pair's centre, moves outward, and is farther out than ratio times the
// other pair. The regularized step shrinks like 1 / Q^2 of the outgoing pair,
// so waiting for the coordinate guard on such runs is prohibitively slow.
bool pair_escaping(double m, const Vec4& z, double ratio);

// x1 - alpha x2 in regularized coordinates.
double section_function(const Section& sec, const Vec4& z);

struct SectionConfig {
  double m = 1.0;
  int r_count = 9;
  double r_lo = 0.1, r_hi = 0.9;
  int theta_count = 15;
  // The symmetric orbit crosses the section at theta < 0 (the pairs move in
  // opposite directions there), so the default grid covers that side.
  double theta_lo = -kPi / 2.0 + kPi / 30.0, theta_hi = -kPi / 30.0;
  int max_crossings = 200;
  // Longest stretch of regularized time allowed between crossings.
  double horizon = 500.0;
  // Besides the coordinate guard, stop a run once one pair is on an outgoing
  // hyperbolic path far from the other (see pair_escaping). 0 disables.
  double escape_ratio = 10.0;
  IntegratorConfig integrator{};

  void validate() const;
};

struct SectionSeries {
  SectionPoint seed{};
  std::vector<SectionPoint> crossings;
  bool escaped = false;
  bool feasible = true;
  // Set when the run ended for a reason other than max_crossings or escape.
  std::string note;

  int crossings_found() const { return static_cast<int>(crossings.size()); }
  double r_extent() const;
};

SectionSeries iterate_section(const Section& sec, const Vec4& z0, SectionPoint seed,
                              const SectionConfig& cfg);
SectionSeries iterate_section(SectionPoint seed, const SectionConfig& cfg);

// One series per grid node, r-major order. Infeasible nodes are returned
// with feasible = false and no crossings.
std::vector<SectionSeries> grid_sweep(const SectionConfig& cfg);

// Section trace of a periodic orbit rescaled to E = -1: the first crossing
// of the orbit and the distance, over the next max_returns crossings, of the
// closest return to it.
struct PeriodicTrace {
  SectionPoint point{};
  int return_index = -1;
  double return_distance = 0.0;
};

PeriodicTrace periodic_trace(const OrbitSolution& orbit, int max_returns = 8,
                             const IntegratorConfig& cfg = {});

// max |x1/x2 - alpha| along the flow from a homographic lift (theta = pi/4)
// over regularized time [0, s_end].
double homographic_drift(double m, double r, double s_end, const IntegratorConfig& cfg = {});

}  // namespace rhomb::poincare
