#pragma once

// Plain-text output. Every floating-point value is written with 17
// significant digits so files round-trip exactly.

#include "core/integrate.hpp"
#include "core/orbit_types.hpp"
#include "core/poincare.hpp"
#include "core/stability.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace rhomb::csv {

std::string num(double x);

void write_stability(std::ostream& os, const std::vector<stability::StabilityReport>& rows);
void write_sections(std::ostream& os, const std::vector<poincare::SectionSeries>& series);
// Per-seed summary: seed_r, seed_theta, feasible, crossings_found, escaped, r_extent.
void write_section_summary(std::ostream& os, const std::vector<poincare::SectionSeries>& series);
void write_orbits(std::ostream& os, const std::vector<OrbitSolution>& orbits);
// s, Q1, Q2, P1, P2, gamma
void write_trajectory(std::ostream& os, const integrate::Trajectory<Vec4>& tr, double m,
                      double energy);

}  // namespace rhomb::csv
