#include "core/csv.hpp"

#include "core/model.hpp"

#include <cstdio>

namespace rhomb::csv {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_stability(std::ostream& os, const std::vector<stability::StabilityReport>& rows) {
  os << "m,zeta,E,a,b,c,d,e,corner14,lambda_block,classification,symplectic_defect,"
        "pattern_defect\n";
  for (const auto& r : rows) {
    const bool failed = r.eigenvalues.empty();
    os << num(r.m) << ',' << num(r.zeta) << ',' << num(r.energy) << ',';
    if (failed) {
      os << ",,,,,,,error,,\n";
      continue;
    }
    os << num(r.K.a) << ',' << num(r.K.b) << ',' << num(r.K.c) << ',' << num(r.K.d) << ','
       << num(r.K.e) << ',' << num(r.K.corner14) << ',' << num(r.K.lambda_block()) << ','
       << stability::to_string(r.verdict.planar) << ',' << num(r.symplectic_defect) << ','
       << num(r.pattern_defect) << '\n';
  }
}

void write_sections(std::ostream& os, const std::vector<poincare::SectionSeries>& series) {
  os << "seed_r,seed_theta,crossing_index,r,theta,escaped_flag\n";
  for (const auto& s : series) {
    for (int k = 0; k < s.crossings_found(); ++k) {
      os << num(s.seed.r) << ',' << num(s.seed.theta) << ',' << k + 1 << ','
         << num(s.crossings[k].r) << ',' << num(s.crossings[k].theta) << ','
         << (s.escaped ? 1 : 0) << '\n';
    }
  }
}

void write_section_summary(std::ostream& os, const std::vector<poincare::SectionSeries>& series) {
  os << "seed_r,seed_theta,feasible,crossings_found,escaped,r_extent\n";
  for (const auto& s : series) {
    os << num(s.seed.r) << ',' << num(s.seed.theta) << ',' << (s.feasible ? 1 : 0) << ','
       << s.crossings_found() << ',' << (s.escaped ? 1 : 0) << ',' << num(s.r_extent()) << '\n';
  }
}

void write_orbits(std::ostream& os, const std::vector<OrbitSolution>& orbits) {
  os << "m,zeta,E,period_residual,zeta1,harmonics\n";
  for (const auto& o : orbits) {
    os << num(o.m) << ',' << num(o.zeta) << ',' << num(o.energy) << ','
       << num(o.period_residual) << ',' << num(o.zeta1) << ',' << o.model.n << '\n';
  }
}

void write_trajectory(std::ostream& os, const integrate::Trajectory<Vec4>& tr, double m,
                      double energy) {
  const MassRatio mr(m);
  os << "s,Q1,Q2,P1,P2,gamma\n";
  for (const auto& smp : tr.samples) {
    os << num(smp.s);
    for (int i = 0; i < 4; ++i) os << ',' << num(smp.y[i]);
    os << ',' << num(model::gamma_2df(smp.y, mr, energy)) << '\n';
  }
}

}  // namespace rhomb::csv
