#pragma once

// Linear stability of the symmetric orbit in the planar (4DF) problem from
// the quarter-period fundamental matrix, and of the collinear (2DF) problem
// from the (4,4) entry of K or, independently, the full monodromy.

#include "core/integrate.hpp"
#include "core/orbit_types.hpp"
#include "core/types.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace rhomb::stability {

using integrate::IntegratorConfig;

struct QuarterMatrix {
  Mat8 B;         // Y(T/4) with Y(0) = Y0
  Vec8 base;      // orbit state at T/4
  double symplectic_defect = 0.0;
  double pattern_defect = 0.0;  // largest entry of B outside the M2 pattern
};

QuarterMatrix quarter_matrix(const OrbitSolution& orbit, const IntegratorConfig& cfg = {});

struct KMatrix {
  Mat4 full;
  double a = 0, b = 0, c = 0, d = 0, e = 0;
  double corner14 = 0;
  // Structural checks.
  double first_column_defect = 0.0;
  double pattern_defect = 0.0;
  double b_relation_defect = 0.0;
  double c_relation_defect = 0.0;

  double lambda_block() const { return a + d + 1.0; }
  double max_defect() const;
};

// K(i, j) = -c_i^T S J c_{j+4}, c_i the columns of B. Throws StructuralError
// when a structural defect exceeds structural_tol (disabled when <= 0).
KMatrix compute_K(const Mat8& B, double zeta, double structural_tol = 1e-5);

enum class Verdict { LinearlyStable, SpectrallyStableOnly, Unstable, Indeterminate };

const char* to_string(Verdict v);

struct Classification {
  Verdict planar = Verdict::Unstable;     // 4DF
  Verdict collinear = Verdict::Unstable;  // 2DF
  double lambda_block = 0.0;
  double e = 0.0;
  std::string note;
};

struct ClassifyOptions {
  double tol_coincidence = 1e-6;
  double boundary_band = 1e-8;
};

Classification classify(const KMatrix& K, const ClassifyOptions& opt = {});

struct StabilityReport {
  double m = 0, zeta = 0, energy = 0;
  KMatrix K;
  std::vector<std::complex<double>> eigenvalues;  // of K
  double max_imag = 0.0;                          // largest |Im| among them
  Classification verdict;
  double symplectic_defect = 0.0;
  double pattern_defect = 0.0;
  // Cross-checks on W.
  double w_product_defect = 0.0;      // |Y0^T Y(T/2) - Y0^T S Y0 B^-1 S B|
  double w_block_defect = 0.0;        // |(W + W^-1)/2 - diag(K^T, K)|
  double w_trivial_defect = 0.0;      // |W v + v|, v = e5
  bool structural_ok = true;
  std::string error;
};

struct AnalyzeOptions {
  IntegratorConfig integrator{};
  ClassifyOptions classify{};
  double structural_tol = 1e-5;
  // Also integrate to T/2 for the direct W cross-check.
  bool check_half_period = true;
};

StabilityReport analyze(const OrbitSolution& orbit, const AnalyzeOptions& opt = {});

// Independent reports per orbit, computed in parallel. Failures are recorded
// in the row, never thrown.
std::vector<StabilityReport> sweep(const std::vector<OrbitSolution>& orbits,
                                   const AnalyzeOptions& opt = {});

struct MonodromyResult {
  Mat4 X;
  std::vector<std::complex<double>> multipliers;
  double determinant = 0.0;
  // |X g - g| / |g| with g = vf(gamma(0)).
  double trivial_defect = 0.0;
  // The two multipliers farthest from 1.
  std::complex<double> nontrivial[2];
  bool stable = false;  // nontrivial pair on the unit circle, off +-1
};

MonodromyResult monodromy_oracle_2df(const OrbitSolution& orbit, const IntegratorConfig& cfg = {},
                                     double unit_tol = 1e-6);

struct WindowSummary {
  // First sign change of lambda_block along the sweep order.
  std::optional<std::pair<double, double>> zero_crossing;
  // Extent of the linearly stable 4DF rows.
  std::optional<std::pair<double, double>> stable_range;
};

WindowSummary summarize(const std::vector<StabilityReport>& rows);

}  // namespace rhomb::stability
