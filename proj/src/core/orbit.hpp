#pragma once

// Periodic orbit determination: trigonometric collocation fit with an outer
// secant on the energy, a shooting oracle on (zeta, E), and step-down
// continuation in the mass ratio.

#include "core/integrate.hpp"
#include "core/orbit_types.hpp"
#include "core/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace rhomb::orbit {

using integrate::IntegratorConfig;

struct ModelEval {
  Vec4 z;   // (Q1, Q2, P1, P2)
  Vec4 dz;  // d/ds
};

ModelEval eval_model(const TrigModel& model, double s);

// Per-node flow mismatch model'(s_j) - vf(model(s_j)), stacked by node,
// scaled by sqrt(2 pi / N) so that its squared norm is the trapezoid value
// of the residual functional.
Eigen::VectorXd residual_vector(const TrigModel& model, MassRatio m, double energy,
                                int nodes = 512);
double residual(const TrigModel& model, MassRatio m, double energy, int nodes = 512);

// Coefficients of the odd-harmonic projection of sampled states
// z(s_k), s_k = 2 pi k / N, k = 0..N-1.
TrigModel project_samples(const std::vector<Vec4>& samples, int harmonics);

struct FitOptions {
  // Harmonic count. 0 selects it automatically: start at min_harmonics and
  // grow until the coefficient tail falls below tail_tol.
  int harmonics = 0;
  int min_harmonics = 24;
  int max_harmonics = 96;
  double tail_tol = 1e-13;
  int nodes = 512;
  int max_inner = 30;
  int max_outer = 40;
  double energy_tol = 1e-12;
  double defect_tol = 1e-13;
  // The secant defect is an integrated quantity; its noise sets the error in E.
  IntegratorConfig integrator = integrate::with_tolerance(1e-13);
};

// Inner Levenberg-Marquardt on the coefficients at fixed E. Returns the
// final value of the residual functional.
double minimize_residual(TrigModel& model, MassRatio m, double energy, const FitOptions& opt);

OrbitSolution fit_orbit(MassRatio m, double energy_guess, const TrigModel& model_guess,
                        const FitOptions& opt = {});

struct ShootOptions {
  double tol = 1e-12;
  int max_iter = 30;
  // Bootstrap grid used when no guess is supplied.
  double zeta_lo = 1.0, zeta_hi = 3.0;
  double energy_lo = -3.0, energy_hi = -0.1;
  int scan_zeta = 21, scan_energy = 30;
  IntegratorConfig integrator{};
};

struct ShootStep {
  double zeta, energy, defect;
};

struct ShootResult {
  OrbitSolution orbit;
  std::vector<ShootStep> history;
};

// Quarter-period defect (Q2, P1)(pi/2) from (0, zeta, sqrt 8, 0).
Eigen::Vector2d quarter_defect(MassRatio m, double zeta, double energy,
                               const IntegratorConfig& cfg = {});

ShootResult shooting_oracle(MassRatio m, std::optional<Eigen::Vector2d> guess = std::nullopt,
                            const ShootOptions& opt = {});

// Closure and diagnostics of an orbit from a direct integration at its
// (zeta, E): period residual and zeta1.
void finalize(OrbitSolution& orbit, const IntegratorConfig& cfg = {});

struct SymmetryResiduals {
  double periodicity = 0.0;  // ||gamma(T) - gamma(0)||
  double reversal = 0.0;     // max_s ||gamma(s) - S gamma(T - s)||
  double half = 0.0;         // max_s ||gamma(s) + S gamma(T/2 - s)||
};

SymmetryResiduals symmetry_residuals(const OrbitSolution& orbit, int samples = 256,
                                     const IntegratorConfig& cfg = {});

enum class Method { Fit, Shoot };

struct ContinuationOptions {
  Method method = Method::Fit;
  double dm_min = 1e-4;
  FitOptions fit{};
  ShootOptions shoot{};
  // Called after each converged point.
  std::function<void(const OrbitSolution&)> on_point;
};

struct ContinuationResult {
  std::vector<OrbitSolution> orbits;
  bool complete = true;
  std::string failure;
};

// Marches from seed.m toward m_end in steps of dm (sign taken from the
// direction of travel). Nominal points are seed.m - k dm; a failed step is
// retried at half the step down to dm_min.
ContinuationResult continue_in_mass(const OrbitSolution& seed, double m_end, double dm,
                                    const ContinuationOptions& opt = {});

// Orbit at m: shooting at the seed mass (m = 1 bootstrap when no seed is
// given), shooting continuation to m in steps of at most dm, then, for
// Method::Fit, the trigonometric fit seeded with the shot orbit.
OrbitSolution find_orbit(MassRatio m, const std::optional<OrbitSolution>& seed,
                         const ContinuationOptions& opt = {}, double dm = 0.05);

// Orbits at each requested mass (any order), reached by one downward or
// upward chain of find_orbit calls from the m = 1 bootstrap.
std::vector<OrbitSolution> find_family(std::vector<double> masses,
                                       const ContinuationOptions& opt = {}, double dm = 0.05);

// Coefficient decay |first| / |last| per component, min over components.
double coefficient_decay(const TrigModel& model);

}  // namespace rhomb::orbit
