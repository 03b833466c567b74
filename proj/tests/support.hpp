#pragma once

// Shared fixtures: converged orbits are expensive, so they are computed once
// per process and reused.

#include "core/orbit.hpp"
#include "core/types.hpp"

#include <Eigen/Dense>

#include <map>
#include <mutex>
#include <random>

namespace testing {

using namespace rhomb;

// Shooting orbit at m, reached by continuation from the m = 1 bootstrap.
inline const OrbitSolution& shot_orbit(double m) {
  static std::map<double, OrbitSolution> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  orbit::ContinuationOptions opt;
  opt.method = orbit::Method::Shoot;
  return cache[m] = orbit::find_orbit(MassRatio(m), std::nullopt, opt);
}

// Trigonometric fit at m seeded with the shooting orbit.
inline const OrbitSolution& fit_orbit(double m) {
  static std::map<double, OrbitSolution> cache;
  static std::mutex mu;
  const OrbitSolution& s = shot_orbit(m);
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  return cache[m] = orbit::fit_orbit(MassRatio(m), s.energy, s.model);
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(7919);
  return g;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline double max_abs(const Eigen::Ref<const Eigen::MatrixXd>& M) {
  return M.cwiseAbs().maxCoeff();
}

// Generic regularized states away from collisions.
inline Vec4 random_state2() {
  return Vec4(uniform(0.3, 2.0), uniform(0.3, 2.0), uniform(-3, 3), uniform(-3, 3));
}

inline Vec8 random_state4() {
  Vec8 z;
  for (int i = 0; i < 4; ++i) z[i] = uniform(0.3, 1.5) * (uniform(0, 1) < 0.5 ? -1 : 1);
  for (int i = 4; i < 8; ++i) z[i] = uniform(-3, 3);
  return z;
}

}  // namespace testing
