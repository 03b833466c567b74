#pragma once

#include "core/types.hpp"

#include <vector>

namespace rhomb {

// Odd-harmonic trigonometric model of one period of the regularized orbit:
//
//   Q1(s) = sum a_i sin(k_i w s)
//   Q2(s) = sum b_i sin(k_i (w s + pi/2))
//   P1(s) = sum c_i sin(k_i (w s - pi/2))
//   P2(s) = sum d_i sin(k_i w s)
//
// with k_i = 2i + 1, i = 0..n, and angular frequency w (1 for a 2 pi orbit).
struct TrigModel {
  int n = 0;
  std::vector<double> a, b, c, d;
  double frequency = 1.0;

  TrigModel() = default;
  explicit TrigModel(int harmonics)
      : n(harmonics),
        a(harmonics + 1, 0.0),
        b(harmonics + 1, 0.0),
        c(harmonics + 1, 0.0),
        d(harmonics + 1, 0.0) {}

  std::size_t size() const { return a.size(); }
};

// A converged symmetric periodic orbit. The reference state at s = 0 is the
// collision of the unit-mass pair, (Q1, Q2, P1, P2) = (0, zeta, sqrt 8, 0).
struct OrbitSolution {
  double m = 1.0;
  double zeta = 0.0;
  double energy = 0.0;
  double period = kTwoPi;
  TrigModel model;
  // ||gamma(T) - gamma(0)||_inf from a direct integration.
  double period_residual = 0.0;
  // Q1 at the quarter period, where the mass-m pair collides.
  double zeta1 = 0.0;
  // Value of the collocation functional at convergence; zero for orbits that
  // did not come from a fit.
  double fit_residual = 0.0;

  Vec4 initial_state() const;
};

}  // namespace rhomb
