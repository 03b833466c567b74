#pragma once

// Phase-space types, Hamiltonians and structure matrices of the rhomboidal
// symmetric-mass four-body problem.
//
// 2DF: bodies pinned to the axes, masses 1, m, 1, m at (+-x1, 0), (0, +-x2).
//      Regularized state z = (Q1, Q2, P1, P2) with Qi^2 = xi, Pi = 2 Qi wi.
// 4DF: planar symmetric configuration (x1, x2), (x3, x4) and their negatives.
//      Regularized state z = (Q1, Q2, Q3, Q4, P1, P2, P3, P4).
//
// Both regularized Hamiltonians live in extended phase space,
// Gamma = (dt/ds)(H - E), and physical motion is confined to Gamma = 0.

#include "core/orbit_types.hpp"
#include "core/types.hpp"

#include <variant>

namespace rhomb::model {

// Regularized 2DF Hamiltonian. Throws DomainError at total collapse.
double gamma_2df(const Vec4& z, MassRatio m, double energy);

// Regularized 4DF Hamiltonian (Q1^2+Q2^2)(Q3^2+Q4^2)(K - U - E).
// Throws DomainError at total collapse or at a collision between a unit mass
// and an m mass.
double gamma_4df(const Vec8& z, MassRatio m, double energy);

// Embedding of the 2DF phase space onto the invariant set
// A = {Q2 = Q3 = P2 = P3 = 0}: (Q1, Q2, P1, P2) -> (Q1, 0, 0, Q2, P1, 0, 0, P2).
Vec8 embed(const Vec4& z2);
Vec4 restrict_to_invariant_set(const Vec8& z4);
bool on_invariant_set(const Vec8& z4, double tol = 0.0);

// ---------------------------------------------------------------------------
// Physical coordinates

struct Phys2DFState {
  double x1 = 0, x2 = 0;  // positions
  double w1 = 0, w2 = 0;  // momenta, w1 = 2 x1', w2 = 2 m x2'
};

// A regularized state sitting on a binary collision. Physical momenta are
// unbounded there; the finite regularized state is returned instead.
struct Collision2DF {
  int pair = 0;  // 1: unit-mass pair (Q1 = 0), 2: mass-m pair (Q2 = 0)
  Vec4 regularized;
};

using Phys2DFResult = std::variant<Phys2DFState, Collision2DF>;

Phys2DFResult reg_to_phys_2df(const Vec4& z);
// Sign of each Qi is supplied by the branch (+1 or -1).
Vec4 phys_to_reg_2df(const Phys2DFState& p, int sign_q1 = 1, int sign_q2 = 1);

struct Phys4DFState {
  Vec4 x = Vec4::Zero();  // (x1, x2) unit mass, (x3, x4) mass m
  Vec4 w = Vec4::Zero();  // w1 = 2 x1', w2 = 2 x2', w3 = 2 m x3', w4 = 2 m x4'
};

struct Collision4DF {
  int pair = 0;  // 1: Q1 = Q2 = 0, 2: Q3 = Q4 = 0
  Vec8 regularized;
};

using Phys4DFResult = std::variant<Phys4DFState, Collision4DF>;

Phys4DFResult reg_to_phys_4df(const Vec8& z);
// The square-root branch: (Q1 + i Q2)^2 = x1 + i x2 and (Q4 + i Q3)^2 =
// x4 + i x3; the principal root is multiplied by the given signs.
Vec8 phys_to_reg_4df(const Phys4DFState& p, int sign_12 = 1, int sign_34 = 1);

// Physical Hamiltonian H = K - U of the 4DF problem.
double hamiltonian_4df(const Phys4DFState& p, MassRatio m);
double hamiltonian_2df(const Phys2DFState& p, MassRatio m);

// ---------------------------------------------------------------------------
// Integrals and collision data

// A = (Q1 P2 - Q2 P1 + Q3 P4 - Q4 P3) / 2.
double angular_momentum(const Vec8& z);
// A = x1 w2 - x2 w1 + x3 w4 - x4 w3.
double angular_momentum(const Phys4DFState& p);
// Gradient of the angular momentum with respect to the regularized state.
Vec8 angular_momentum_gradient(const Vec8& z);

enum class CollidingPair { UnitMass, MassM };

// |P| at a binary collision on Gamma = 0: sqrt 8 for the unit-mass pair and
// sqrt(8 m^3) for the mass-m pair.
double collision_momentum(CollidingPair pair, MassRatio m);

// ---------------------------------------------------------------------------
// Structure matrices

Mat4 J2();
Mat8 J4();
// Reversing symmetry of the 2DF orbit, diag(-1, 1, 1, -1).
Mat4 S2();
// Reversing symmetry of the 4DF orbit, built from G = diag(1, -1) blocks as
// diag(G, G, -G, -G). Note -S4 is the other generator of the same
// Klein-four group; this sign makes -Y0^T S4 Y0 = Lambda.
Mat8 S4();
// diag(I4, -I4).
Mat8 Lambda();
// Orthogonal symplectic seed for the quarter-period fundamental matrix.
Mat8 Y0();

// ---------------------------------------------------------------------------

// The orbit gamma_eps(s) = (eps Q(eps s), P(eps s)) at energy E / eps^2.
// Positions scale by eps, momenta are unchanged, the period shrinks by eps.
OrbitSolution rescale_solution(const OrbitSolution& orbit, double eps);

}  // namespace rhomb::model
