#pragma once

// Vector fields, analytic derivatives of the regularized Hamiltonians, and
// the right-hand sides of the variational equations.

#include "core/types.hpp"

namespace rhomb::dynamics {

// Right-hand side of the regularized 2DF equations of motion, term for term
// as derived from gamma_2df.
Vec4 vf_2df(const Vec4& z, MassRatio m, double energy);

Vec4 grad_gamma_2df(const Vec4& z, MassRatio m, double energy);
Mat4 hess_gamma_2df(const Vec4& z, MassRatio m, double energy);

Vec8 grad_gamma_4df(const Vec8& z, MassRatio m, double energy);
// J * grad_gamma_4df.
Vec8 vf_4df(const Vec8& z, MassRatio m, double energy);
Mat8 hess_gamma_4df(const Vec8& z, MassRatio m, double energy);

// Augmented state of the variational system: base point plus fundamental
// matrix stored column-major after it.
using Var2State = Eigen::Matrix<double, 4 + 16, 1>;
using Var4State = Eigen::Matrix<double, 8 + 64, 1>;

Var4State pack(const Vec8& base, const Mat8& tangent);
Vec8 base_of(const Var4State& v);
Mat8 tangent_of(const Var4State& v);

Var2State pack(const Vec4& base, const Mat4& tangent);
Vec4 base_of(const Var2State& v);
Mat4 tangent_of(const Var2State& v);

// base' = J grad Gamma(base), tangent' = J D^2 Gamma(base) tangent.
Var4State variational_rhs(const Var4State& v, MassRatio m, double energy);
Var2State variational_rhs(const Var2State& v, MassRatio m, double energy);

// ---------------------------------------------------------------------------
// Zero patterns

// The 4x4 pattern M: nonzero entries allowed only at (0,0), (0,3), (1,1),
// (1,2), (2,1), (2,2), (3,0), (3,3).
bool allowed_in_m(int row, int col);

// Largest |entry| of M outside the M2 pattern (every 4x4 block in M).
double pattern_m2_defect(const Mat8& M);
double pattern_m_defect(const Mat4& M);
bool in_pattern_m2(const Mat8& M, double tol = 1e-10);

// Classification of Hessian entries of the 4DF Hamiltonian:
// '0' vanishes identically, 'a' vanishes on the invariant set A, '*' generic.
char hessian_entry_class(int row, int col);

}  // namespace rhomb::dynamics
