#pragma once

// Concrete integrations of the regularized 2DF and 4DF flows and of their
// variational systems.

#include "core/integrate.hpp"
#include "core/types.hpp"

namespace rhomb::flow {

using integrate::IntegratorConfig;

Vec4 flow_2df(const Vec4& z0, MassRatio m, double energy, double s_end,
              const IntegratorConfig& cfg = {});
Vec8 flow_4df(const Vec8& z0, MassRatio m, double energy, double s_end,
              const IntegratorConfig& cfg = {});

integrate::Trajectory<Vec4> trajectory_2df(const Vec4& z0, MassRatio m, double energy,
                                           double s_end, const IntegratorConfig& cfg = {});

// States at s_k = k * s_end / intervals, k = 0..intervals.
std::vector<Vec4> sample_2df(const Vec4& z0, MassRatio m, double energy, double s_end,
                             int intervals, const IntegratorConfig& cfg = {});

template <class Mat, class Vec>
struct VariationalResult {
  Mat Y;
  Vec base;
  // max |Y^T J Y - Y0^T J Y0|
  double symplectic_defect = 0.0;
};

using Variational4 = VariationalResult<Mat8, Vec8>;
using Variational2 = VariationalResult<Mat4, Vec4>;

// Base and tangent integrated as one augmented system with a shared step.
// Error control covers both; the escape guard covers the base only.
Variational4 integrate_variational(const Vec8& z0, const Mat8& seed, MassRatio m,
                                   double energy, double s_end,
                                   const IntegratorConfig& cfg = {});
Variational2 integrate_variational(const Vec4& z0, const Mat4& seed, MassRatio m,
                                   double energy, double s_end,
                                   const IntegratorConfig& cfg = {});

}  // namespace rhomb::flow
