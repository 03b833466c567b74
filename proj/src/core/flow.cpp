#include "core/flow.hpp"

#include "core/dynamics.hpp"
#include "core/model.hpp"

namespace rhomb::flow {

namespace {

auto rhs_2df(MassRatio m, double energy) {
  return [m, energy](const Vec4& z) { return dynamics::vf_2df(z, m, energy); };
}

template <class Var, class Mat, class Vec>
VariationalResult<Mat, Vec> run_variational(const Vec& z0, const Mat& seed, MassRatio m,
                                            double energy, double s_end,
                                            IntegratorConfig cfg, const Mat& J) {
  if (std::abs(seed.determinant()) < 1e-14) {
    throw InvalidArgument("integrate_variational: seed matrix is singular");
  }
  cfg.guard_dims = static_cast<int>(Vec::RowsAtCompileTime);
  auto rhs = [m, energy](const Var& v) { return dynamics::variational_rhs(v, m, energy); };
  const Var v0 = dynamics::pack(z0, seed);
  Var v1 = v0;
  if (s_end > 0.0) v1 = integrate::integrate_to<Var>(rhs, v0, s_end, cfg);
  VariationalResult<Mat, Vec> out;
  out.Y = dynamics::tangent_of(v1);
  out.base = dynamics::base_of(v1);
  const Mat ref = seed.transpose() * J * seed;
  out.symplectic_defect = (out.Y.transpose() * J * out.Y - ref).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace

Vec4 flow_2df(const Vec4& z0, MassRatio m, double energy, double s_end,
              const IntegratorConfig& cfg) {
  return integrate::integrate_to<Vec4>(rhs_2df(m, energy), z0, s_end, cfg);
}

Vec8 flow_4df(const Vec8& z0, MassRatio m, double energy, double s_end,
              const IntegratorConfig& cfg) {
  auto rhs = [m, energy](const Vec8& z) { return dynamics::vf_4df(z, m, energy); };
  return integrate::integrate_to<Vec8>(rhs, z0, s_end, cfg);
}

integrate::Trajectory<Vec4> trajectory_2df(const Vec4& z0, MassRatio m, double energy,
                                           double s_end, const IntegratorConfig& cfg) {
  return integrate::integrate<Vec4>(rhs_2df(m, energy), z0, s_end, cfg);
}

std::vector<Vec4> sample_2df(const Vec4& z0, MassRatio m, double energy, double s_end,
                             int intervals, const IntegratorConfig& cfg) {
  if (intervals < 1) throw InvalidArgument("sample_2df: intervals must be >= 1");
  std::vector<double> grid(intervals + 1);
  for (int k = 0; k <= intervals; ++k) grid[k] = s_end * k / intervals;
  return integrate::integrate_grid<Vec4>(rhs_2df(m, energy), z0, grid, cfg);
}

Variational4 integrate_variational(const Vec8& z0, const Mat8& seed, MassRatio m,
                                   double energy, double s_end,
                                   const IntegratorConfig& cfg) {
  return run_variational<dynamics::Var4State>(z0, seed, m, energy, s_end, cfg,
                                              model::J4());
}

Variational2 integrate_variational(const Vec4& z0, const Mat4& seed, MassRatio m,
                                   double energy, double s_end,
                                   const IntegratorConfig& cfg) {
  return run_variational<dynamics::Var2State>(z0, seed, m, energy, s_end, cfg,
                                              model::J2());
}

}  // namespace rhomb::flow
