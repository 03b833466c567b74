#include "core/model.hpp"

#include <complex>

namespace rhomb::model {

namespace {

constexpr double kCollapseFloor = 1e-300;

}  // namespace

double gamma_2df(const Vec4& z, MassRatio mr, double energy) {
  const double m = mr.value();
  const double q1 = z[kQ1], q2 = z[kQ2], p1 = z[kP1], p2 = z[kP2];
  const double q1s = q1 * q1, q2s = q2 * q2;
  const double rho = q1s * q1s + q2s * q2s;
  if (rho < kCollapseFloor) {
    throw DomainError("gamma_2df: total collapse (Q1 = Q2 = 0)");
  }
  return q2s * p1 * p1 / 16.0 + q1s * p2 * p2 / (16.0 * m) -
         0.5 * q1s * m * m - 0.5 * q2s - 4.0 * q1s * q2s * m / std::sqrt(rho) -
         q1s * q2s * energy;
}

double gamma_4df(const Vec8& z, MassRatio mr, double energy) {
  const double m = mr.value();
  const double r1 = z[0] * z[0] + z[1] * z[1];
  const double r3 = z[2] * z[2] + z[3] * z[3];
  if (r1 * r1 + r3 * r3 < kCollapseFloor) {
    throw DomainError("gamma_4df: total collapse");
  }
  const double qq = z[0] * z[0] * z[2] * z[3] - z[1] * z[1] * z[2] * z[3] -
                    z[0] * z[1] * z[2] * z[2] + z[0] * z[1] * z[3] * z[3];
  const double dm = r1 * r1 + r3 * r3 - 4.0 * qq;
  const double dp = r1 * r1 + r3 * r3 + 4.0 * qq;
  if (dm <= kCollapseFloor || dp <= kCollapseFloor) {
    throw DomainError("gamma_4df: collision between unequal masses");
  }
  const double pa = z[4] * z[4] + z[5] * z[5];
  const double pb = z[6] * z[6] + z[7] * z[7];
  return pa * r3 / 16.0 + pb * r1 / (16.0 * m) - 0.5 * r3 - 0.5 * m * m * r1 -
         2.0 * m * r1 * r3 * (1.0 / std::sqrt(dm) + 1.0 / std::sqrt(dp)) -
         energy * r1 * r3;
}

Vec8 embed(const Vec4& z2) {
  Vec8 z = Vec8::Zero();
  z[0] = z2[kQ1];
  z[3] = z2[kQ2];
  z[4] = z2[kP1];
  z[7] = z2[kP2];
  return z;
}

Vec4 restrict_to_invariant_set(const Vec8& z4) {
  return Vec4(z4[0], z4[3], z4[4], z4[7]);
}

bool on_invariant_set(const Vec8& z4, double tol) {
  return std::abs(z4[1]) <= tol && std::abs(z4[2]) <= tol &&
         std::abs(z4[5]) <= tol && std::abs(z4[6]) <= tol;
}

Phys2DFResult reg_to_phys_2df(const Vec4& z) {
  if (z[kQ1] == 0.0) return Collision2DF{1, z};
  if (z[kQ2] == 0.0) return Collision2DF{2, z};
  Phys2DFState p;
  p.x1 = z[kQ1] * z[kQ1];
  p.x2 = z[kQ2] * z[kQ2];
  p.w1 = z[kP1] / (2.0 * z[kQ1]);
  p.w2 = z[kP2] / (2.0 * z[kQ2]);
  return p;
}

Vec4 phys_to_reg_2df(const Phys2DFState& p, int sign_q1, int sign_q2) {
  if (p.x1 < 0.0 || p.x2 < 0.0) {
    throw InvalidArgument("phys_to_reg_2df: positions must be non-negative");
  }
  const double q1 = (sign_q1 < 0 ? -1.0 : 1.0) * std::sqrt(p.x1);
  const double q2 = (sign_q2 < 0 ? -1.0 : 1.0) * std::sqrt(p.x2);
  return Vec4(q1, q2, 2.0 * q1 * p.w1, 2.0 * q2 * p.w2);
}

Phys4DFResult reg_to_phys_4df(const Vec8& z) {
  const double r1 = z[0] * z[0] + z[1] * z[1];
  const double r3 = z[2] * z[2] + z[3] * z[3];
  if (r1 == 0.0) return Collision4DF{1, z};
  if (r3 == 0.0) return Collision4DF{2, z};
  Phys4DFState p;
  p.x[0] = z[0] * z[0] - z[1] * z[1];
  p.x[1] = 2.0 * z[0] * z[1];
  p.x[2] = 2.0 * z[2] * z[3];
  p.x[3] = z[3] * z[3] - z[2] * z[2];
  p.w[0] = (z[0] * z[4] - z[1] * z[5]) / (2.0 * r1);
  p.w[1] = (z[1] * z[4] + z[0] * z[5]) / (2.0 * r1);
  p.w[2] = (z[3] * z[6] + z[2] * z[7]) / (2.0 * r3);
  p.w[3] = (-z[2] * z[6] + z[3] * z[7]) / (2.0 * r3);
  return p;
}

Vec8 phys_to_reg_4df(const Phys4DFState& p, int sign_12, int sign_34) {
  using C = std::complex<double>;
  const C a = (sign_12 < 0 ? -1.0 : 1.0) * std::sqrt(C(p.x[0], p.x[1]));
  const C b = (sign_34 < 0 ? -1.0 : 1.0) * std::sqrt(C(p.x[3], p.x[2]));
  const double q1 = a.real(), q2 = a.imag();
  const double q4 = b.real(), q3 = b.imag();
  const Vec4& w = p.w;
  Vec8 z;
  z << q1, q2, q3, q4,                        //
      2.0 * w[0] * q1 + 2.0 * w[1] * q2,      //
      -2.0 * w[0] * q2 + 2.0 * w[1] * q1,     //
      2.0 * w[2] * q4 - 2.0 * w[3] * q3,      //
      2.0 * w[2] * q3 + 2.0 * w[3] * q4;
  return z;
}

double hamiltonian_4df(const Phys4DFState& p, MassRatio mr) {
  const double m = mr.value();
  const Vec4& x = p.x;
  const Vec4& w = p.w;
  const double kin =
      0.25 * (w[0] * w[0] + w[1] * w[1]) + (w[2] * w[2] + w[3] * w[3]) / (4.0 * m);
  const double pot = 1.0 / (2.0 * std::hypot(x[0], x[1])) +
                     m * m / (2.0 * std::hypot(x[2], x[3])) +
                     2.0 * m / std::hypot(x[2] - x[0], x[3] - x[1]) +
                     2.0 * m / std::hypot(x[2] + x[0], x[3] + x[1]);
  return kin - pot;
}

double hamiltonian_2df(const Phys2DFState& p, MassRatio mr) {
  const double m = mr.value();
  return 0.25 * p.w1 * p.w1 + p.w2 * p.w2 / (4.0 * m) - 0.5 / p.x1 -
         m * m / (2.0 * p.x2) - 4.0 * m / std::hypot(p.x1, p.x2);
}

double angular_momentum(const Vec8& z) {
  return 0.5 * (z[0] * z[5] - z[1] * z[4] + z[2] * z[7] - z[3] * z[6]);
}

double angular_momentum(const Phys4DFState& p) {
  return p.x[0] * p.w[1] - p.x[1] * p.w[0] + p.x[2] * p.w[3] - p.x[3] * p.w[2];
}

Vec8 angular_momentum_gradient(const Vec8& z) {
  Vec8 g;
  g << z[5], -z[4], z[7], -z[6], -z[1], z[0], -z[3], z[2];
  return 0.5 * g;
}

double collision_momentum(CollidingPair pair, MassRatio mr) {
  const double m = mr.value();
  return pair == CollidingPair::UnitMass ? std::sqrt(8.0)
                                         : std::sqrt(8.0 * m * m * m);
}

Mat4 J2() {
  Mat4 j = Mat4::Zero();
  j.topRightCorner<2, 2>().setIdentity();
  j.bottomLeftCorner<2, 2>() = -Eigen::Matrix2d::Identity();
  return j;
}

Mat8 J4() {
  Mat8 j = Mat8::Zero();
  j.topRightCorner<4, 4>().setIdentity();
  j.bottomLeftCorner<4, 4>() = -Mat4::Identity();
  return j;
}

Mat4 S2() { return Vec4(-1.0, 1.0, 1.0, -1.0).asDiagonal(); }

Mat8 S4() {
  Vec8 d;
  d << 1, -1, 1, -1, -1, 1, -1, 1;
  return d.asDiagonal();
}

Mat8 Lambda() {
  Vec8 d;
  d << 1, 1, 1, 1, -1, -1, -1, -1;
  return d.asDiagonal();
}

Mat8 Y0() {
  Mat8 y = Mat8::Zero();
  y(0, 4) = 1;
  y(1, 2) = 1;
  y(2, 5) = 1;
  y(3, 3) = 1;
  y(4, 0) = -1;
  y(5, 6) = 1;
  y(6, 1) = -1;
  y(7, 7) = 1;
  return y;
}

OrbitSolution rescale_solution(const OrbitSolution& orbit, double eps) {
  if (!(eps > 0.0)) {
    throw InvalidArgument("rescale_solution: eps must be positive");
  }
  OrbitSolution out = orbit;
  out.zeta = eps * orbit.zeta;
  out.zeta1 = eps * orbit.zeta1;
  out.energy = orbit.energy / (eps * eps);
  out.period = orbit.period / eps;
  out.model.frequency = orbit.model.frequency * eps;
  for (auto& v : out.model.a) v *= eps;
  for (auto& v : out.model.b) v *= eps;
  return out;
}

}  // namespace rhomb::model

namespace rhomb {

Vec4 OrbitSolution::initial_state() const {
  return Vec4(0.0, zeta, std::sqrt(8.0), 0.0);
}

}  // namespace rhomb
