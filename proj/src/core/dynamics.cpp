#include "core/dynamics.hpp"

#include "core/model.hpp"

#include <array>

namespace rhomb::dynamics {

namespace {

constexpr double kCollapseFloor = 1e-300;

// Value, gradient and Hessian of f = u * rho^(-1/2) given the same data for
// u and rho. Both regularized Hamiltonians carry their mutual-attraction
// term in this form.
template <int N>
struct InvSqrtProduct {
  using V = Eigen::Matrix<double, N, 1>;
  using M = Eigen::Matrix<double, N, N>;
  double value;
  V grad;
  M hess;

  InvSqrtProduct(double u, const V& du, const M& d2u, double rho, const V& drho,
                 const M& d2rho) {
    const double r12 = 1.0 / std::sqrt(rho);
    const double r32 = r12 / rho;
    const double r52 = r32 / rho;
    value = u * r12;
    grad = r12 * du - 0.5 * u * r32 * drho;
    hess = r12 * d2u - 0.5 * r32 * (du * drho.transpose() + drho * du.transpose()) -
           0.5 * u * r32 * d2rho + 0.75 * u * r52 * drho * drho.transpose();
  }
};

// Q1^2 Q2^2 / sqrt(Q1^4 + Q2^4); the 2DF Hamiltonian carries -4m times this.
InvSqrtProduct<2> coupling_2df(double q1, double q2) {
  using V = Eigen::Vector2d;
  using M = Eigen::Matrix2d;
  const double q1s = q1 * q1, q2s = q2 * q2;
  const double rho = q1s * q1s + q2s * q2s;
  if (rho < kCollapseFloor) {
    throw DomainError("2DF vector field: total collapse (Q1 = Q2 = 0)");
  }
  const double u = q1s * q2s;
  const V du(2.0 * q1 * q2s, 2.0 * q1s * q2);
  M d2u;
  d2u << 2.0 * q2s, 4.0 * q1 * q2, 4.0 * q1 * q2, 2.0 * q1s;
  const V drho(4.0 * q1s * q1, 4.0 * q2s * q2);
  M d2rho;
  d2rho << 12.0 * q1s, 0.0, 0.0, 12.0 * q2s;
  return InvSqrtProduct<2>(u, du, d2u, rho, drho, d2rho);
}

// Position-only pieces of the 4DF Hamiltonian.
struct Geometry4 {
  double r1, r3;  // Q1^2 + Q2^2, Q3^2 + Q4^2
  Vec4 dr1, dr3;
  Mat4 d2r1, d2r3;
  double qq;  // the cross term Q1^2 Q3 Q4 - Q2^2 Q3 Q4 - Q1 Q2 Q3^2 + Q1 Q2 Q4^2
  Vec4 dqq;
  Mat4 d2qq;

  explicit Geometry4(const Vec8& z) {
    const double q1 = z[0], q2 = z[1], q3 = z[2], q4 = z[3];
    r1 = q1 * q1 + q2 * q2;
    r3 = q3 * q3 + q4 * q4;
    dr1 << 2 * q1, 2 * q2, 0, 0;
    dr3 << 0, 0, 2 * q3, 2 * q4;
    d2r1 = Vec4(2, 2, 0, 0).asDiagonal();
    d2r3 = Vec4(0, 0, 2, 2).asDiagonal();
    qq = q1 * q1 * q3 * q4 - q2 * q2 * q3 * q4 - q1 * q2 * q3 * q3 +
         q1 * q2 * q4 * q4;
    dqq << 2 * q1 * q3 * q4 - q2 * q3 * q3 + q2 * q4 * q4,
        -2 * q2 * q3 * q4 - q1 * q3 * q3 + q1 * q4 * q4,
        q1 * q1 * q4 - q2 * q2 * q4 - 2 * q1 * q2 * q3,
        q1 * q1 * q3 - q2 * q2 * q3 + 2 * q1 * q2 * q4;
    const double h11 = 2 * q3 * q4;
    const double h12 = q4 * q4 - q3 * q3;
    const double h13 = 2 * q1 * q4 - 2 * q2 * q3;
    const double h14 = 2 * q1 * q3 + 2 * q2 * q4;
    const double h22 = -2 * q3 * q4;
    const double h23 = -2 * q2 * q4 - 2 * q1 * q3;
    const double h24 = 2 * q1 * q4 - 2 * q2 * q3;
    const double h33 = -2 * q1 * q2;
    const double h34 = q1 * q1 - q2 * q2;
    const double h44 = 2 * q1 * q2;
    d2qq << h11, h12, h13, h14,  //
        h12, h22, h23, h24,      //
        h13, h23, h33, h34,      //
        h14, h24, h34, h44;
    if (r1 * r1 + r3 * r3 < kCollapseFloor) {
      throw DomainError("4DF Hamiltonian: total collapse");
    }
  }

  // r1 r3 / sqrt(r1^2 + r3^2 + 4 sigma qq)
  InvSqrtProduct<4> coupling(double sigma) const {
    const double rho = r1 * r1 + r3 * r3 + 4.0 * sigma * qq;
    if (rho <= kCollapseFloor) {
      throw DomainError("4DF Hamiltonian: collision between unequal masses");
    }
    const double u = r1 * r3;
    const Vec4 du = r3 * dr1 + r1 * dr3;
    const Mat4 d2u = dr1 * dr3.transpose() + dr3 * dr1.transpose() + r3 * d2r1 +
                     r1 * d2r3;
    const Vec4 drho = 2.0 * r1 * dr1 + 2.0 * r3 * dr3 + 4.0 * sigma * dqq;
    const Mat4 d2rho = 2.0 * dr1 * dr1.transpose() + 2.0 * r1 * d2r1 +
                       2.0 * dr3 * dr3.transpose() + 2.0 * r3 * d2r3 +
                       4.0 * sigma * d2qq;
    return InvSqrtProduct<4>(u, du, d2u, rho, drho, d2rho);
  }
};

}  // namespace

Vec4 vf_2df(const Vec4& z, MassRatio mr, double E) {
  const double m = mr.value();
  const double q1 = z[kQ1], q2 = z[kQ2], p1 = z[kP1], p2 = z[kP2];
  const double q1s = q1 * q1, q2s = q2 * q2;
  const double rho = q1s * q1s + q2s * q2s;
  if (rho < kCollapseFloor) {
    throw DomainError("vf_2df: total collapse (Q1 = Q2 = 0)");
  }
  const double r = std::sqrt(rho);
  const double r3 = rho * r;
  Vec4 f;
  f[kQ1] = q2s * p1 / 8.0;
  f[kQ2] = q1s * p2 / (8.0 * m);
  f[kP1] = -q1 * p2 * p2 / (8.0 * m) + q1 * m * m + 8.0 * q1 * q2s * m / r -
           8.0 * q1s * q1s * q1 * q2s * m / r3 + 2.0 * q1 * q2s * E;
  f[kP2] = -q2 * p1 * p1 / 8.0 + q2 + 8.0 * q1s * q2 * m / r -
           8.0 * q1s * q2s * q2s * q2 * m / r3 + 2.0 * q1s * q2 * E;
  return f;
}

Vec4 grad_gamma_2df(const Vec4& z, MassRatio mr, double E) {
  const double m = mr.value();
  const double q1 = z[kQ1], q2 = z[kQ2], p1 = z[kP1], p2 = z[kP2];
  const auto c = coupling_2df(q1, q2);
  Vec4 g;
  g[kQ1] = q1 * p2 * p2 / (8.0 * m) - q1 * m * m - 4.0 * m * c.grad[0] -
           2.0 * q1 * q2 * q2 * E;
  g[kQ2] = q2 * p1 * p1 / 8.0 - q2 - 4.0 * m * c.grad[1] - 2.0 * q1 * q1 * q2 * E;
  g[kP1] = q2 * q2 * p1 / 8.0;
  g[kP2] = q1 * q1 * p2 / (8.0 * m);
  return g;
}

Mat4 hess_gamma_2df(const Vec4& z, MassRatio mr, double E) {
  const double m = mr.value();
  const double q1 = z[kQ1], q2 = z[kQ2], p1 = z[kP1], p2 = z[kP2];
  const auto c = coupling_2df(q1, q2);
  Mat4 h = Mat4::Zero();
  h(0, 0) = p2 * p2 / (8.0 * m) - m * m - 4.0 * m * c.hess(0, 0) - 2.0 * q2 * q2 * E;
  h(1, 1) = p1 * p1 / 8.0 - 1.0 - 4.0 * m * c.hess(1, 1) - 2.0 * q1 * q1 * E;
  h(0, 1) = h(1, 0) = -4.0 * m * c.hess(0, 1) - 4.0 * q1 * q2 * E;
  h(2, 2) = q2 * q2 / 8.0;
  h(3, 3) = q1 * q1 / (8.0 * m);
  h(1, 2) = h(2, 1) = q2 * p1 / 4.0;
  h(0, 3) = h(3, 0) = q1 * p2 / (4.0 * m);
  return h;
}

Vec8 grad_gamma_4df(const Vec8& z, MassRatio mr, double E) {
  const double m = mr.value();
  const Geometry4 g(z);
  const auto cm = g.coupling(-1.0);
  const auto cp = g.coupling(+1.0);
  const double pa = z[4] * z[4] + z[5] * z[5];
  const double pb = z[6] * z[6] + z[7] * z[7];

  Vec8 out;
  out.head<4>() = pa / 16.0 * g.dr3 + pb / (16.0 * m) * g.dr1 - 0.5 * g.dr3 -
                  0.5 * m * m * g.dr1 - 2.0 * m * (cm.grad + cp.grad) -
                  E * (g.r3 * g.dr1 + g.r1 * g.dr3);
  out[4] = z[4] * g.r3 / 8.0;
  out[5] = z[5] * g.r3 / 8.0;
  out[6] = z[6] * g.r1 / (8.0 * m);
  out[7] = z[7] * g.r1 / (8.0 * m);
  return out;
}

Vec8 vf_4df(const Vec8& z, MassRatio m, double E) {
  const Vec8 g = grad_gamma_4df(z, m, E);
  Vec8 f;
  f.head<4>() = g.tail<4>();
  f.tail<4>() = -g.head<4>();
  return f;
}

Mat8 hess_gamma_4df(const Vec8& z, MassRatio mr, double E) {
  const double m = mr.value();
  const Geometry4 g(z);
  const auto cm = g.coupling(-1.0);
  const auto cp = g.coupling(+1.0);
  const double pa = z[4] * z[4] + z[5] * z[5];
  const double pb = z[6] * z[6] + z[7] * z[7];

  Mat8 h = Mat8::Zero();
  h.topLeftCorner<4, 4>() =
      pa / 16.0 * g.d2r3 + pb / (16.0 * m) * g.d2r1 - 0.5 * g.d2r3 -
      0.5 * m * m * g.d2r1 - 2.0 * m * (cm.hess + cp.hess) -
      E * (g.dr1 * g.dr3.transpose() + g.dr3 * g.dr1.transpose() + g.r3 * g.d2r1 +
           g.r1 * g.d2r3);
  // Mixed position-momentum block: d/dQ of the momentum gradient.
  Mat4 qp;
  qp.col(0) = z[4] / 8.0 * g.dr3;
  qp.col(1) = z[5] / 8.0 * g.dr3;
  qp.col(2) = z[6] / (8.0 * m) * g.dr1;
  qp.col(3) = z[7] / (8.0 * m) * g.dr1;
  h.topRightCorner<4, 4>() = qp;
  h.bottomLeftCorner<4, 4>() = qp.transpose();
  h.bottomRightCorner<4, 4>() =
      Vec4(g.r3 / 8.0, g.r3 / 8.0, g.r1 / (8.0 * m), g.r1 / (8.0 * m)).asDiagonal();
  return h;
}

Var4State pack(const Vec8& base, const Mat8& tangent) {
  Var4State v;
  v.head<8>() = base;
  v.tail<64>() = Eigen::Map<const Eigen::Matrix<double, 64, 1>>(tangent.data());
  return v;
}

Vec8 base_of(const Var4State& v) { return v.head<8>(); }

Mat8 tangent_of(const Var4State& v) {
  return Eigen::Map<const Mat8>(v.tail<64>().data());
}

Var2State pack(const Vec4& base, const Mat4& tangent) {
  Var2State v;
  v.head<4>() = base;
  v.tail<16>() = Eigen::Map<const Eigen::Matrix<double, 16, 1>>(tangent.data());
  return v;
}

Vec4 base_of(const Var2State& v) { return v.head<4>(); }

Mat4 tangent_of(const Var2State& v) {
  return Eigen::Map<const Mat4>(v.tail<16>().data());
}

Var4State variational_rhs(const Var4State& v, MassRatio m, double E) {
  const Vec8 z = v.head<8>();
  const Eigen::Map<const Mat8> y(v.tail<64>().data());
  const Mat8 h = hess_gamma_4df(z, m, E);
  // J H Y without forming J: rows 0..3 take H rows 4..7, rows 4..7 take -H rows 0..3.
  Mat8 jh;
  jh.topRows<4>() = h.bottomRows<4>();
  jh.bottomRows<4>() = -h.topRows<4>();
  const Mat8 dy = jh * y;
  Var4State out;
  out.head<8>() = vf_4df(z, m, E);
  out.tail<64>() = Eigen::Map<const Eigen::Matrix<double, 64, 1>>(dy.data());
  return out;
}

Var2State variational_rhs(const Var2State& v, MassRatio m, double E) {
  const Vec4 z = v.head<4>();
  const Eigen::Map<const Mat4> y(v.tail<16>().data());
  const Mat4 h = hess_gamma_2df(z, m, E);
  Mat4 jh;
  jh.topRows<2>() = h.bottomRows<2>();
  jh.bottomRows<2>() = -h.topRows<2>();
  const Mat4 dy = jh * y;
  Var2State out;
  out.head<4>() = vf_2df(z, m, E);
  out.tail<16>() = Eigen::Map<const Eigen::Matrix<double, 16, 1>>(dy.data());
  return out;
}

bool allowed_in_m(int row, int col) {
  // Rows/cols {0, 3} couple to each other, as do {1, 2}.
  const bool outer_r = row == 0 || row == 3;
  const bool outer_c = col == 0 || col == 3;
  return outer_r == outer_c;
}

double pattern_m_defect(const Mat4& M) {
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (!allowed_in_m(i, j)) worst = std::max(worst, std::abs(M(i, j)));
  return worst;
}

double pattern_m2_defect(const Mat8& M) {
  double worst = 0.0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if (!allowed_in_m(i % 4, j % 4)) worst = std::max(worst, std::abs(M(i, j)));
  return worst;
}

bool in_pattern_m2(const Mat8& M, double tol) { return pattern_m2_defect(M) < tol; }

char hessian_entry_class(int row, int col) {
  static constexpr std::array<const char*, 8> kTable = {
      "*aa*00a*",  //
      "a**a00aa",  //
      "a**aaa00",  //
      "*aa**a00",  //
      "00a**000",  //
      "00aa0*00",  //
      "aa0000*0",  //
      "*a00000*",
  };
  return kTable.at(static_cast<std::size_t>(row))[col];
}

}  // namespace rhomb::dynamics
