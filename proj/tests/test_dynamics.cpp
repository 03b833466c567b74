#include "core/dynamics.hpp"
#include "core/flow.hpp"
#include "core/model.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace rhomb;
using namespace testing;

namespace {

template <class Vec, class F>
Vec fd_gradient(const Vec& z, F f) {
  Vec g;
  for (int i = 0; i < z.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(z[i]));
    Vec zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    g[i] = (f(zp) - f(zm)) / (2 * h);
  }
  return g;
}

double rel(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::MatrixXd>& b) {
  return max_abs(a - b) / std::max(1.0, max_abs(b));
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("vf_2df at the unit-mass collision") {
  const double zeta = 2.3;
  for (double P1 : {std::sqrt(8.0), -std::sqrt(8.0)}) {
    const Vec4 v = dynamics::vf_2df(Vec4(0, zeta, P1, 0), MassRatio(0.6), -0.5);
    CHECK(v[0] == doctest::Approx(zeta * zeta * P1 / 8.0));
    CHECK(v[1] == 0.0);
    CHECK(v[2] == doctest::Approx(0.0).epsilon(1e-15).scale(1.0));
    CHECK(v[3] == 0.0);
  }
}

TEST_CASE("vf_2df is J grad Gamma") {
  for (int k = 0; k < 1000; ++k) {
    const MassRatio m(uniform(0.05, 1.0));
    const double E = uniform(-2, -0.1);
    const Vec4 z = random_state2();
    const Vec4 g = fd_gradient(z, [&](const Vec4& y) { return model::gamma_2df(y, m, E); });
    CHECK(rel(model::J2() * g, dynamics::vf_2df(z, m, E)) < 1e-7);
    CHECK(rel(dynamics::grad_gamma_2df(z, m, E), g) < 1e-7);
  }
}

TEST_CASE("4DF gradient and field") {
  for (int k = 0; k < 1000; ++k) {
    const MassRatio m(uniform(0.05, 1.0));
    const double E = uniform(-2, -0.1);
    const Vec8 z = random_state4();
    const Vec8 g = fd_gradient(z, [&](const Vec8& y) { return model::gamma_4df(y, m, E); });
    CHECK(rel(dynamics::grad_gamma_4df(z, m, E), g) < 1e-7);
    CHECK(rel(dynamics::vf_4df(z, m, E), model::J4() * dynamics::grad_gamma_4df(z, m, E)) < 1e-15);
  }
}

TEST_CASE("the invariant set is invariant and carries the 2DF flow") {
  for (int k = 0; k < 500; ++k) {
    const MassRatio m(uniform(0.05, 1.0));
    const double E = uniform(-2, -0.1);
    const Vec4 z = random_state2();
    const Vec8 v = dynamics::vf_4df(model::embed(z), m, E);
    CHECK(v[1] == 0.0);
    CHECK(v[2] == 0.0);
    CHECK(v[5] == 0.0);
    CHECK(v[6] == 0.0);
    CHECK(rel(model::restrict_to_invariant_set(v), dynamics::vf_2df(z, m, E)) < 1e-13);
  }
}

TEST_CASE("Hessians: symmetry and finite differences") {
  for (int k = 0; k < 300; ++k) {
    const MassRatio m(uniform(0.05, 1.0));
    const double E = uniform(-2, -0.1);
    const Vec8 z = random_state4();
    const Mat8 H = dynamics::hess_gamma_4df(z, m, E);
    CHECK(max_abs(H - H.transpose()) <= 1e-14 * std::max(1.0, max_abs(H)));
    Mat8 fd;
    for (int j = 0; j < 8; ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(z[j]));
      Vec8 zp = z, zm = z;
      zp[j] += h;
      zm[j] -= h;
      fd.col(j) = (dynamics::grad_gamma_4df(zp, m, E) - dynamics::grad_gamma_4df(zm, m, E)) / (2 * h);
    }
    CHECK(rel(H, fd) < 1e-6);

    const Vec4 y = random_state2();
    const Mat4 H2 = dynamics::hess_gamma_2df(y, m, E);
    Mat4 fd2;
    for (int j = 0; j < 4; ++j) {
      Vec4 yp = y, ym = y;
      yp[j] += 1e-6;
      ym[j] -= 1e-6;
      fd2.col(j) = (dynamics::grad_gamma_2df(yp, m, E) - dynamics::grad_gamma_2df(ym, m, E)) / 2e-6;
    }
    CHECK(rel(H2, fd2) < 1e-6);
  }
}

TEST_CASE("Hessian zero structure") {
  int zero_marked = 0, a_marked = 0;
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      const char c = dynamics::hessian_entry_class(i, j);
      CHECK(c == dynamics::hessian_entry_class(j, i));
      zero_marked += c == '0';
      a_marked += c == 'a';
    }
  }
  CHECK(zero_marked > 0);
  CHECK(a_marked > 0);
  for (int k = 0; k < 300; ++k) {
    const MassRatio m(uniform(0.05, 1.0));
    const double E = uniform(-2, -0.1);
    const Mat8 Ha = dynamics::hess_gamma_4df(model::embed(random_state2()), m, E);
    const Mat8 Hg = dynamics::hess_gamma_4df(random_state4(), m, E);
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        const char c = dynamics::hessian_entry_class(i, j);
        if (c == '0' || c == 'a') CHECK(std::abs(Ha(i, j)) < 1e-10);
        if (c == '0') CHECK(std::abs(Hg(i, j)) < 1e-10);
      }
    }
  }
}

TEST_CASE("domain errors at total collapse") {
  CHECK_THROWS_AS(dynamics::vf_2df(Vec4(0, 0, 1, 1), MassRatio(1.0), -1.0), DomainError);
  CHECK_THROWS_AS(dynamics::vf_4df(Vec8::Zero(), MassRatio(1.0), -1.0), DomainError);
}

TEST_CASE("variational_rhs keeps a zero tangent at zero") {
  const MassRatio m(0.7);
  const Vec8 z = random_state4();
  const auto d = dynamics::variational_rhs(dynamics::pack(z, Mat8::Zero()), m, -0.5);
  CHECK(dynamics::tangent_of(d).isZero(0.0));
  CHECK(dynamics::base_of(d) == dynamics::vf_4df(z, m, -0.5));
}

TEST_CASE("the flow direction solves the variational equation") {
  const OrbitSolution& o = shot_orbit(1.0);
  const MassRatio m(o.m);
  const Vec4 z0 = o.initial_state();
  Mat4 seed = Mat4::Identity();
  seed.col(0) = dynamics::vf_2df(z0, m, o.energy);
  const auto r = flow::integrate_variational(z0, seed, m, o.energy, o.period / 4);
  const Vec4 expected = dynamics::vf_2df(r.base, m, o.energy);
  CHECK((r.Y.col(0) - expected).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("variational solutions from Y0 stay symplectic and in the M2 pattern") {
  const OrbitSolution& o = shot_orbit(1.0);
  const MassRatio m(o.m);
  const Vec8 z0 = model::embed(o.initial_state());
  for (double frac : {0.1, 0.25}) {
    const auto r = flow::integrate_variational(z0, model::Y0(), m, o.energy, frac * o.period);
    CHECK(r.symplectic_defect < 1e-8);
    CHECK(dynamics::pattern_m2_defect(r.Y) < 1e-8);
    // Columns started in the (*,0,0,*,*,0,0,*) subspace stay there.
    for (int c : {0, 3, 4, 7}) {
      for (int row : {1, 2, 5, 6}) CHECK(std::abs(r.Y(row, c)) < 1e-12);
    }
  }
}

TEST_CASE("M2 pattern predicate") {
  CHECK(dynamics::in_pattern_m2(model::J4()));
  CHECK(dynamics::in_pattern_m2(model::S4()));
  CHECK(dynamics::in_pattern_m2(model::Y0()));
  CHECK(dynamics::in_pattern_m2(Mat8::Identity()));
  CHECK_FALSE(dynamics::in_pattern_m2(Mat8::Ones()));
  CHECK(dynamics::pattern_m_defect(Mat4::Ones()) == 1.0);
}

TEST_CASE("M2 pattern is closed under multiplication") {
  auto random_pattern = [] {
    Mat8 M = Mat8::Zero();
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        if (dynamics::allowed_in_m(i % 4, j % 4)) M(i, j) = uniform(-1, 1);
      }
    }
    return M;
  };
  for (int k = 0; k < 100; ++k) {
    const Mat8 A = random_pattern(), B = random_pattern();
    REQUIRE(dynamics::pattern_m2_defect(A) == 0.0);
    CHECK(dynamics::pattern_m2_defect(A * B) == 0.0);
  }
}

}  // TEST_SUITE
