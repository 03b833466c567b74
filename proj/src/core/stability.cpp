#include "core/stability.hpp"

#include "core/dynamics.hpp"
#include "core/flow.hpp"
#include "core/model.hpp"
#include "core/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace rhomb::stability {

namespace {

const double kSqrt8 = std::sqrt(8.0);

double max_abs(const Eigen::Ref<const Eigen::MatrixXd>& M) {
  return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
}

}  // namespace

QuarterMatrix quarter_matrix(const OrbitSolution& orbit, const IntegratorConfig& cfg) {
  const MassRatio m(orbit.m);
  const Vec8 z0 = model::embed(orbit.initial_state());
  const auto r = flow::integrate_variational(z0, model::Y0(), m, orbit.energy,
                                             orbit.period / 4.0, cfg);
  QuarterMatrix out;
  out.B = r.Y;
  out.base = r.base;
  out.symplectic_defect = r.symplectic_defect;
  out.pattern_defect = dynamics::pattern_m2_defect(r.Y);
  return out;
}

double KMatrix::max_defect() const {
  return std::max({first_column_defect, pattern_defect, b_relation_defect, c_relation_defect});
}

KMatrix compute_K(const Mat8& B, double zeta, double structural_tol) {
  if (!(zeta > 0.0)) throw InvalidArgument("compute_K: zeta must be positive");
  const Mat8 SJ = model::S4() * model::J4();
  KMatrix K;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      K.full(i, j) = -B.col(i).dot(SJ * B.col(j + 4));
    }
  }
  K.a = K.full(1, 1);
  K.b = K.full(1, 2);
  K.c = K.full(2, 1);
  K.d = K.full(2, 2);
  K.e = K.full(3, 3);
  K.corner14 = K.full(0, 3);
  K.first_column_defect = std::max({std::abs(K.full(0, 0) + 1.0), std::abs(K.full(1, 0)),
                                    std::abs(K.full(2, 0)), std::abs(K.full(3, 0))});
  K.pattern_defect = dynamics::pattern_m_defect(K.full);
  K.b_relation_defect = std::abs(K.b - (K.a + 1.0) * zeta / kSqrt8);
  K.c_relation_defect = std::abs(K.c - (K.d + 1.0) * kSqrt8 / zeta);
  if (structural_tol > 0.0 && K.max_defect() > structural_tol) {
    throw StructuralError("K matrix violates its structure (defect " +
                          std::to_string(K.max_defect()) + ")");
  }
  return K;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::LinearlyStable: return "linearly-stable";
    case Verdict::SpectrallyStableOnly: return "spectrally-stable-only";
    case Verdict::Unstable: return "unstable";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

Classification classify(const KMatrix& K, const ClassifyOptions& opt) {
  Classification c;
  c.lambda_block = K.lambda_block();
  c.e = K.e;
  const double lam = c.lambda_block, e = c.e;
  auto near = [&](double x, double y) {
    return std::abs(x - y) <= opt.tol_coincidence * std::max(1.0, std::max(std::abs(x), std::abs(y)));
  };
  auto on_boundary = [&](double x) { return std::abs(std::abs(x) - 1.0) <= opt.boundary_band; };

  // Collinear problem: e alone.
  if (on_boundary(e)) {
    c.collinear = Verdict::Indeterminate;
  } else if (std::abs(e) > 1.0) {
    c.collinear = Verdict::Unstable;
  } else if (near(e, 0.0)) {
    c.collinear = Verdict::SpectrallyStableOnly;
  } else {
    c.collinear = Verdict::LinearlyStable;
  }

  // Planar problem: both nontrivial eigenvalues.
  if (on_boundary(lam) || on_boundary(e)) {
    c.planar = Verdict::Indeterminate;
    c.note = "eigenvalue within the boundary band of +-1";
  } else if (std::abs(lam) > 1.0 || std::abs(e) > 1.0) {
    c.planar = Verdict::Unstable;
  } else if (near(lam, 0.0)) {
    c.planar = Verdict::SpectrallyStableOnly;
    c.note = "lambda_block = 0";
  } else if (near(lam, e)) {
    c.planar = Verdict::SpectrallyStableOnly;
    c.note = "lambda_block = e";
  } else if (near(lam, -e)) {
    c.planar = Verdict::SpectrallyStableOnly;
    c.note = "lambda_block = -e";
  } else if (near(e, 0.0)) {
    c.planar = Verdict::SpectrallyStableOnly;
    c.note = "e = 0";
  } else {
    c.planar = Verdict::LinearlyStable;
  }
  return c;
}

StabilityReport analyze(const OrbitSolution& orbit, const AnalyzeOptions& opt) {
  StabilityReport rep;
  rep.m = orbit.m;
  rep.zeta = orbit.zeta;
  rep.energy = orbit.energy;
  const QuarterMatrix q = quarter_matrix(orbit, opt.integrator);
  rep.symplectic_defect = q.symplectic_defect;
  rep.pattern_defect = q.pattern_defect;
  rep.K = compute_K(q.B, orbit.zeta, 0.0);
  if (opt.structural_tol > 0.0 && rep.K.max_defect() > opt.structural_tol) {
    rep.structural_ok = false;
    rep.error = "K structural defect " + std::to_string(rep.K.max_defect());
  }

  Eigen::EigenSolver<Mat4> es(rep.K.full, false);
  for (int i = 0; i < 4; ++i) {
    rep.eigenvalues.push_back(es.eigenvalues()[i]);
    rep.max_imag = std::max(rep.max_imag, std::abs(es.eigenvalues()[i].imag()));
  }
  rep.verdict = classify(rep.K, opt.classify);

  const Mat8 J = model::J4(), S = model::S4(), Y0 = model::Y0();
  const Mat8 Binv = -J * q.B.transpose() * J;
  const Mat8 W = Y0.transpose() * S * Y0 * Binv * S * q.B;
  if (opt.check_half_period) {
    const MassRatio m(orbit.m);
    const auto half = flow::integrate_variational(q.base, q.B, m, orbit.energy,
                                                  orbit.period / 4.0, opt.integrator);
    rep.w_product_defect = max_abs(Y0.transpose() * half.Y - W);
  }
  const Mat8 Winv = -J * W.transpose() * J;
  const Mat8 H = 0.5 * (W + Winv);
  Mat8 expected = Mat8::Zero();
  expected.topLeftCorner<4, 4>() = rep.K.full.transpose();
  expected.bottomRightCorner<4, 4>() = rep.K.full;
  rep.w_block_defect = max_abs(H - expected);
  Vec8 v = Vec8::Zero();
  v[4] = 1.0;
  rep.w_trivial_defect = (W * v + v).lpNorm<Eigen::Infinity>();
  return rep;
}

std::vector<StabilityReport> sweep(const std::vector<OrbitSolution>& orbits,
                                   const AnalyzeOptions& opt) {
  std::vector<StabilityReport> rows(orbits.size());
  parallel::for_each_index(orbits.size(), [&](std::size_t i) {
    try {
      rows[i] = analyze(orbits[i], opt);
    } catch (const std::exception& e) {
      rows[i] = StabilityReport{};
      rows[i].m = orbits[i].m;
      rows[i].zeta = orbits[i].zeta;
      rows[i].energy = orbits[i].energy;
      rows[i].structural_ok = false;
      rows[i].error = e.what();
    }
  });
  return rows;
}

MonodromyResult monodromy_oracle_2df(const OrbitSolution& orbit, const IntegratorConfig& cfg,
                                     double unit_tol) {
  const MassRatio m(orbit.m);
  const Vec4 z0 = orbit.initial_state();
  const auto r = flow::integrate_variational(z0, Mat4::Identity(), m, orbit.energy,
                                             orbit.period, cfg);
  MonodromyResult out;
  out.X = r.Y;
  out.determinant = r.Y.determinant();
  const Vec4 g = dynamics::vf_2df(z0, m, orbit.energy);
  out.trivial_defect = (r.Y * g - g).norm() / g.norm();
  Eigen::EigenSolver<Mat4> es(r.Y, false);
  for (int i = 0; i < 4; ++i) out.multipliers.push_back(es.eigenvalues()[i]);
  std::vector<std::complex<double>> sorted = out.multipliers;
  std::sort(sorted.begin(), sorted.end(), [](auto x, auto y) {
    return std::abs(x - 1.0) > std::abs(y - 1.0);
  });
  out.nontrivial[0] = sorted[0];
  out.nontrivial[1] = sorted[1];
  out.stable = true;
  for (const auto& mu : out.nontrivial) {
    if (std::abs(std::abs(mu) - 1.0) > unit_tol || std::abs(mu - 1.0) <= unit_tol) {
      out.stable = false;
    }
  }
  return out;
}

WindowSummary summarize(const std::vector<StabilityReport>& rows) {
  WindowSummary w;
  const StabilityReport* prev = nullptr;
  for (const auto& r : rows) {
    if (!r.error.empty() && r.eigenvalues.empty()) continue;
    if (prev && !w.zero_crossing &&
        (prev->verdict.lambda_block < 0.0) != (r.verdict.lambda_block < 0.0)) {
      w.zero_crossing = std::make_pair(std::min(prev->m, r.m), std::max(prev->m, r.m));
    }
    if (r.verdict.planar == Verdict::LinearlyStable) {
      if (!w.stable_range) {
        w.stable_range = std::make_pair(r.m, r.m);
      } else {
        w.stable_range->first = std::min(w.stable_range->first, r.m);
        w.stable_range->second = std::max(w.stable_range->second, r.m);
      }
    }
    prev = &r;
  }
  return w;
}

}  // namespace rhomb::stability
