#include "core/orbit.hpp"

#include "core/dynamics.hpp"
#include "core/flow.hpp"
#include "core/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rhomb::orbit {

namespace {

const double kSqrt8 = std::sqrt(8.0);

inline double alt(int i) { return (i % 2 == 0) ? 1.0 : -1.0; }
inline int harmonic(int i) { return 2 * i + 1; }

// sin/cos tables of the odd harmonics on a uniform grid of [0, 2 pi).
struct Basis {
  int nodes, terms;
  Eigen::MatrixXd S, C;

  Basis(int n_nodes, int n_terms) : nodes(n_nodes), terms(n_terms), S(n_nodes, n_terms),
                                    C(n_nodes, n_terms) {
    for (int j = 0; j < nodes; ++j) {
      const double s = kTwoPi * j / nodes;
      for (int i = 0; i < terms; ++i) {
        S(j, i) = std::sin(harmonic(i) * s);
        C(j, i) = std::cos(harmonic(i) * s);
      }
    }
  }
};

Eigen::Map<const Eigen::VectorXd> view(const std::vector<double>& v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

// Values and s-derivatives of the model at every node (columns Q1, Q2, P1, P2).
void model_on_nodes(const TrigModel& model, const Basis& B, Eigen::MatrixXd& Z,
                    Eigen::MatrixXd& dZ) {
  const int t = B.terms;
  Eigen::VectorXd k(t), sg(t);
  for (int i = 0; i < t; ++i) {
    k[i] = harmonic(i);
    sg[i] = alt(i);
  }
  const auto a = view(model.a), b = view(model.b), c = view(model.c), d = view(model.d);
  Z.resize(B.nodes, 4);
  dZ.resize(B.nodes, 4);
  Z.col(0) = B.S * a;
  Z.col(1) = B.C * sg.cwiseProduct(b);
  Z.col(2) = -B.C * sg.cwiseProduct(c);
  Z.col(3) = B.S * d;
  dZ.col(0) = B.C * k.cwiseProduct(a);
  dZ.col(1) = -B.S * k.cwiseProduct(sg).cwiseProduct(b);
  dZ.col(2) = B.S * k.cwiseProduct(sg).cwiseProduct(c);
  dZ.col(3) = B.C * k.cwiseProduct(d);
}

Eigen::VectorXd pack_coefficients(const TrigModel& m) {
  const int t = static_cast<int>(m.size());
  Eigen::VectorXd x(4 * t);
  x << view(m.a), view(m.b), view(m.c), view(m.d);
  return x;
}

void unpack_coefficients(const Eigen::VectorXd& x, TrigModel& m) {
  const int t = static_cast<int>(m.size());
  for (int i = 0; i < t; ++i) {
    m.a[i] = x[i];
    m.b[i] = x[t + i];
    m.c[i] = x[2 * t + i];
    m.d[i] = x[3 * t + i];
  }
}

TrigModel resized(const TrigModel& m, int harmonics) {
  TrigModel out(harmonics);
  out.frequency = m.frequency;
  const std::size_t keep = std::min(out.size(), m.size());
  for (std::size_t i = 0; i < keep; ++i) {
    out.a[i] = m.a[i];
    out.b[i] = m.b[i];
    out.c[i] = m.c[i];
    out.d[i] = m.d[i];
  }
  return out;
}

// Residual vector and its analytic Jacobian with respect to the packed
// coefficients.
void residual_and_jacobian(const TrigModel& model, const Basis& B, MassRatio m,
                           double energy, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
  Eigen::MatrixXd Z, dZ;
  model_on_nodes(model, B, Z, dZ);
  const int N = B.nodes, t = B.terms;
  const double w = std::sqrt(kTwoPi / N);
  r.resize(4 * N);
  if (jac) jac->setZero(4 * N, 4 * t);
  const Mat4 J = model::J2();
  for (int j = 0; j < N; ++j) {
    const Vec4 z = Z.row(j).transpose();
    const Vec4 f = dynamics::vf_2df(z, m, energy);
    for (int q = 0; q < 4; ++q) r[4 * j + q] = w * (dZ(j, q) - f[q]);
    if (!jac) continue;
    const Mat4 A = J * dynamics::hess_gamma_2df(z, m, energy);
    for (int i = 0; i < t; ++i) {
      const double k = harmonic(i), sg = alt(i);
      const double sn = B.S(j, i), cs = B.C(j, i);
      // d z_q / d coef and d z_q' / d coef for the coefficient driving component q.
      const double dz[4] = {sn, sg * cs, -sg * cs, sn};
      const double ddz[4] = {k * cs, -k * sg * sn, k * sg * sn, k * cs};
      for (int q = 0; q < 4; ++q) {
        const int col = q * t + i;
        for (int row = 0; row < 4; ++row) {
          (*jac)(4 * j + row, col) = -w * A(row, q) * dz[q];
        }
        (*jac)(4 * j + q, col) += w * ddz[q];
      }
    }
  }
}

double tail_size(const TrigModel& m) {
  const std::size_t n = m.size() - 1;
  return std::max({std::abs(m.a[n]), std::abs(m.b[n]), std::abs(m.c[n]), std::abs(m.d[n])});
}

double head_size(const TrigModel& m) {
  return std::max({std::abs(m.a[0]), std::abs(m.b[0]), std::abs(m.c[0]), std::abs(m.d[0])});
}

// Signed closure defect driving the outer secant: P1 after one period of a
// true integration from the model's s = 0 state, minus sqrt 8.
double energy_defect(const TrigModel& model, MassRatio m, double energy,
                     const IntegratorConfig& cfg) {
  const Vec4 z0 = eval_model(model, 0.0).z;
  const Vec4 z1 = flow::flow_2df(z0, m, energy, kTwoPi, cfg);
  return z1[kP1] - kSqrt8;
}

}  // namespace

ModelEval eval_model(const TrigModel& model, double s) {
  ModelEval out{Vec4::Zero(), Vec4::Zero()};
  const double w = model.frequency;
  const double x = w * s;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const int ii = static_cast<int>(i);
    const double k = harmonic(ii), sg = alt(ii);
    const double sn = std::sin(k * x), cs = std::cos(k * x);
    out.z[kQ1] += model.a[i] * sn;
    out.z[kQ2] += model.b[i] * sg * cs;
    out.z[kP1] -= model.c[i] * sg * cs;
    out.z[kP2] += model.d[i] * sn;
    out.dz[kQ1] += model.a[i] * k * w * cs;
    out.dz[kQ2] -= model.b[i] * sg * k * w * sn;
    out.dz[kP1] += model.c[i] * sg * k * w * sn;
    out.dz[kP2] += model.d[i] * k * w * cs;
  }
  return out;
}

Eigen::VectorXd residual_vector(const TrigModel& model, MassRatio m, double energy,
                                int nodes) {
  if (nodes < 4) throw InvalidArgument("residual: need at least 4 quadrature nodes");
  if (model.frequency != 1.0) throw InvalidArgument("residual: model must be 2 pi periodic");
  const Basis B(nodes, static_cast<int>(model.size()));
  Eigen::VectorXd r;
  residual_and_jacobian(model, B, m, energy, r, nullptr);
  return r;
}

double residual(const TrigModel& model, MassRatio m, double energy, int nodes) {
  return residual_vector(model, m, energy, nodes).squaredNorm();
}

TrigModel project_samples(const std::vector<Vec4>& samples, int harmonics) {
  const int N = static_cast<int>(samples.size());
  if (N < 2 * (2 * harmonics + 1) + 1) {
    throw InvalidArgument("project_samples: too few samples for the harmonic count");
  }
  TrigModel out(harmonics);
  for (int i = 0; i <= harmonics; ++i) {
    const double k = harmonic(i), sg = alt(i);
    double sa = 0, sb = 0, sc = 0, sd = 0;
    for (int j = 0; j < N; ++j) {
      const double s = kTwoPi * j / N;
      const double sn = std::sin(k * s), cs = std::cos(k * s);
      sa += samples[j][kQ1] * sn;
      sb += samples[j][kQ2] * cs;
      sc += samples[j][kP1] * cs;
      sd += samples[j][kP2] * sn;
    }
    out.a[i] = 2.0 * sa / N;
    out.b[i] = 2.0 * sg * sb / N;
    out.c[i] = -2.0 * sg * sc / N;
    out.d[i] = 2.0 * sd / N;
  }
  return out;
}

double minimize_residual(TrigModel& model, MassRatio m, double energy, const FitOptions& opt) {
  const Basis B(opt.nodes, static_cast<int>(model.size()));
  Eigen::VectorXd x = pack_coefficients(model);
  Eigen::VectorXd r, r_try;
  Eigen::MatrixXd jac;
  residual_and_jacobian(model, B, m, energy, r, &jac);
  double cost = r.squaredNorm();
  double lambda = 1e-6;
  TrigModel trial = model;
  for (int it = 0; it < opt.max_inner && cost > 1e-30; ++it) {
    const Eigen::MatrixXd JtJ = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    bool accepted = false;
    for (int tries = 0; tries < 12 && !accepted; ++tries) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd step = -A.ldlt().solve(g);
      const Eigen::VectorXd x_try = x + step;
      unpack_coefficients(x_try, trial);
      try {
        residual_and_jacobian(trial, B, m, energy, r_try, nullptr);
      } catch (const DomainError&) {
        lambda *= 10.0;
        continue;
      }
      const double c = r_try.squaredNorm();
      if (c < cost) {
        const double gain = cost - c;
        x = x_try;
        model = trial;
        r = r_try;
        cost = c;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (gain <= 1e-14 * cost || step.lpNorm<Eigen::Infinity>() < 1e-15) return cost;
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted) break;
    residual_and_jacobian(model, B, m, energy, r, &jac);
  }
  return cost;
}

OrbitSolution fit_orbit(MassRatio m, double energy_guess, const TrigModel& model_guess,
                        const FitOptions& opt) {
  if (!(energy_guess < 0.0)) throw InvalidArgument("fit_orbit: energy guess must be negative");
  if (model_guess.size() == 0) throw InvalidArgument("fit_orbit: empty model guess");
  if (model_guess.frequency != 1.0) {
    throw InvalidArgument("fit_orbit: the model guess must be 2 pi periodic");
  }
  const bool automatic = opt.harmonics <= 0;
  int n = automatic ? std::max(opt.min_harmonics, model_guess.n) : opt.harmonics;
  if (2 * (2 * n + 1) >= opt.nodes) throw InvalidArgument("fit_orbit: too many harmonics for the node count");
  TrigModel model = resized(model_guess, n);

  // Harmonic count: grow until the last coefficients are negligible.
  double fit_cost = minimize_residual(model, m, energy_guess, opt);
  while (automatic && tail_size(model) > opt.tail_tol * std::max(1.0, head_size(model)) &&
         n + 8 <= opt.max_harmonics && 2 * (2 * (n + 8) + 1) < opt.nodes) {
    n += 8;
    model = resized(model, n);
    fit_cost = minimize_residual(model, m, energy_guess, opt);
  }

  // Secant on E.
  double e0 = energy_guess;
  double f0 = energy_defect(model, m, e0, opt.integrator);
  double e1 = energy_guess * (1.0 + 1e-5);
  TrigModel model1 = model;
  fit_cost = minimize_residual(model1, m, e1, opt);
  double f1 = energy_defect(model1, m, e1, opt.integrator);
  int growth = 0;
  bool converged = std::abs(f1) < opt.defect_tol;
  for (int it = 0; it < opt.max_outer && !converged; ++it) {
    if (f1 == f0) break;
    const double e2 = e1 - f1 * (e1 - e0) / (f1 - f0);
    TrigModel model2 = model1;
    fit_cost = minimize_residual(model2, m, e2, opt);
    const double f2 = energy_defect(model2, m, e2, opt.integrator);
    growth = (std::abs(f2) > std::abs(f1)) ? growth + 1 : 0;
    if (growth >= 3) {
      throw ConvergenceError("fit_orbit: outside the basin, defect grows (best E = " +
                             std::to_string(e1) + ")");
    }
    const double de = std::abs(e2 - e1);
    e0 = e1;
    f0 = f1;
    e1 = e2;
    f1 = f2;
    model1 = model2;
    converged = std::abs(f1) < opt.defect_tol || de < opt.energy_tol * std::max(1.0, std::abs(e1));
  }
  if (!converged) {
    throw ConvergenceError("fit_orbit: energy secant did not converge (last E = " +
                           std::to_string(e1) + ", defect = " + std::to_string(f1) + ")");
  }

  OrbitSolution out;
  out.m = m.value();
  out.energy = e1;
  out.model = model1;
  out.zeta = eval_model(model1, 0.0).z[kQ2];
  out.fit_residual = fit_cost;
  finalize(out, opt.integrator);
  return out;
}

Eigen::Vector2d quarter_defect(MassRatio m, double zeta, double energy,
                               const IntegratorConfig& cfg) {
  const Vec4 z = flow::flow_2df(Vec4(0.0, zeta, kSqrt8, 0.0), m, energy, kPi / 2, cfg);
  return {z[kQ2], z[kP1]};
}

namespace {

struct NewtonOutcome {
  bool ok = false;
  Eigen::Vector2d x;
  double defect = std::numeric_limits<double>::infinity();
};

NewtonOutcome shoot_newton(MassRatio m, Eigen::Vector2d x, const ShootOptions& opt,
                           std::vector<ShootStep>& history) {
  auto F = [&](const Eigen::Vector2d& p) {
    if (!(p[0] > 0.0 && p[1] < 0.0)) throw DomainError("shooting left zeta > 0, E < 0");
    return quarter_defect(m, p[0], p[1], opt.integrator);
  };
  NewtonOutcome out;
  Eigen::Vector2d f = F(x);
  double norm = f.lpNorm<Eigen::Infinity>();
  history.push_back({x[0], x[1], norm});
  for (int it = 0; it < opt.max_iter; ++it) {
    if (norm < opt.tol) {
      out.ok = true;
      break;
    }
    Eigen::Matrix2d Jf;
    for (int k = 0; k < 2; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
      Eigen::Vector2d xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      Jf.col(k) = (F(xp) - F(xm)) / (2.0 * h);
    }
    const Eigen::Vector2d step = -Jf.partialPivLu().solve(f);
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 12; ++ls, t *= 0.5) {
      const Eigen::Vector2d xt = x + t * step;
      try {
        const Eigen::Vector2d ft = F(xt);
        const double nt = ft.lpNorm<Eigen::Infinity>();
        if (nt < norm || ls == 11) {
          x = xt;
          f = ft;
          norm = nt;
          moved = true;
          break;
        }
      } catch (const Error&) {
      }
    }
    history.push_back({x[0], x[1], norm});
    if (!moved) break;
    // Integration noise floor: the step no longer changes anything.
    if (step.lpNorm<Eigen::Infinity>() < 1e-13 * std::max(1.0, x.lpNorm<Eigen::Infinity>()) &&
        norm < 1e-9) {
      out.ok = true;
      break;
    }
  }
  if (norm < opt.tol) out.ok = true;
  out.x = x;
  out.defect = norm;
  return out;
}

}  // namespace

ShootResult shooting_oracle(MassRatio m, std::optional<Eigen::Vector2d> guess,
                            const ShootOptions& opt) {
  ShootResult result;
  std::vector<Eigen::Vector2d> starts;
  if (guess) {
    starts.push_back(*guess);
  } else {
    // Coarse scan, loose tolerance, best few defects become Newton starts.
    IntegratorConfig loose = opt.integrator;
    loose.abs_tol = loose.rel_tol = 1e-9;
    std::vector<std::pair<double, Eigen::Vector2d>> scored;
    for (int i = 0; i < opt.scan_zeta; ++i) {
      const double z = opt.zeta_lo + (opt.zeta_hi - opt.zeta_lo) * i / std::max(1, opt.scan_zeta - 1);
      for (int j = 0; j < opt.scan_energy; ++j) {
        const double e = opt.energy_lo +
                         (opt.energy_hi - opt.energy_lo) * j / std::max(1, opt.scan_energy - 1);
        try {
          const Eigen::Vector2d f = quarter_defect(m, z, e, loose);
          scored.push_back({f.lpNorm<1>(), Eigen::Vector2d(z, e)});
        } catch (const Error&) {
        }
      }
    }
    std::sort(scored.begin(), scored.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < std::min<std::size_t>(6, scored.size()); ++k) {
      starts.push_back(scored[k].second);
    }
  }
  for (const auto& x0 : starts) {
    NewtonOutcome o;
    try {
      o = shoot_newton(m, x0, opt, result.history);
    } catch (const Error&) {
      continue;
    }
    if (!o.ok) continue;
    OrbitSolution& orb = result.orbit;
    orb.m = m.value();
    orb.zeta = o.x[0];
    orb.energy = o.x[1];
    finalize(orb, opt.integrator);
    // Keep a trig model of the orbit as a seed for the collocation fit.
    const auto samples = flow::sample_2df(orb.initial_state(), m, orb.energy, kTwoPi, 512,
                                          opt.integrator);
    std::vector<Vec4> periodic(samples.begin(), samples.end() - 1);
    orb.model = project_samples(periodic, 40);
    return result;
  }
  std::string msg = "shooting_oracle: no convergence at m = " + std::to_string(m.value());
  if (!result.history.empty()) {
    const auto& h = result.history.back();
    msg += " (last zeta = " + std::to_string(h.zeta) + ", E = " + std::to_string(h.energy) +
           ", defect = " + std::to_string(h.defect) + ")";
  }
  throw ConvergenceError(msg);
}

void finalize(OrbitSolution& orbit, const IntegratorConfig& cfg) {
  const MassRatio m(orbit.m);
  const auto z = flow::sample_2df(orbit.initial_state(), m, orbit.energy, orbit.period, 4, cfg);
  orbit.zeta1 = z[1][kQ1];
  orbit.period_residual = (z[4] - z[0]).lpNorm<Eigen::Infinity>();
}

SymmetryResiduals symmetry_residuals(const OrbitSolution& orbit, int samples,
                                     const IntegratorConfig& cfg) {
  if (samples < 4 || samples % 2 != 0) throw InvalidArgument("symmetry_residuals: samples must be even");
  const MassRatio m(orbit.m);
  const auto z = flow::sample_2df(orbit.initial_state(), m, orbit.energy, orbit.period,
                                  samples, cfg);
  const Mat4 S = model::S2();
  SymmetryResiduals out;
  const int N = samples;
  out.periodicity = (z[N] - z[0]).lpNorm<Eigen::Infinity>();
  for (int k = 0; k <= N; ++k) {
    out.reversal = std::max(out.reversal, (z[k] - S * z[N - k]).lpNorm<Eigen::Infinity>());
    const int j = ((N / 2 - k) % N + N) % N;
    out.half = std::max(out.half, (z[k] + S * z[j]).lpNorm<Eigen::Infinity>());
  }
  return out;
}

ContinuationResult continue_in_mass(const OrbitSolution& seed, double m_end, double dm,
                                    const ContinuationOptions& opt) {
  (void)MassRatio(seed.m);
  (void)MassRatio(m_end);
  if (!(dm > 0.0)) throw InvalidArgument("continue_in_mass: dm must be positive");
  ContinuationResult out;
  out.orbits.push_back(seed);
  if (opt.on_point) opt.on_point(seed);
  const double dir = m_end < seed.m ? -1.0 : 1.0;
  const long steps = static_cast<long>(std::ceil(std::abs(m_end - seed.m) / dm - 1e-9));

  OrbitSolution prev = seed;
  const OrbitSolution* prev2 = nullptr;
  OrbitSolution prev2_store;

  auto solve_at = [&](double m_new) -> OrbitSolution {
    // Linear extrapolation of (zeta, E) from the last two points.
    double zeta = prev.zeta, energy = prev.energy;
    if (prev2 && prev2->m != prev.m) {
      const double t = (m_new - prev.m) / (prev.m - prev2->m);
      zeta += t * (prev.zeta - prev2->zeta);
      energy += t * (prev.energy - prev2->energy);
    }
    const MassRatio mr(m_new);
    if (opt.method == Method::Shoot) {
      return shooting_oracle(mr, Eigen::Vector2d(zeta, energy), opt.shoot).orbit;
    }
    if (prev.model.size() == 0) throw InvalidArgument("continue_in_mass: seed carries no model");
    return fit_orbit(mr, energy, prev.model, opt.fit);
  };

  double m_cur = seed.m;
  for (long k = 1; k <= steps; ++k) {
    const double target = (k == steps) ? m_end : seed.m + dir * k * dm;
    double h = target - m_cur;
    while (true) {
      const double m_try = m_cur + h;
      try {
        OrbitSolution next = solve_at(m_try);
        prev2_store = prev;
        prev2 = &prev2_store;
        prev = next;
        m_cur = m_try;
        if (m_try == target) break;
        h = target - m_cur;
      } catch (const Error& e) {
        h *= 0.5;
        if (std::abs(h) < opt.dm_min) {
          out.complete = false;
          out.failure = std::string("continuation stalled near m = ") + std::to_string(m_cur) +
                        ": " + e.what();
          return out;
        }
      }
    }
    out.orbits.push_back(prev);
    if (opt.on_point) opt.on_point(prev);
  }
  return out;
}

OrbitSolution find_orbit(MassRatio m, const std::optional<OrbitSolution>& seed,
                         const ContinuationOptions& opt, double dm) {
  const double m0 = seed ? seed->m : 1.0;
  std::optional<Eigen::Vector2d> guess;
  if (seed) guess = Eigen::Vector2d(seed->zeta, seed->energy);
  OrbitSolution shot = shooting_oracle(MassRatio(m0), guess, opt.shoot).orbit;
  if (m.value() != m0) {
    ContinuationOptions sc = opt;
    sc.method = Method::Shoot;
    sc.on_point = nullptr;
    const auto run = continue_in_mass(shot, m.value(), dm, sc);
    if (!run.complete) throw ConvergenceError(run.failure);
    shot = run.orbits.back();
  }
  if (opt.method == Method::Shoot) return shot;
  return fit_orbit(m, shot.energy, shot.model, opt.fit);
}

std::vector<OrbitSolution> find_family(std::vector<double> masses, const ContinuationOptions& opt,
                                       double dm) {
  for (double x : masses) (void)MassRatio(x);
  std::vector<std::size_t> order(masses.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return masses[i] > masses[j]; });
  std::vector<OrbitSolution> out(masses.size());
  std::optional<OrbitSolution> seed;
  for (std::size_t i : order) {
    ContinuationOptions sc = opt;
    sc.method = Method::Shoot;
    const OrbitSolution shot = find_orbit(MassRatio(masses[i]), seed, sc, dm);
    seed = shot;
    out[i] = opt.method == Method::Shoot ? shot
                                         : fit_orbit(MassRatio(masses[i]), shot.energy, shot.model, opt.fit);
    if (opt.on_point) opt.on_point(out[i]);
  }
  return out;
}

double coefficient_decay(const TrigModel& model) {
  if (model.size() < 2) return 1.0;
  const std::size_t n = model.size() - 1;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto* v : {&model.a, &model.b, &model.c, &model.d}) {
    const double head = std::abs((*v)[0]);
    if (head == 0.0) continue;
    worst = std::min(worst, head / std::max(std::abs((*v)[n]), 1e-300));
  }
  return worst;
}

}  // namespace rhomb::orbit
