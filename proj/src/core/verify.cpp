#include "core/verify.hpp"

#include "core/dynamics.hpp"
#include "core/flow.hpp"
#include "core/model.hpp"
#include "core/orbit.hpp"
#include "core/stability.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace rhomb::verify {

namespace {

double max_abs(const Eigen::Ref<const Eigen::MatrixXd>& M) { return M.cwiseAbs().maxCoeff(); }

template <class Vec, class Gamma, class Field>
double fd_field_error(const Vec& z, const Eigen::Matrix<double, Vec::RowsAtCompileTime,
                                                       Vec::RowsAtCompileTime>& J,
                      Gamma gamma, Field field) {
  Vec g;
  for (int i = 0; i < z.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(z[i]));
    Vec zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    g[i] = (gamma(zp) - gamma(zm)) / (2.0 * h);
  }
  const Vec exact = field(z);
  return (J * g - exact).template lpNorm<Eigen::Infinity>() /
         std::max(1.0, exact.template lpNorm<Eigen::Infinity>());
}

}  // namespace

bool VerifyReport::all_passed() const {
  return std::all_of(items.begin(), items.end(), [](const auto& c) { return c.passed; });
}

VerifyReport run(const VerifyOptions& opt) {
  VerifyReport rep;
  auto add = [&](std::string name, double m, double measured, double threshold) {
    rep.items.push_back({std::move(name), m, measured, threshold, measured <= threshold});
  };

  const Mat4 S2 = model::S2(), J2 = model::J2();
  const Mat8 S4 = model::S4(), J4 = model::J4(), Y0 = model::Y0();
  add("S2 involution", 0, max_abs(S2 * S2 - Mat4::Identity()), 1e-14);
  add("S4 involution", 0, max_abs(S4 * S4 - Mat8::Identity()), 1e-14);
  add("S4 J anticommutes", 0, max_abs(S4 * J4 + J4 * S4), 1e-14);
  add("Y0 orthogonal", 0, max_abs(Y0.transpose() * Y0 - Mat8::Identity()), 1e-14);
  add("Y0 symplectic", 0, max_abs(Y0.transpose() * J4 * Y0 - J4), 1e-14);
  add("Y0 conjugates S to -Lambda", 0, max_abs(-Y0.transpose() * S4 * Y0 - model::Lambda()), 1e-14);

  std::mt19937_64 rng(opt.rng_seed);
  std::uniform_real_distribution<double> uq(0.2, 2.0), up(-3.0, 3.0), um(0.05, 1.0),
      ue(-2.0, -0.1), sign(-1.0, 1.0);
  double err2 = 0.0, err4 = 0.0;
  for (int k = 0; k < opt.fd_states; ++k) {
    const MassRatio m(um(rng));
    const double E = ue(rng);
    Vec4 z2(uq(rng), uq(rng), up(rng), up(rng));
    Vec8 z4;
    for (int i = 0; i < 4; ++i) z4[i] = uq(rng) * (sign(rng) < 0 ? -1.0 : 1.0);
    for (int i = 4; i < 8; ++i) z4[i] = up(rng);
    err2 = std::max(err2, fd_field_error(
                              z2, J2, [&](const Vec4& z) { return model::gamma_2df(z, m, E); },
                              [&](const Vec4& z) { return dynamics::vf_2df(z, m, E); }));
    err4 = std::max(err4, fd_field_error(
                              z4, J4, [&](const Vec8& z) { return model::gamma_4df(z, m, E); },
                              [&](const Vec8& z) { return dynamics::vf_4df(z, m, E); }));
  }
  add("2DF field vs J grad Gamma (finite differences)", 0, err2, 1e-6);
  add("4DF field vs J grad Gamma (finite differences)", 0, err4, 1e-6);

  orbit::ContinuationOptions shoot_opt;
  shoot_opt.method = orbit::Method::Shoot;
  const auto shot = orbit::find_family(opt.masses, shoot_opt);
  for (std::size_t i = 0; i < opt.masses.size(); ++i) {
    const double mv = opt.masses[i];
    const MassRatio m(mv);
    const OrbitSolution& s = shot[i];
    const OrbitSolution f = orbit::fit_orbit(m, s.energy, s.model);
    add("shoot/fit agreement", mv,
        std::max(std::abs(s.zeta - f.zeta), std::abs(s.energy - f.energy)), 1e-6);
    add("periodicity", mv, f.period_residual, 1e-8);

    const auto tr = flow::trajectory_2df(f.initial_state(), m, f.energy, f.period);
    double drift = 0.0;
    for (const auto& smp : tr.samples) {
      drift = std::max(drift, std::abs(model::gamma_2df(smp.y, m, f.energy)));
    }
    add("Gamma conservation over a period", mv, drift, 1e-9);

    OrbitSolution probe = f;
    if (opt.break_symmetry) probe.zeta += opt.symmetry_perturbation;
    const auto sym = orbit::symmetry_residuals(probe);
    add("time-reversal symmetry", mv, std::max(sym.reversal, sym.periodicity), 1e-6);
    add("half-period symmetry", mv, sym.half, 1e-6);

    const auto st = stability::analyze(f);
    add("symplecticity of Y(T/4)", mv, st.symplectic_defect, 1e-9);
    add("pattern preservation of Y(T/4)", mv, st.pattern_defect, 1e-8);
    add("K first column", mv, st.K.first_column_defect, 1e-7);
    add("K pattern", mv, st.K.pattern_defect, 1e-8);
    add("K b,c relations", mv, std::max(st.K.b_relation_defect, st.K.c_relation_defect), 1e-7);
    add("(W + W^-1)/2 block diagonal", mv, st.w_block_defect, 1e-6);
    add("K eigenvalues real", mv, st.max_imag, 1e-9);
  }
  return rep;
}

std::string to_json(const VerifyReport& report) {
  nlohmann::json j;
  j["format"] = "rhomb-verify-1";
  j["passed"] = report.all_passed();
  auto& items = j["items"] = nlohmann::json::array();
  for (const auto& c : report.items) {
    items.push_back({{"name", c.name},
                     {"m", c.m},
                     {"measured", c.measured},
                     {"threshold", c.threshold},
                     {"passed", c.passed}});
  }
  return j.dump(2);
}

VerifyReport from_json(const std::string& text) {
  VerifyReport rep;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& it : j.at("items")) {
      rep.items.push_back({it.at("name").get<std::string>(), it.at("m").get<double>(),
                           it.at("measured").get<double>(), it.at("threshold").get<double>(),
                           it.at("passed").get<bool>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("verify report: ") + e.what());
  }
  return rep;
}

}  // namespace rhomb::verify
