#include "rhomb/rhomb.h"

#include "core/csv.hpp"
#include "core/flow.hpp"
#include "core/model.hpp"
#include "core/orbit.hpp"
#include "core/orbit_store.hpp"
#include "core/poincare.hpp"
#include "core/stability.hpp"
#include "core/verify.hpp"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

struct rhomb_orbit {
  rhomb::OrbitSolution orbit;
};

struct rhomb_orbit_list {
  std::vector<rhomb::OrbitSolution> orbits;
};

struct rhomb_sweep {
  std::vector<rhomb::stability::StabilityReport> rows;
};

struct rhomb_section {
  std::vector<rhomb::poincare::SectionSeries> series;
};

namespace {

using namespace rhomb;
using integrate::IntegratorConfig;

thread_local std::string g_last_error;

rhomb_status fail(rhomb_status st, const std::string& msg) {
  g_last_error = msg;
  return st;
}

// Runs body, translating exceptions into status codes.
template <class F>
rhomb_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return RHOMB_OK;
  } catch (const InvalidArgument& e) {
    return fail(RHOMB_ERR_INVALID_ARGUMENT, e.what());
  } catch (const DomainError& e) {
    return fail(RHOMB_ERR_DOMAIN, e.what());
  } catch (const ConvergenceError& e) {
    return fail(RHOMB_ERR_NO_CONVERGENCE, e.what());
  } catch (const StepUnderflow& e) {
    return fail(RHOMB_ERR_STEP_UNDERFLOW, e.what());
  } catch (const StructuralError& e) {
    return fail(RHOMB_ERR_STRUCTURAL, e.what());
  } catch (const IoError& e) {
    return fail(RHOMB_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(RHOMB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RHOMB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RHOMB_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (!p) throw InvalidArgument(std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

IntegratorConfig to_core(const rhomb_integrator* c) {
  IntegratorConfig cfg;
  if (!c) return cfg;
  cfg.abs_tol = c->abs_tol;
  cfg.rel_tol = c->rel_tol;
  cfg.h_init = c->h_init;
  cfg.h_min = c->h_min;
  cfg.h_max = c->h_max;
  cfg.guard = c->guard;
  cfg.max_steps = static_cast<long>(c->max_steps);
  cfg.validate();
  return cfg;
}

orbit::ContinuationOptions to_core(const rhomb_find_options* o) {
  rhomb_find_options d;
  rhomb_find_options_defaults(&d);
  if (!o) o = &d;
  if (o->method != RHOMB_METHOD_FIT && o->method != RHOMB_METHOD_SHOOT) {
    throw InvalidArgument("unknown orbit method");
  }
  if (o->harmonics < 0) throw InvalidArgument("harmonics must be >= 0");
  if (!(o->dm > 0.0) || !(o->dm_min > 0.0)) throw InvalidArgument("dm and dm_min must be positive");
  if (!(o->shoot_tol > 0.0)) throw InvalidArgument("shoot_tol must be positive");
  orbit::ContinuationOptions c;
  c.method = o->method == RHOMB_METHOD_FIT ? orbit::Method::Fit : orbit::Method::Shoot;
  c.dm_min = o->dm_min;
  c.fit.harmonics = o->harmonics;
  c.shoot.tol = o->shoot_tol;
  c.shoot.integrator = to_core(&o->integrator);
  return c;
}

stability::AnalyzeOptions to_core(const rhomb_analyze_options* o) {
  rhomb_analyze_options d;
  rhomb_analyze_options_defaults(&d);
  if (!o) o = &d;
  stability::AnalyzeOptions a;
  a.integrator = to_core(&o->integrator);
  a.classify.tol_coincidence = o->tol_coincidence;
  a.classify.boundary_band = o->boundary_band;
  a.structural_tol = o->structural_tol;
  a.check_half_period = o->check_half_period != 0;
  if (!(a.classify.tol_coincidence >= 0.0 && a.classify.boundary_band >= 0.0)) {
    throw InvalidArgument("classification tolerances must be >= 0");
  }
  return a;
}

rhomb_verdict to_c(stability::Verdict v) {
  switch (v) {
    case stability::Verdict::LinearlyStable: return RHOMB_LINEARLY_STABLE;
    case stability::Verdict::SpectrallyStableOnly: return RHOMB_SPECTRALLY_STABLE_ONLY;
    case stability::Verdict::Unstable: return RHOMB_UNSTABLE;
    case stability::Verdict::Indeterminate: return RHOMB_INDETERMINATE;
  }
  return RHOMB_INDETERMINATE;
}

rhomb_orbit_info info_of(const OrbitSolution& o) {
  rhomb_orbit_info i{};
  i.m = o.m;
  i.zeta = o.zeta;
  i.energy = o.energy;
  i.period = o.period;
  i.period_residual = o.period_residual;
  i.zeta1 = o.zeta1;
  i.fit_residual = o.fit_residual;
  i.harmonics = o.model.n;
  return i;
}

void fill(const stability::StabilityReport& r, rhomb_stability_info* out) {
  *out = rhomb_stability_info{};
  out->m = r.m;
  out->zeta = r.zeta;
  out->energy = r.energy;
  if (r.eigenvalues.empty()) {
    out->failed = 1;
    out->structural_ok = 0;
    out->planar = out->collinear = RHOMB_INDETERMINATE;
    return;
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out->K[4 * i + j] = r.K.full(i, j);
    out->eig_re[i] = r.eigenvalues[i].real();
    out->eig_im[i] = r.eigenvalues[i].imag();
  }
  out->a = r.K.a;
  out->b = r.K.b;
  out->c = r.K.c;
  out->d = r.K.d;
  out->e = r.K.e;
  out->corner14 = r.K.corner14;
  out->lambda_block = r.K.lambda_block();
  out->max_imag = r.max_imag;
  out->planar = to_c(r.verdict.planar);
  out->collinear = to_c(r.verdict.collinear);
  out->symplectic_defect = r.symplectic_defect;
  out->pattern_defect = r.pattern_defect;
  out->k_first_column_defect = r.K.first_column_defect;
  out->k_pattern_defect = r.K.pattern_defect;
  out->k_b_defect = r.K.b_relation_defect;
  out->k_c_defect = r.K.c_relation_defect;
  out->w_product_defect = r.w_product_defect;
  out->w_block_defect = r.w_block_defect;
  out->w_trivial_defect = r.w_trivial_defect;
  out->structural_ok = r.structural_ok ? 1 : 0;
}

rhomb_orbit* wrap(OrbitSolution o) { return new rhomb_orbit{std::move(o)}; }

}  // namespace

extern "C" {

const char* rhomb_version(void) { return "1.0.0"; }

const char* rhomb_status_string(rhomb_status s) {
  switch (s) {
    case RHOMB_OK: return "ok";
    case RHOMB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RHOMB_ERR_DOMAIN: return "domain error";
    case RHOMB_ERR_NO_CONVERGENCE: return "no convergence";
    case RHOMB_ERR_STEP_UNDERFLOW: return "step underflow";
    case RHOMB_ERR_STRUCTURAL: return "structural violation";
    case RHOMB_ERR_IO: return "i/o error";
    case RHOMB_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* rhomb_last_error(void) { return g_last_error.c_str(); }

void rhomb_string_free(char* s) { std::free(s); }

void rhomb_integrator_defaults(rhomb_integrator* c) {
  if (!c) return;
  const IntegratorConfig d;
  c->abs_tol = d.abs_tol;
  c->rel_tol = d.rel_tol;
  c->h_init = d.h_init;
  c->h_min = d.h_min;
  c->h_max = d.h_max;
  c->guard = d.guard;
  c->max_steps = d.max_steps;
}

void rhomb_find_options_defaults(rhomb_find_options* o) {
  if (!o) return;
  o->method = RHOMB_METHOD_FIT;
  o->harmonics = 0;
  o->dm = 0.05;
  o->dm_min = orbit::ContinuationOptions{}.dm_min;
  o->shoot_tol = orbit::ShootOptions{}.tol;
  rhomb_integrator_defaults(&o->integrator);
}

rhomb_status rhomb_find_orbit(double m, const rhomb_orbit* seed, const rhomb_find_options* opt,
                              rhomb_orbit** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    const MassRatio mr(m);
    const auto c = to_core(opt);
    const double dm = opt ? opt->dm : 0.05;
    std::optional<OrbitSolution> s;
    if (seed) s = seed->orbit;
    *out = wrap(orbit::find_orbit(mr, s, c, dm));
  });
}

rhomb_status rhomb_orbit_info_get(const rhomb_orbit* orbit, rhomb_orbit_info* out) {
  return guarded([&] {
    require(orbit, "orbit");
    require(out, "out");
    *out = info_of(orbit->orbit);
  });
}

rhomb_status rhomb_orbit_model_state(const rhomb_orbit* o, double s, double out[4]) {
  return guarded([&] {
    require(o, "orbit");
    require(out, "out");
    if (o->orbit.model.size() == 0) throw InvalidArgument("orbit carries no model");
    const Vec4 z = orbit::eval_model(o->orbit.model, s).z;
    for (int i = 0; i < 4; ++i) out[i] = z[i];
  });
}

rhomb_status rhomb_orbit_initial_state(const rhomb_orbit* o, double out[4]) {
  return guarded([&] {
    require(o, "orbit");
    require(out, "out");
    const Vec4 z = o->orbit.initial_state();
    for (int i = 0; i < 4; ++i) out[i] = z[i];
  });
}

rhomb_status rhomb_orbit_rescale(const rhomb_orbit* o, double eps, rhomb_orbit** out) {
  return guarded([&] {
    require(o, "orbit");
    require(out, "out");
    *out = nullptr;
    *out = wrap(model::rescale_solution(o->orbit, eps));
  });
}

rhomb_status rhomb_orbit_symmetry(const rhomb_orbit* o, double out[3]) {
  return guarded([&] {
    require(o, "orbit");
    require(out, "out");
    const auto r = orbit::symmetry_residuals(o->orbit);
    out[0] = r.periodicity;
    out[1] = r.reversal;
    out[2] = r.half;
  });
}

rhomb_orbit* rhomb_orbit_clone(const rhomb_orbit* o) {
  if (!o) return nullptr;
  try {
    return new rhomb_orbit(*o);
  } catch (...) {
    return nullptr;
  }
}

void rhomb_orbit_free(rhomb_orbit* o) { delete o; }

rhomb_status rhomb_continue(const rhomb_orbit* seed, double m_end, double dm,
                            const rhomb_find_options* opt, rhomb_orbit_callback cb, void* user,
                            rhomb_orbit_list** out) {
  auto* list = new (std::nothrow) rhomb_orbit_list;
  if (!list) return fail(RHOMB_ERR_INTERNAL, "out of memory");
  std::string failure;
  const rhomb_status st = guarded([&] {
    require(seed, "seed");
    require(out, "out");
    auto c = to_core(opt);
    if (cb) {
      c.on_point = [cb, user](const OrbitSolution& o) {
        const rhomb_orbit_info i = info_of(o);
        cb(&i, user);
      };
    }
    auto run = orbit::continue_in_mass(seed->orbit, m_end, dm, c);
    list->orbits = std::move(run.orbits);
    if (!run.complete) failure = run.failure;
  });
  if (st != RHOMB_OK || !out) {
    delete list;
    if (out) *out = nullptr;
    return st;
  }
  *out = list;
  if (!failure.empty()) return fail(RHOMB_ERR_NO_CONVERGENCE, failure);
  return RHOMB_OK;
}

size_t rhomb_orbit_list_size(const rhomb_orbit_list* l) { return l ? l->orbits.size() : 0; }

rhomb_orbit* rhomb_orbit_list_get(const rhomb_orbit_list* l, size_t i) {
  if (!l || i >= l->orbits.size()) return nullptr;
  try {
    return wrap(l->orbits[i]);
  } catch (...) {
    return nullptr;
  }
}

rhomb_status rhomb_orbit_list_csv(const rhomb_orbit_list* l, char** out) {
  return guarded([&] {
    require(l, "list");
    require(out, "out");
    std::ostringstream os;
    csv::write_orbits(os, l->orbits);
    *out = dup_string(os.str());
  });
}

void rhomb_orbit_list_free(rhomb_orbit_list* l) { delete l; }

rhomb_status rhomb_store_append(const char* path, const rhomb_orbit* o) {
  return guarded([&] {
    require(path, "path");
    require(o, "orbit");
    orbit_store::append(path, o->orbit);
  });
}

rhomb_status rhomb_store_load(const char* path, rhomb_orbit_list** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto list = std::make_unique<rhomb_orbit_list>();
    list->orbits = orbit_store::load(path);
    *out = list.release();
  });
}

rhomb_status rhomb_store_nearest(const char* path, double m, rhomb_orbit** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    (void)MassRatio(m);
    auto o = orbit_store::nearest(path, m);
    if (o) *out = wrap(std::move(*o));
  });
}

const char* rhomb_verdict_string(rhomb_verdict v) {
  switch (v) {
    case RHOMB_LINEARLY_STABLE: return stability::to_string(stability::Verdict::LinearlyStable);
    case RHOMB_SPECTRALLY_STABLE_ONLY:
      return stability::to_string(stability::Verdict::SpectrallyStableOnly);
    case RHOMB_UNSTABLE: return stability::to_string(stability::Verdict::Unstable);
    case RHOMB_INDETERMINATE: return stability::to_string(stability::Verdict::Indeterminate);
  }
  return "unknown";
}

void rhomb_analyze_options_defaults(rhomb_analyze_options* o) {
  if (!o) return;
  const stability::AnalyzeOptions d;
  rhomb_integrator_defaults(&o->integrator);
  o->tol_coincidence = d.classify.tol_coincidence;
  o->boundary_band = d.classify.boundary_band;
  o->structural_tol = d.structural_tol;
  o->check_half_period = d.check_half_period ? 1 : 0;
}

rhomb_status rhomb_analyze(const rhomb_orbit* o, const rhomb_analyze_options* opt,
                           rhomb_stability_info* out) {
  return guarded([&] {
    require(o, "orbit");
    require(out, "out");
    const auto rep = stability::analyze(o->orbit, to_core(opt));
    fill(rep, out);
    if (!rep.structural_ok) throw StructuralError(rep.error);
  });
}

rhomb_status rhomb_sweep_run(const rhomb_orbit_list* l, const rhomb_analyze_options* opt,
                             rhomb_sweep** out) {
  return guarded([&] {
    require(l, "orbits");
    require(out, "out");
    *out = nullptr;
    auto sw = std::make_unique<rhomb_sweep>();
    sw->rows = stability::sweep(l->orbits, to_core(opt));
    *out = sw.release();
  });
}

size_t rhomb_sweep_size(const rhomb_sweep* sw) { return sw ? sw->rows.size() : 0; }

rhomb_status rhomb_sweep_row(const rhomb_sweep* sw, size_t i, rhomb_stability_info* out) {
  return guarded([&] {
    require(sw, "sweep");
    require(out, "out");
    if (i >= sw->rows.size()) throw InvalidArgument("sweep row out of range");
    fill(sw->rows[i], out);
  });
}

rhomb_status rhomb_sweep_csv(const rhomb_sweep* sw, char** out) {
  return guarded([&] {
    require(sw, "sweep");
    require(out, "out");
    std::ostringstream os;
    csv::write_stability(os, sw->rows);
    *out = dup_string(os.str());
  });
}

rhomb_status rhomb_sweep_window(const rhomb_sweep* sw, int* has_crossing, double crossing[2],
                                int* has_stable, double stable[2]) {
  return guarded([&] {
    require(sw, "sweep");
    const auto w = stability::summarize(sw->rows);
    if (has_crossing) *has_crossing = w.zero_crossing ? 1 : 0;
    if (crossing && w.zero_crossing) {
      crossing[0] = w.zero_crossing->first;
      crossing[1] = w.zero_crossing->second;
    }
    if (has_stable) *has_stable = w.stable_range ? 1 : 0;
    if (stable && w.stable_range) {
      stable[0] = w.stable_range->first;
      stable[1] = w.stable_range->second;
    }
  });
}

void rhomb_sweep_free(rhomb_sweep* sw) { delete sw; }

rhomb_status rhomb_monodromy_2df(const rhomb_orbit* o, const rhomb_integrator* cfg,
                                 rhomb_monodromy_info* out) {
  return guarded([&] {
    require(o, "orbit");
    require(out, "out");
    const auto r = stability::monodromy_oracle_2df(o->orbit, to_core(cfg));
    *out = rhomb_monodromy_info{};
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) out->X[4 * i + j] = r.X(i, j);
      out->mult_re[i] = r.multipliers[i].real();
      out->mult_im[i] = r.multipliers[i].imag();
    }
    out->determinant = r.determinant;
    out->trivial_defect = r.trivial_defect;
    out->stable = r.stable ? 1 : 0;
  });
}

rhomb_status rhomb_alpha(double m, double* alpha, double* rmax) {
  return guarded([&] {
    const poincare::Section s(m);
    if (alpha) *alpha = s.alpha;
    if (rmax) *rmax = s.rmax;
  });
}

void rhomb_section_config_defaults(rhomb_section_config* c) {
  if (!c) return;
  const poincare::SectionConfig d;
  c->m = d.m;
  c->r_count = d.r_count;
  c->r_lo = d.r_lo;
  c->r_hi = d.r_hi;
  c->theta_count = d.theta_count;
  c->theta_lo = d.theta_lo;
  c->theta_hi = d.theta_hi;
  c->max_crossings = d.max_crossings;
  c->horizon = d.horizon;
  c->escape_ratio = d.escape_ratio;
  rhomb_integrator_defaults(&c->integrator);
}

rhomb_status rhomb_section_grid(const rhomb_section_config* c, rhomb_section** out) {
  return guarded([&] {
    require(c, "config");
    require(out, "out");
    *out = nullptr;
    poincare::SectionConfig cfg;
    cfg.m = c->m;
    cfg.r_count = c->r_count;
    cfg.r_lo = c->r_lo;
    cfg.r_hi = c->r_hi;
    cfg.theta_count = c->theta_count;
    cfg.theta_lo = c->theta_lo;
    cfg.theta_hi = c->theta_hi;
    cfg.max_crossings = c->max_crossings;
    cfg.horizon = c->horizon;
    cfg.escape_ratio = c->escape_ratio;
    cfg.integrator = to_core(&c->integrator);
    auto sec = std::make_unique<rhomb_section>();
    sec->series = poincare::grid_sweep(cfg);
    *out = sec.release();
  });
}

size_t rhomb_section_size(const rhomb_section* s) { return s ? s->series.size() : 0; }

rhomb_status rhomb_section_seed(const rhomb_section* s, size_t i, rhomb_seed_summary* out) {
  return guarded([&] {
    require(s, "section");
    require(out, "out");
    if (i >= s->series.size()) throw InvalidArgument("seed index out of range");
    const auto& x = s->series[i];
    out->seed_r = x.seed.r;
    out->seed_theta = x.seed.theta;
    out->feasible = x.feasible ? 1 : 0;
    out->crossings_found = x.crossings_found();
    out->escaped = x.escaped ? 1 : 0;
    out->r_extent = x.r_extent();
  });
}

rhomb_status rhomb_section_csv(const rhomb_section* s, char** out) {
  return guarded([&] {
    require(s, "section");
    require(out, "out");
    std::ostringstream os;
    csv::write_sections(os, s->series);
    *out = dup_string(os.str());
  });
}

rhomb_status rhomb_section_summary_csv(const rhomb_section* s, char** out) {
  return guarded([&] {
    require(s, "section");
    require(out, "out");
    std::ostringstream os;
    csv::write_section_summary(os, s->series);
    *out = dup_string(os.str());
  });
}

void rhomb_section_free(rhomb_section* s) { delete s; }

rhomb_status rhomb_periodic_trace(const rhomb_orbit* o, int max_returns, rhomb_trace_info* out) {
  return guarded([&] {
    require(o, "orbit");
    require(out, "out");
    if (max_returns < 1) throw InvalidArgument("max_returns must be >= 1");
    const auto t = poincare::periodic_trace(o->orbit, max_returns);
    out->r = t.point.r;
    out->theta = t.point.theta;
    out->return_index = t.return_index;
    out->return_distance = t.return_distance;
  });
}

rhomb_status rhomb_homographic_drift(double m, double r, double s_end, double* out) {
  return guarded([&] {
    require(out, "out");
    if (!(s_end > 0.0)) throw InvalidArgument("s_end must be positive");
    *out = poincare::homographic_drift(m, r, s_end);
  });
}

rhomb_status rhomb_simulate(const double z0[4], double m, double energy, double s_end,
                            const rhomb_integrator* cfg, char** csv_out, int* escaped) {
  return guarded([&] {
    require(z0, "z0");
    require(csv_out, "csv");
    *csv_out = nullptr;
    if (!(s_end > 0.0)) throw InvalidArgument("s_end must be positive");
    const MassRatio mr(m);
    const Vec4 z(z0[0], z0[1], z0[2], z0[3]);
    const auto tr = flow::trajectory_2df(z, mr, energy, s_end, to_core(cfg));
    std::ostringstream os;
    csv::write_trajectory(os, tr, m, energy);
    *csv_out = dup_string(os.str());
    if (escaped) *escaped = tr.escaped ? 1 : 0;
  });
}

rhomb_status rhomb_simulate_orbit(const rhomb_orbit* o, double s_end, const rhomb_integrator* cfg,
                                  char** csv_out, int* escaped) {
  if (!o) return fail(RHOMB_ERR_INVALID_ARGUMENT, "orbit must not be NULL");
  const Vec4 z = o->orbit.initial_state();
  const double z0[4] = {z[0], z[1], z[2], z[3]};
  return rhomb_simulate(z0, o->orbit.m, o->orbit.energy, s_end, cfg, csv_out, escaped);
}

void rhomb_verify_options_defaults(rhomb_verify_options* o) {
  if (!o) return;
  o->masses = nullptr;
  o->mass_count = 0;
  o->break_symmetry = 0;
  o->fd_states = verify::VerifyOptions{}.fd_states;
}

rhomb_status rhomb_verify(const rhomb_verify_options* o, char** json, int* all_passed) {
  return guarded([&] {
    require(json, "json");
    *json = nullptr;
    verify::VerifyOptions v;
    if (o) {
      if (o->masses && o->mass_count > 0) v.masses.assign(o->masses, o->masses + o->mass_count);
      v.break_symmetry = o->break_symmetry != 0;
      if (o->fd_states < 1) throw InvalidArgument("fd_states must be >= 1");
      v.fd_states = o->fd_states;
    }
    const auto rep = verify::run(v);
    *json = dup_string(verify::to_json(rep));
    if (all_passed) *all_passed = rep.all_passed() ? 1 : 0;
  });
}

}  // extern "C"
