#ifndef RHOMB_RHOMB_H
#define RHOMB_RHOMB_H

/* C interface to the rhomboidal four-body orbit library.
 *
 * Every function returns a status code; on failure a message is available
 * from rhomb_last_error() (thread local, valid until the next call on the
 * same thread). Handles are opaque and released with their _free function.
 * Strings handed out by the library are released with rhomb_string_free. */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(RHOMB_BUILDING_LIBRARY)
#    define RHOMB_API __declspec(dllexport)
#  else
#    define RHOMB_API __declspec(dllimport)
#  endif
#else
#  define RHOMB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rhomb_status {
  RHOMB_OK = 0,
  RHOMB_ERR_INVALID_ARGUMENT = 1,
  RHOMB_ERR_DOMAIN = 2,
  RHOMB_ERR_NO_CONVERGENCE = 3,
  RHOMB_ERR_STEP_UNDERFLOW = 4,
  RHOMB_ERR_STRUCTURAL = 5,
  RHOMB_ERR_IO = 6,
  RHOMB_ERR_INTERNAL = 7
} rhomb_status;

RHOMB_API const char* rhomb_version(void);
RHOMB_API const char* rhomb_status_string(rhomb_status status);
RHOMB_API const char* rhomb_last_error(void);
RHOMB_API void rhomb_string_free(char* s);

/* ---- integrator ---- */

typedef struct rhomb_integrator {
  double abs_tol, rel_tol;
  double h_init, h_min, h_max;
  double guard; /* escape when any coordinate exceeds this in absolute value */
  long long max_steps;
} rhomb_integrator;

RHOMB_API void rhomb_integrator_defaults(rhomb_integrator* cfg);

/* ---- orbits ---- */

typedef struct rhomb_orbit rhomb_orbit;
typedef struct rhomb_orbit_list rhomb_orbit_list;

typedef enum rhomb_method { RHOMB_METHOD_FIT = 0, RHOMB_METHOD_SHOOT = 1 } rhomb_method;

typedef struct rhomb_find_options {
  rhomb_method method;
  int harmonics;     /* 0: automatic */
  double dm;         /* largest continuation step used to reach m */
  double dm_min;     /* step halving stops below this */
  double shoot_tol;
  rhomb_integrator integrator; /* shooting and diagnostics */
} rhomb_find_options;

RHOMB_API void rhomb_find_options_defaults(rhomb_find_options* opt);

typedef struct rhomb_orbit_info {
  double m, zeta, energy, period;
  double period_residual;
  double zeta1;
  double fit_residual;
  int harmonics;
} rhomb_orbit_info;

/* seed may be NULL (bootstrap at m = 1). */
RHOMB_API rhomb_status rhomb_find_orbit(double m, const rhomb_orbit* seed,
                                        const rhomb_find_options* opt, rhomb_orbit** out);
RHOMB_API rhomb_status rhomb_orbit_info_get(const rhomb_orbit* orbit, rhomb_orbit_info* out);
/* Model state (Q1, Q2, P1, P2) at regularized time s. */
RHOMB_API rhomb_status rhomb_orbit_model_state(const rhomb_orbit* orbit, double s, double out[4]);
RHOMB_API rhomb_status rhomb_orbit_initial_state(const rhomb_orbit* orbit, double out[4]);
/* Coordinates and momenta scaled by eps, energy by 1/eps^2, period by 1/eps. */
RHOMB_API rhomb_status rhomb_orbit_rescale(const rhomb_orbit* orbit, double eps, rhomb_orbit** out);
/* periodicity, reversal and half-period residuals */
RHOMB_API rhomb_status rhomb_orbit_symmetry(const rhomb_orbit* orbit, double out[3]);
RHOMB_API rhomb_orbit* rhomb_orbit_clone(const rhomb_orbit* orbit);
RHOMB_API void rhomb_orbit_free(rhomb_orbit* orbit);

typedef void (*rhomb_orbit_callback)(const rhomb_orbit_info* info, void* user);

/* Continuation from seed to m_end. On failure *out still holds the points
 * reached so far. */
RHOMB_API rhomb_status rhomb_continue(const rhomb_orbit* seed, double m_end, double dm,
                                      const rhomb_find_options* opt, rhomb_orbit_callback cb,
                                      void* user, rhomb_orbit_list** out);
RHOMB_API size_t rhomb_orbit_list_size(const rhomb_orbit_list* list);
/* Returns a new handle (free it) or NULL when out of range. */
RHOMB_API rhomb_orbit* rhomb_orbit_list_get(const rhomb_orbit_list* list, size_t i);
/* m,zeta,E,period_residual,zeta1,harmonics */
RHOMB_API rhomb_status rhomb_orbit_list_csv(const rhomb_orbit_list* list, char** out);
RHOMB_API void rhomb_orbit_list_free(rhomb_orbit_list* list);

/* ---- orbit store (append-only text file, newest record per m wins) ---- */

RHOMB_API rhomb_status rhomb_store_append(const char* path, const rhomb_orbit* orbit);
RHOMB_API rhomb_status rhomb_store_load(const char* path, rhomb_orbit_list** out);
/* *out is NULL when the store is empty or missing. */
RHOMB_API rhomb_status rhomb_store_nearest(const char* path, double m, rhomb_orbit** out);

/* ---- stability ---- */

typedef enum rhomb_verdict {
  RHOMB_LINEARLY_STABLE = 0,
  RHOMB_SPECTRALLY_STABLE_ONLY = 1,
  RHOMB_UNSTABLE = 2,
  RHOMB_INDETERMINATE = 3
} rhomb_verdict;

RHOMB_API const char* rhomb_verdict_string(rhomb_verdict v);

typedef struct rhomb_analyze_options {
  rhomb_integrator integrator;
  double tol_coincidence;
  double boundary_band;
  double structural_tol;
  int check_half_period;
} rhomb_analyze_options;

RHOMB_API void rhomb_analyze_options_defaults(rhomb_analyze_options* opt);

typedef struct rhomb_stability_info {
  double m, zeta, energy;
  double K[16]; /* row major */
  double a, b, c, d, e, corner14, lambda_block;
  double eig_re[4], eig_im[4];
  double max_imag;
  rhomb_verdict planar, collinear;
  double symplectic_defect, pattern_defect;
  double k_first_column_defect, k_pattern_defect, k_b_defect, k_c_defect;
  double w_product_defect, w_block_defect, w_trivial_defect;
  int structural_ok;
  int failed; /* the row could not be computed; only m, zeta, energy are set */
} rhomb_stability_info;

RHOMB_API rhomb_status rhomb_analyze(const rhomb_orbit* orbit, const rhomb_analyze_options* opt,
                                     rhomb_stability_info* out);

typedef struct rhomb_sweep rhomb_sweep;

RHOMB_API rhomb_status rhomb_sweep_run(const rhomb_orbit_list* orbits,
                                       const rhomb_analyze_options* opt, rhomb_sweep** out);
RHOMB_API size_t rhomb_sweep_size(const rhomb_sweep* sw);
RHOMB_API rhomb_status rhomb_sweep_row(const rhomb_sweep* sw, size_t i, rhomb_stability_info* out);
RHOMB_API rhomb_status rhomb_sweep_csv(const rhomb_sweep* sw, char** out);
/* Flags are 0 when the window or the crossing was not found. */
RHOMB_API rhomb_status rhomb_sweep_window(const rhomb_sweep* sw, int* has_crossing,
                                          double crossing[2], int* has_stable,
                                          double stable[2]);
RHOMB_API void rhomb_sweep_free(rhomb_sweep* sw);

typedef struct rhomb_monodromy_info {
  double X[16];
  double mult_re[4], mult_im[4];
  double determinant;
  double trivial_defect;
  int stable;
} rhomb_monodromy_info;

RHOMB_API rhomb_status rhomb_monodromy_2df(const rhomb_orbit* orbit, const rhomb_integrator* cfg,
                                           rhomb_monodromy_info* out);

/* ---- Poincare section ---- */

RHOMB_API rhomb_status rhomb_alpha(double m, double* alpha, double* r_max);

typedef struct rhomb_section_config {
  double m;
  int r_count;
  double r_lo, r_hi;
  int theta_count;
  double theta_lo, theta_hi;
  int max_crossings;
  double horizon;
  double escape_ratio;
  rhomb_integrator integrator;
} rhomb_section_config;

RHOMB_API void rhomb_section_config_defaults(rhomb_section_config* cfg);

typedef struct rhomb_section rhomb_section;

typedef struct rhomb_seed_summary {
  double seed_r, seed_theta;
  int feasible;
  int crossings_found;
  int escaped;
  double r_extent;
} rhomb_seed_summary;

RHOMB_API rhomb_status rhomb_section_grid(const rhomb_section_config* cfg, rhomb_section** out);
RHOMB_API size_t rhomb_section_size(const rhomb_section* sec);
RHOMB_API rhomb_status rhomb_section_seed(const rhomb_section* sec, size_t i,
                                          rhomb_seed_summary* out);
/* seed_r,seed_theta,crossing_index,r,theta,escaped_flag */
RHOMB_API rhomb_status rhomb_section_csv(const rhomb_section* sec, char** out);
/* seed_r,seed_theta,feasible,crossings_found,escaped,r_extent */
RHOMB_API rhomb_status rhomb_section_summary_csv(const rhomb_section* sec, char** out);
RHOMB_API void rhomb_section_free(rhomb_section* sec);

typedef struct rhomb_trace_info {
  double r, theta;
  int return_index;
  double return_distance;
} rhomb_trace_info;

RHOMB_API rhomb_status rhomb_periodic_trace(const rhomb_orbit* orbit, int max_returns,
                                            rhomb_trace_info* out);
RHOMB_API rhomb_status rhomb_homographic_drift(double m, double r, double s_end, double* out);

/* ---- raw trajectories and the invariant battery ---- */

/* CSV s,Q1,Q2,P1,P2,gamma of the 2DF flow. *escaped is optional. */
RHOMB_API rhomb_status rhomb_simulate(const double z0[4], double m, double energy, double s_end,
                                      const rhomb_integrator* cfg, char** csv, int* escaped);
/* Same, from the reference state of an orbit. */
RHOMB_API rhomb_status rhomb_simulate_orbit(const rhomb_orbit* orbit, double s_end,
                                            const rhomb_integrator* cfg, char** csv,
                                            int* escaped);

typedef struct rhomb_verify_options {
  const double* masses; /* NULL: 0.25, 0.5, 1.0 */
  size_t mass_count;
  int break_symmetry;
  int fd_states;
} rhomb_verify_options;

RHOMB_API void rhomb_verify_options_defaults(rhomb_verify_options* opt);
/* JSON report in *json; *all_passed is 1 when every item passed. */
RHOMB_API rhomb_status rhomb_verify(const rhomb_verify_options* opt, char** json, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif
