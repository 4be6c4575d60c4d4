#ifndef COHERENTFLOW_H
#define COHERENTFLOW_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define CF_API __attribute__((visibility("default")))
#else
#define CF_API
#endif

typedef enum cf_status {
  CF_OK = 0,
  CF_ERR_INVALID_ARGUMENT = 1,
  CF_ERR_DIMENSION_MISMATCH = 2,
  CF_ERR_INTEGRATION = 3,
  CF_ERR_SOLVE = 4,
  CF_ERR_EIGEN = 5,
  CF_ERR_COMPLEX_SPECTRUM = 6,
  CF_ERR_EMPTY_STATE = 7,
  CF_ERR_IO = 8,
  CF_ERR_PARSE = 9,
  CF_ERR_DUPLICATE_OBSERVATION = 10,
  CF_ERR_EMPTY_RESULT = 11,
  CF_ERR_NULL_POINTER = 100,
  CF_ERR_BUFFER_TOO_SMALL = 101,
  CF_ERR_INTERNAL = 102
} cf_status;

/* Message of the last failed call on this thread ("" if none). */
CF_API const char* cf_last_error(void);
CF_API const char* cf_status_name(cf_status status);
CF_API const char* cf_version(void);

/* Opaque handles. Each has a matching *_free; freeing NULL is a no-op. */
typedef struct cf_ensemble cf_ensemble;
typedef struct cf_detection cf_detection;
typedef struct cf_labeling cf_labeling;
typedef struct cf_report cf_report;
typedef struct cf_tracks cf_tracks;
typedef struct cf_mission cf_mission;

/* ---- simulation ---------------------------------------------------- */

typedef enum cf_flow_kind {
  CF_FLOW_DOUBLE_GYRE = 0,
  CF_FLOW_BICKLEY = 1,
  CF_FLOW_SINGLE_GYRE = 2,
  CF_FLOW_ZERO = 3
} cf_flow_kind;

typedef enum cf_integrator { CF_RK45 = 0, CF_RK4 = 1 } cf_integrator;

typedef struct cf_sim_config {
  cf_flow_kind flow;
  /* double gyre */
  double dg_eps, dg_alpha, dg_amp, dg_omega;
  /* single gyre stream amplitude; the tank is `domain` */
  double sg_amp;
  /* seed box x0, x1, y0, y1; wrap_x makes x periodic on [x0, x1) */
  double domain[4];
  int wrap_x;
  int nx, ny;
  double t0, t_end, dt_out;
  cf_integrator method;
  double rel_tol, abs_tol, max_step;
} cf_sim_config;

/* Benchmark defaults for `flow` (double gyre 60x30 over [0,20],
 * Bickley 60x24 over [0,40] with dt_out 0.2, single gyre tank 4.5 x 3). */
CF_API cf_status cf_sim_config_default(cf_flow_kind flow, cf_sim_config* out);
CF_API cf_status cf_simulate(const cf_sim_config* cfg, cf_ensemble** out);

/* ---- ensembles ----------------------------------------------------- */

/* Reads the binary format when the file starts with "CFE1", CSV otherwise. */
CF_API cf_status cf_ensemble_read(const char* path, cf_ensemble** out);
CF_API cf_status cf_ensemble_write_binary(const cf_ensemble* ens, const char* path);
CF_API cf_status cf_ensemble_write_csv(const cf_ensemble* ens, const char* path);
CF_API void cf_ensemble_free(cf_ensemble* ens);
CF_API size_t cf_ensemble_particles(const cf_ensemble* ens);
CF_API size_t cf_ensemble_steps(const cf_ensemble* ens);
CF_API size_t cf_ensemble_dim(const cf_ensemble* ens);
CF_API double cf_ensemble_t0(const cf_ensemble* ens);
CF_API double cf_ensemble_dt(const cf_ensemble* ens);
/* Copies snapshot `step` row-major (particles x dim) into `out`. */
CF_API cf_status cf_ensemble_snapshot(const cf_ensemble* ens, size_t step, double* out, size_t len);
CF_API cf_status cf_ensemble_ids(const cf_ensemble* ens, int64_t* out, size_t len);
CF_API cf_status cf_ensemble_set_ids(cf_ensemble* ens, const int64_t* ids, size_t len);
CF_API int cf_ensemble_equal(const cf_ensemble* a, const cf_ensemble* b);

/* ---- detection ----------------------------------------------------- */

typedef enum cf_kernel_kind { CF_KERNEL_GAUSSIAN = 0, CF_KERNEL_POLYNOMIAL = 1 } cf_kernel_kind;

typedef struct cf_detect_config {
  cf_kernel_kind kernel;
  double sigma;
  int degree;
  double offset;
  double epsilon;
  int n_eigen;
  double imag_tol;
  int k_clusters;
  int restarts;
  uint64_t seed;
  double rank_tol;
} cf_detect_config;

enum { CF_MODE_OFFLINE = 1, CF_MODE_ONLINE = 2 };

CF_API cf_status cf_detect_config_default(cf_detect_config* out);
/* `modes` is a bitmask of CF_MODE_*; runs are stored offline first. */
CF_API cf_status cf_detect(const cf_ensemble* ens, const cf_detect_config* cfg, int modes,
                           cf_detection** out);
CF_API void cf_detection_free(cf_detection* det);
/* Index of the run for a CF_MODE_* value, or -1. */
CF_API int cf_detection_run_index(const cf_detection* det, int mode);
CF_API size_t cf_detection_step_count(const cf_detection* det, int run);
/* Snapshot index and time of the i-th detected step (steps start at 1). */
CF_API cf_status cf_detection_step_info(const cf_detection* det, int run, size_t i, size_t* step,
                                        double* t);
/* Labeling of the i-th step; caller frees. */
CF_API cf_status cf_detection_labels(const cf_detection* det, int run, size_t i, cf_labeling** out);
/* Writes labels_NNNN.csv per step, eigenvalues.csv and eigenfunctions.csv. */
CF_API cf_status cf_detection_write(const cf_detection* det, int run, const cf_ensemble* ens,
                                    const char* dir);

/* ---- labelings ----------------------------------------------------- */

CF_API cf_status cf_labeling_create(const int* labels, size_t n, cf_labeling** out);
CF_API void cf_labeling_free(cf_labeling* lab);
CF_API size_t cf_labeling_size(const cf_labeling* lab);
CF_API int cf_labeling_k(const cf_labeling* lab);
CF_API cf_status cf_labeling_get(const cf_labeling* lab, int* out, size_t len);
/* Ordered by the ensemble's particle ids when `ens` is given. */
CF_API cf_status cf_labeling_read(const char* path, const cf_ensemble* ens, cf_labeling** out);
CF_API cf_status cf_labeling_write(const cf_labeling* lab, const cf_ensemble* ens, const char* path);
CF_API cf_status cf_adjusted_rand(const cf_labeling* a, const cf_labeling* b, double* out);
CF_API cf_status cf_homogeneity_completeness_v(const cf_labeling* truth, const cf_labeling* pred,
                                               double* h, double* c, double* v);

/* ---- validation ---------------------------------------------------- */

/* tau_index < 0 selects the final snapshot. */
CF_API cf_status cf_ground_truth(const cf_ensemble* ens, const cf_detect_config* cfg,
                                 long tau_index, int runs, uint64_t seed, cf_labeling** out);
CF_API cf_status cf_evaluate(const cf_detection* det, int run, const cf_labeling* truth,
                             const char* environment, cf_report** out);
/* Scores `n` per-step labelings (times `t`) against `truth`. */
CF_API cf_status cf_evaluate_labels(const cf_labeling* const* steps, const double* t, size_t n,
                                    const cf_labeling* truth, const char* method,
                                    const char* environment, cf_report** out);
CF_API void cf_report_free(cf_report* rep);
/* Averaged RI, H, C, V. */
CF_API cf_status cf_report_averages(const cf_report* rep, double* ri, double* h, double* c,
                                    double* v);
/* JSON text; writes at most `len` bytes including the terminator and
 * stores the full length (without terminator) in `needed`. */
CF_API cf_status cf_report_json(const cf_report* rep, char* buf, size_t len, size_t* needed);
CF_API cf_status cf_report_parse_json(const char* text, cf_report** out);
CF_API cf_status cf_score_table(const cf_report* const* reps, size_t n, char* buf, size_t len,
                                size_t* needed);

/* ---- tracks -------------------------------------------------------- */

CF_API cf_status cf_tracks_read(const char* path, double frame_dt, cf_tracks** out);
CF_API cf_status cf_tracks_synth(uint64_t seed, size_t n_agents, size_t n_frames,
                                 const char* scenario, double frame_dt, cf_tracks** out);
CF_API cf_status cf_tracks_write(const cf_tracks* ts, const char* path);
/* Writes construction labels (synthetic tracks only). */
CF_API cf_status cf_tracks_write_labels(const cf_tracks* ts, const char* path);
CF_API size_t cf_tracks_agents(const cf_tracks* ts);
CF_API void cf_tracks_free(cf_tracks* ts);
/* frame0 < 0 starts at the earliest frame; n_frames == 0 runs to the latest. */
CF_API cf_status cf_tracks_window(const cf_tracks* ts, long frame0, size_t n_frames,
                                  cf_ensemble** out, size_t* kept, size_t* dropped);

/* ---- planning ------------------------------------------------------ */

typedef struct cf_plan_config {
  double tank[4];
  double amp;
  int still_water;
  double u_max, omega_max, goal_radius, waypoint_radius;
  int tracer_nx, tracer_ny;
  double tracer_t_end, tracer_dt_out;
  cf_detect_config detect;
  int core_cluster;
  double cell_size;
  double start[2], goal[2];
  double dt, t_max;
  double drift_timeout_factor;
} cf_plan_config;

typedef struct cf_mission_summary {
  int reached;
  double energy;
  double duration;
  double drift_time;
  int recovery;
  size_t legs;
} cf_mission_summary;

CF_API cf_status cf_plan_config_default(cf_plan_config* out);
CF_API cf_status cf_plan(const cf_plan_config* cfg, cf_mission** out);
CF_API void cf_mission_free(cf_mission* m);
/* which: 0 = coherence-aware, 1 = naive. */
CF_API cf_status cf_mission_summary_get(const cf_mission* m, int which, cf_mission_summary* out);
/* Writes mission_aware.{csv,json}, mission_naive.{csv,json}, comparison.json,
 * tracer_labels.csv and, when write_pgm is set, region.pgm with both tracks. */
CF_API cf_status cf_mission_write(const cf_mission* m, const char* dir, int write_pgm);

/* ---- utilities ----------------------------------------------------- */

/* Lowercase hex SHA-256 of a file; `out` must hold 65 bytes. */
CF_API cf_status cf_sha256_file(const char* path, char* out);

#ifdef __cplusplus
}
#endif

#endif
