#include "coherentflow/coherentflow.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <string>

#include "coherentflow/detection.hpp"
#include "coherentflow/error.hpp"
#include "coherentflow/ingest.hpp"
#include "coherentflow/io.hpp"
#include "coherentflow/scenario.hpp"
#include "coherentflow/validation.hpp"
#include "json.hpp"

struct cf_ensemble {
  cf::Ensemble value;
};
struct cf_detection {
  std::vector<cf::DetectionRun> runs;
};
struct cf_labeling {
  cf::Labeling value;
};
struct cf_report {
  cf::ScoreReport value;
};
struct cf_tracks {
  cf::TrackSet value;
};
struct cf_mission {
  cf::PlanOutcome value;
};

namespace {

thread_local std::string g_last_error;

cf_status fail(cf_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <class F>
cf_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return CF_OK;
  } catch (const cf::Error& e) {
    return fail(static_cast<cf_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CF_ERR_INTERNAL, e.what());
  }
}

#define CF_REQUIRE_PTR(p)                                      \
  do {                                                         \
    if ((p) == nullptr) return fail(CF_ERR_NULL_POINTER, #p " is null"); \
  } while (0)

cf_status copy_text(const std::string& text, char* buf, size_t len, size_t* needed) {
  if (needed) *needed = text.size();
  if (buf == nullptr || len == 0) return needed ? CF_OK : fail(CF_ERR_NULL_POINTER, "buf is null");
  if (len <= text.size()) {
    std::memcpy(buf, text.data(), len - 1);
    buf[len - 1] = '\0';
    return fail(CF_ERR_BUFFER_TOO_SMALL, "buffer too small for " + std::to_string(text.size()) + " bytes");
  }
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return CF_OK;
}

cf::DetectionConfig to_cpp(const cf_detect_config& c) {
  cf::DetectionConfig cfg;
  cfg.kernel = c.kernel == CF_KERNEL_POLYNOMIAL ? cf::KernelSpec::polynomial(c.degree, c.offset)
                                                : cf::KernelSpec::gaussian(c.sigma);
  if (c.kernel != CF_KERNEL_POLYNOMIAL && c.kernel != CF_KERNEL_GAUSSIAN)
    throw cf::Error(cf::ErrorCode::invalid_argument, "unknown kernel kind");
  cfg.op.epsilon = c.epsilon;
  cfg.op.n_eigen = c.n_eigen;
  cfg.op.imag_tol = c.imag_tol;
  cfg.k_clusters = c.k_clusters;
  cfg.restarts = c.restarts;
  cfg.seed = c.seed;
  cfg.rank_tol = c.rank_tol;
  cfg.validate();
  return cfg;
}

void from_cpp(const cf::DetectionConfig& cfg, cf_detect_config* out) {
  out->kernel = cfg.kernel.kind == cf::KernelKind::polynomial ? CF_KERNEL_POLYNOMIAL : CF_KERNEL_GAUSSIAN;
  out->sigma = cfg.kernel.sigma;
  out->degree = cfg.kernel.degree;
  out->offset = cfg.kernel.offset;
  out->epsilon = cfg.op.epsilon;
  out->n_eigen = cfg.op.n_eigen;
  out->imag_tol = cfg.op.imag_tol;
  out->k_clusters = cfg.k_clusters;
  out->restarts = cfg.restarts;
  out->seed = cfg.seed;
  out->rank_tol = cfg.rank_tol;
}

const cf::DetectionRun& run_at(const cf_detection* det, int run) {
  if (run < 0 || static_cast<size_t>(run) >= det->runs.size())
    throw cf::Error(cf::ErrorCode::invalid_argument, "run index out of range");
  return det->runs[static_cast<size_t>(run)];
}

}  // namespace

extern "C" {

const char* cf_last_error(void) { return g_last_error.c_str(); }

const char* cf_status_name(cf_status status) {
  switch (status) {
    case CF_OK: return "ok";
    case CF_ERR_NULL_POINTER: return "null_pointer";
    case CF_ERR_BUFFER_TOO_SMALL: return "buffer_too_small";
    case CF_ERR_INTERNAL: return "internal";
    default:
      if (status >= 1 && status <= 11) return cf::to_string(static_cast<cf::ErrorCode>(status));
      return "unknown";
  }
}

const char* cf_version(void) { return "0.1.0"; }

cf_status cf_sim_config_default(cf_flow_kind flow, cf_sim_config* out) {
  CF_REQUIRE_PTR(out);
  *out = cf_sim_config{};
  const cf::DoubleGyreParams dg;
  out->flow = flow;
  out->dg_eps = dg.eps;
  out->dg_alpha = dg.alpha;
  out->dg_amp = dg.amp;
  out->dg_omega = dg.omega;
  out->sg_amp = cf::PlanScenario{}.amp;
  const cf::IntegratorConfig ic;
  out->method = CF_RK45;
  out->rel_tol = ic.rel_tol;
  out->abs_tol = ic.abs_tol;
  out->max_step = ic.max_step;
  out->t0 = 0.0;
  switch (flow) {
    case CF_FLOW_DOUBLE_GYRE:
    case CF_FLOW_ZERO:
      out->domain[0] = 0.0, out->domain[1] = 2.0, out->domain[2] = 0.0, out->domain[3] = 1.0;
      out->nx = 60, out->ny = 30;
      out->t_end = 20.0, out->dt_out = 0.1;
      break;
    case CF_FLOW_BICKLEY:
      out->domain[0] = 0.0, out->domain[1] = 20.0, out->domain[2] = -3.0, out->domain[3] = 3.0;
      out->wrap_x = 1;
      out->nx = 60, out->ny = 24;
      out->t_end = 40.0, out->dt_out = 0.2;
      break;
    case CF_FLOW_SINGLE_GYRE:
      out->domain[0] = 0.0, out->domain[1] = 4.5, out->domain[2] = 0.0, out->domain[3] = 3.0;
      out->nx = 54, out->ny = 36;
      out->t_end = 75.0, out->dt_out = 0.5;
      break;
    default:
      return fail(CF_ERR_INVALID_ARGUMENT, "unknown flow kind");
  }
  return CF_OK;
}

cf_status cf_simulate(const cf_sim_config* cfg, cf_ensemble** out) {
  CF_REQUIRE_PTR(cfg);
  CF_REQUIRE_PTR(out);
  *out = nullptr;
  return guard([&] {
    std::vector<int> wrap;
    if (cfg->wrap_x) wrap.push_back(0);
    const cf::Domain domain =
        cf::Domain::box2(cfg->domain[0], cfg->domain[1], cfg->domain[2], cfg->domain[3], wrap);
    cf::require(domain.valid(), cf::ErrorCode::invalid_argument, "simulate: invalid domain");
    cf::FlowField field = cf::FlowField::zero();
    switch (cfg->flow) {
      case CF_FLOW_DOUBLE_GYRE:
        field = cf::FlowField(cf::DoubleGyreParams{cfg->dg_eps, cfg->dg_alpha, cfg->dg_amp, cfg->dg_omega});
        break;
      case CF_FLOW_BICKLEY: field = cf::FlowField(cf::BickleyParams{}); break;
      case CF_FLOW_SINGLE_GYRE: field = cf::FlowField(cf::SingleGyreParams{cfg->sg_amp, domain}); break;
      case CF_FLOW_ZERO: break;
      default: throw cf::Error(cf::ErrorCode::invalid_argument, "unknown flow kind");
    }
    cf::IntegratorConfig ic;
    ic.method = cfg->method == CF_RK4 ? cf::IntegratorMethod::rk4_fixed
                                      : cf::IntegratorMethod::rk45_adaptive;
    ic.rel_tol = cfg->rel_tol;
    ic.abs_tol = cfg->abs_tol;
    ic.max_step = cfg->max_step;
    // On a periodic axis the upper edge is the lower edge again, so the
    // inclusive grid stops one spacing short of it.
    cf::Domain seed_box = domain;
    if (cfg->wrap_x && cfg->nx >= 2)
      seed_box.upper[0] = domain.lower[0] + (domain.upper[0] - domain.lower[0]) * (cfg->nx - 1) / cfg->nx;
    const auto seeds = cf::seed_grid(seed_box, {cfg->nx, cfg->ny});
    std::optional<cf::Domain> wrap_domain;
    if (cfg->wrap_x) wrap_domain = domain;
    auto ens = std::make_unique<cf_ensemble>();
    ens->value = cf::integrate_ensemble(field, seeds, cfg->t0, cfg->t_end, cfg->dt_out, ic, wrap_domain);
    ens->value.set_domain(domain);
    *out = ens.release();
  });
}

cf_status cf_ensemble_read(const char* path, cf_ensemble** out) {
  CF_REQUIRE_PTR(path);
  CF_REQUIRE_PTR(out);
  *out = nullptr;
  return guard([&] {
    char magic[4] = {};
    {
      std::ifstream in(path, std::ios::binary);
      cf::require(in.good(), cf::ErrorCode::io_error, std::string("cannot open ") + path);
      in.read(magic, 4);
    }
    auto ens = std::make_unique<cf_ensemble>();
    ens->value = std::memcmp(magic, "CFE1", 4) == 0 ? cf::read_ensemble_binary(path)
                                                    : cf::read_ensemble_csv(path);
    *out = ens.release();
  });
}

cf_status cf_ensemble_write_binary(const cf_ensemble* ens, const char* path) {
  CF_REQUIRE_PTR(ens);
  CF_REQUIRE_PTR(path);
  return guard([&] { cf::write_ensemble_binary(ens->value, path); });
}

cf_status cf_ensemble_write_csv(const cf_ensemble* ens, const char* path) {
  CF_REQUIRE_PTR(ens);
  CF_REQUIRE_PTR(path);
  return guard([&] { cf::write_ensemble_csv(ens->value, path); });
}

void cf_ensemble_free(cf_ensemble* ens) { delete ens; }
size_t cf_ensemble_particles(const cf_ensemble* ens) { return ens ? ens->value.particles() : 0; }
size_t cf_ensemble_steps(const cf_ensemble* ens) { return ens ? ens->value.steps() : 0; }
size_t cf_ensemble_dim(const cf_ensemble* ens) { return ens ? ens->value.dim() : 0; }
double cf_ensemble_t0(const cf_ensemble* ens) { return ens ? ens->value.t0() : 0.0; }
double cf_ensemble_dt(const cf_ensemble* ens) { return ens ? ens->value.dt_out() : 0.0; }

cf_status cf_ensemble_snapshot(const cf_ensemble* ens, size_t step, double* out, size_t len) {
  CF_REQUIRE_PTR(ens);
  CF_REQUIRE_PTR(out);
  return guard([&] {
    const auto& e = ens->value;
    cf::require(step < e.steps(), cf::ErrorCode::invalid_argument, "snapshot: step out of range");
    cf::require(len >= e.particles() * e.dim(), cf::ErrorCode::dimension_mismatch,
                "snapshot: output buffer too small");
    for (size_t p = 0; p < e.particles(); ++p)
      for (size_t a = 0; a < e.dim(); ++a) out[p * e.dim() + a] = e.at(p, step, a);
  });
}

cf_status cf_ensemble_ids(const cf_ensemble* ens, int64_t* out, size_t len) {
  CF_REQUIRE_PTR(ens);
  CF_REQUIRE_PTR(out);
  return guard([&] {
    const auto& ids = ens->value.ids();
    cf::require(len >= ids.size(), cf::ErrorCode::dimension_mismatch, "ids: output buffer too small");
    std::copy(ids.begin(), ids.end(), out);
  });
}

cf_status cf_ensemble_set_ids(cf_ensemble* ens, const int64_t* ids, size_t len) {
  CF_REQUIRE_PTR(ens);
  CF_REQUIRE_PTR(ids);
  return guard([&] { ens->value.set_ids(std::vector<std::int64_t>(ids, ids + len)); });
}

int cf_ensemble_equal(const cf_ensemble* a, const cf_ensemble* b) {
  return a && b && a->value == b->value;
}

cf_status cf_detect_config_default(cf_detect_config* out) {
  CF_REQUIRE_PTR(out);
  from_cpp(cf::DetectionConfig{}, out);
  return CF_OK;
}

cf_status cf_detect(const cf_ensemble* ens, const cf_detect_config* cfg, int modes,
                    cf_detection** out) {
  CF_REQUIRE_PTR(ens);
  CF_REQUIRE_PTR(cfg);
  CF_REQUIRE_PTR(out);
  *out = nullptr;
  return guard([&] {
    std::vector<cf::DetectMode> list;
    if (modes & CF_MODE_OFFLINE) list.push_back(cf::DetectMode::offline);
    if (modes & CF_MODE_ONLINE) list.push_back(cf::DetectMode::online);
    cf::require(!list.empty() && (modes & ~(CF_MODE_OFFLINE | CF_MODE_ONLINE)) == 0,
                cf::ErrorCode::invalid_argument, "detect: invalid mode mask");
    auto det = std::make_unique<cf_detection>();
    det->runs = cf::detect_runs(ens->value, to_cpp(*cfg), list);
    *out = det.release();
  });
}

void cf_detection_free(cf_detection* det) { delete det; }

int cf_detection_run_index(const cf_detection* det, int mode) {
  if (!det) return -1;
  const auto want = mode == CF_MODE_OFFLINE ? cf::DetectMode::offline : cf::DetectMode::online;
  if (mode != CF_MODE_OFFLINE && mode != CF_MODE_ONLINE) return -1;
  for (size_t i = 0; i < det->runs.size(); ++i)
    if (det->runs[i].mode == want) return static_cast<int>(i);
  return -1;
}

size_t cf_detection_step_count(const cf_detection* det, int run) {
  if (!det || run < 0 || static_cast<size_t>(run) >= det->runs.size()) return 0;
  return det->runs[static_cast<size_t>(run)].steps.size();
}

cf_status cf_detection_step_info(const cf_detection* det, int run, size_t i, size_t* step,
                                 double* t) {
  CF_REQUIRE_PTR(det);
  return guard([&] {
    const auto& r = run_at(det, run);
    cf::require(i < r.steps.size(), cf::ErrorCode::invalid_argument, "step index out of range");
    if (step) *step = r.steps[i].step;
    if (t) *t = r.steps[i].t;
  });
}

cf_status cf_detection_labels(const cf_detection* det, int run, size_t i, cf_labeling** out) {
  CF_REQUIRE_PTR(det);
  CF_REQUIRE_PTR(out);
  *out = nullptr;
  return guard([&] {
    const auto& r = run_at(det, run);
    cf::require(i < r.steps.size(), cf::ErrorCode::invalid_argument, "step index out of range");
    *out = new cf_labeling{r.steps[i].labels};
  });
}

cf_status cf_detection_write(const cf_detection* det, int run, const cf_ensemble* ens,
                             const char* dir) {
  CF_REQUIRE_PTR(det);
  CF_REQUIRE_PTR(dir);
  return guard([&] {
    const auto& r = run_at(det, run);
    const cf::fs::path root(dir);
    const std::vector<std::int64_t> ids = ens ? ens->value.ids() : std::vector<std::int64_t>{};
    for (const auto& s : r.steps) {
      char name[32];
      std::snprintf(name, sizeof(name), "labels_%04zu.csv", s.step);
      cf::write_labels_csv(s.labels, ids, root / "labels" / name);
    }
    cf::write_eigenvalue_trace(r, root / "eigenvalues.csv");
    cf::write_eigenfunctions(r.final_spectral, ids, root / "eigenfunctions.csv");
  });
}

cf_status cf_labeling_create(const int* labels, size_t n, cf_labeling** out) {
  CF_REQUIRE_PTR(out);
  *out = nullptr;
  if (n > 0) CF_REQUIRE_PTR(labels);
  return guard([&] {
    cf::Labeling lab;
    lab.labels.assign(labels, labels + n);
    for (int l : lab.labels) {
      cf::require(l >= 0, cf::ErrorCode::invalid_argument, "labels must be non-negative");
      lab.k = std::max(lab.k, l + 1);
    }
    *out = new cf_labeling{std::move(lab)};
  });
}

void cf_labeling_free(cf_labeling* lab) { delete lab; }
size_t cf_labeling_size(const cf_labeling* lab) { return lab ? lab->value.size() : 0; }
int cf_labeling_k(const cf_labeling* lab) { return lab ? lab->value.k : 0; }

cf_status cf_labeling_get(const cf_labeling* lab, int* out, size_t len) {
  CF_REQUIRE_PTR(lab);
  CF_REQUIRE_PTR(out);
  return guard([&] {
    cf::require(len >= lab->value.size(), cf::ErrorCode::dimension_mismatch,
                "labels: output buffer too small");
    std::copy(lab->value.labels.begin(), lab->value.labels.end(), out);
  });
}

cf_status cf_labeling_read(const char* path, const cf_ensemble* ens, cf_labeling** out) {
  CF_REQUIRE_PTR(path);
  CF_REQUIRE_PTR(out);
  *out = nullptr;
  return guard([&] {
    *out = new cf_labeling{cf::read_labels_csv(path, ens ? ens->value.ids() : std::vector<std::int64_t>{})};
  });
}

cf_status cf_labeling_write(const cf_labeling* lab, const cf_ensemble* ens, const char* path) {
  CF_REQUIRE_PTR(lab);
  CF_REQUIRE_PTR(path);
  return guard([&] {
    cf::write_labels_csv(lab->value, ens ? ens->value.ids() : std::vector<std::int64_t>{}, path);
  });
}

cf_status cf_adjusted_rand(const cf_labeling* a, const cf_labeling* b, double* out) {
  CF_REQUIRE_PTR(a);
  CF_REQUIRE_PTR(b);
  CF_REQUIRE_PTR(out);
  return guard([&] { *out = cf::adjusted_rand(a->value, b->value); });
}

cf_status cf_homogeneity_completeness_v(const cf_labeling* truth, const cf_labeling* pred,
                                        double* h, double* c, double* v) {
  CF_REQUIRE_PTR(truth);
  CF_REQUIRE_PTR(pred);
  return guard([&] {
    const auto r = cf::homogeneity_completeness_v(truth->value, pred->value);
    if (h) *h = r.homogeneity;
    if (c) *c = r.completeness;
    if (v) *v = r.v_measure;
  });
}

cf_status cf_ground_truth(const cf_ensemble* ens, const cf_detect_config* cfg, long tau_index,
                          int runs, uint64_t seed, cf_labeling** out) {
  CF_REQUIRE_PTR(ens);
  CF_REQUIRE_PTR(cfg);
  CF_REQUIRE_PTR(out);
  *out = nullptr;
  return guard([&] {
    const auto c = to_cpp(*cfg);
    cf::require(ens->value.steps() >= 2, cf::ErrorCode::invalid_argument,
                "ground truth: ensemble needs at least two snapshots");
    const std::size_t tau = tau_index < 0 ? ens->value.steps() - 1 : static_cast<std::size_t>(tau_index);
    *out = new cf_labeling{
        cf::ground_truth(ens->value, c.kernel, c.op, c.k_clusters, tau, runs, seed, c.restarts)};
  });
}

cf_status cf_evaluate(const cf_detection* det, int run, const cf_labeling* truth,
                      const char* environment, cf_report** out) {
  CF_REQUIRE_PTR(det);
  CF_REQUIRE_PTR(truth);
  CF_REQUIRE_PTR(out);
  *out = nullptr;
  return guard([&] {
    const auto& r = run_at(det, run);
    std::vector<std::pair<double, cf::Labeling>> steps;
    steps.reserve(r.steps.size());
    for (const auto& s : r.steps) steps.emplace_back(s.t, s.labels);
    auto rep = std::make_unique<cf_report>();
    rep->value = cf::evaluate_run(steps, truth->value);
    rep->value.method = cf::to_string(r.mode);
    rep->value.environment = environment ? environment : "";
    *out = rep.release();
  });
}

cf_status cf_evaluate_labels(const cf_labeling* const* steps, const double* t, size_t n,
                             const cf_labeling* truth, const char* method, const char* environment,
                             cf_report** out) {
  CF_REQUIRE_PTR(truth);
  CF_REQUIRE_PTR(out);
  *out = nullptr;
  if (n > 0) {
    CF_REQUIRE_PTR(steps);
    CF_REQUIRE_PTR(t);
  }
  return guard([&] {
    std::vector<std::pair<double, cf::Labeling>> list;
    for (size_t i = 0; i < n; ++i) {
      cf::require(steps[i] != nullptr, cf::ErrorCode::invalid_argument, "null labeling in list");
      list.emplace_back(t[i], steps[i]->value);
    }
    auto rep = std::make_unique<cf_report>();
    rep->value = cf::evaluate_run(list, truth->value);
    rep->value.method = method ? method : "";
    rep->value.environment = environment ? environment : "";
    *out = rep.release();
  });
}

void cf_report_free(cf_report* rep) { delete rep; }

cf_status cf_report_averages(const cf_report* rep, double* ri, double* h, double* c, double* v) {
  CF_REQUIRE_PTR(rep);
  const auto& a = rep->value.averaged;
  if (ri) *ri = a.rand_adjusted;
  if (h) *h = a.homogeneity;
  if (c) *c = a.completeness;
  if (v) *v = a.v_measure;
  return CF_OK;
}

cf_status cf_report_json(const cf_report* rep, char* buf, size_t len, size_t* needed) {
  CF_REQUIRE_PTR(rep);
  std::string text;
  const auto st = guard([&] { text = cf::score_report_json(rep->value); });
  if (st != CF_OK) return st;
  return copy_text(text, buf, len, needed);
}

cf_status cf_report_parse_json(const char* text, cf_report** out) {
  CF_REQUIRE_PTR(text);
  CF_REQUIRE_PTR(out);
  *out = nullptr;
  return guard([&] { *out = new cf_report{cf::parse_score_report_json(text)}; });
}

cf_status cf_score_table(const cf_report* const* reps, size_t n, char* buf, size_t len,
                         size_t* needed) {
  if (n > 0) CF_REQUIRE_PTR(reps);
  std::vector<cf::ScoreReport> list;
  for (size_t i = 0; i < n; ++i) {
    CF_REQUIRE_PTR(reps[i]);
    list.push_back(reps[i]->value);
  }
  std::string text;
  const auto st = guard([&] { text = cf::score_table(list); });
  if (st != CF_OK) return st;
  return copy_text(text, buf, len, needed);
}

cf_status cf_tracks_read(const char* path, double frame_dt, cf_tracks** out) {
  CF_REQUIRE_PTR(path);
  CF_REQUIRE_PTR(out);
  *out = nullptr;
  return guard([&] { *out = new cf_tracks{cf::read_tracks(path, frame_dt)}; });
}

cf_status cf_tracks_synth(uint64_t seed, size_t n_agents, size_t n_frames, const char* scenario,
                          double frame_dt, cf_tracks** out) {
  CF_REQUIRE_PTR(scenario);
  CF_REQUIRE_PTR(out);
  *out = nullptr;
  return guard([&] {
    *out = new cf_tracks{cf::synth_crowd(seed, n_agents, n_frames, scenario, frame_dt)};
  });
}

cf_status cf_tracks_write(const cf_tracks* ts, const char* path) {
  CF_REQUIRE_PTR(ts);
  CF_REQUIRE_PTR(path);
  return guard([&] { cf::write_tracks(ts->value, path); });
}

cf_status cf_tracks_write_labels(const cf_tracks* ts, const char* path) {
  CF_REQUIRE_PTR(ts);
  CF_REQUIRE_PTR(path);
  return guard([&] {
    cf::require(!ts->value.labels.empty(), cf::ErrorCode::empty_result,
                "tracks carry no construction labels");
    cf::write_track_labels(ts->value, path);
  });
}

size_t cf_tracks_agents(const cf_tracks* ts) { return ts ? ts->value.tracks.size() : 0; }
void cf_tracks_free(cf_tracks* ts) { delete ts; }

cf_status cf_tracks_window(const cf_tracks* ts, long frame0, size_t n_frames, cf_ensemble** out,
                           size_t* kept, size_t* dropped) {
  CF_REQUIRE_PTR(ts);
  CF_REQUIRE_PTR(out);
  *out = nullptr;
  return guard([&] {
    std::int64_t first = std::numeric_limits<std::int64_t>::max();
    std::int64_t last = std::numeric_limits<std::int64_t>::min();
    for (const auto& [id, track] : ts->value.tracks)
      if (!track.empty()) {
        first = std::min(first, track.front().frame);
        last = std::max(last, track.back().frame);
      }
    cf::require(first <= last, cf::ErrorCode::empty_result, "tracks are empty");
    const std::int64_t f0 = frame0 < 0 ? first : frame0;
    const std::size_t count = n_frames == 0 ? static_cast<std::size_t>(std::max<std::int64_t>(0, last - f0 + 1))
                                            : n_frames;
    auto w = cf::window_ensemble(ts->value, f0, count);
    if (kept) *kept = w.kept;
    if (dropped) *dropped = w.dropped;
    *out = new cf_ensemble{std::move(w.ensemble)};
  });
}

cf_status cf_plan_config_default(cf_plan_config* out) {
  CF_REQUIRE_PTR(out);
  const cf::PlanScenario sc;
  *out = cf_plan_config{};
  out->tank[0] = sc.tank.lower[0];
  out->tank[1] = sc.tank.upper[0];
  out->tank[2] = sc.tank.lower[1];
  out->tank[3] = sc.tank.upper[1];
  out->amp = sc.amp;
  out->still_water = sc.still_water;
  out->u_max = sc.vehicle.u_max;
  out->omega_max = sc.vehicle.omega_max;
  out->goal_radius = sc.vehicle.goal_radius;
  out->waypoint_radius = sc.vehicle.waypoint_radius;
  out->tracer_nx = sc.tracer_nx;
  out->tracer_ny = sc.tracer_ny;
  out->tracer_t_end = sc.tracer_t_end;
  out->tracer_dt_out = sc.tracer_dt_out;
  from_cpp(sc.detect, &out->detect);
  out->core_cluster = sc.core_cluster;
  out->cell_size = sc.cell_size;
  out->start[0] = sc.start.x();
  out->start[1] = sc.start.y();
  out->goal[0] = sc.goal.x();
  out->goal[1] = sc.goal.y();
  out->dt = sc.dt;
  out->t_max = sc.t_max;
  out->drift_timeout_factor = sc.drift_timeout_factor;
  return CF_OK;
}

cf_status cf_plan(const cf_plan_config* cfg, cf_mission** out) {
  CF_REQUIRE_PTR(cfg);
  CF_REQUIRE_PTR(out);
  *out = nullptr;
  return guard([&] {
    cf::PlanScenario sc;
    sc.tank = cf::Domain::box2(cfg->tank[0], cfg->tank[1], cfg->tank[2], cfg->tank[3]);
    sc.amp = cfg->amp;
    sc.still_water = cfg->still_water != 0;
    sc.vehicle = {cfg->u_max, cfg->omega_max, cfg->goal_radius, cfg->waypoint_radius};
    sc.tracer_nx = cfg->tracer_nx;
    sc.tracer_ny = cfg->tracer_ny;
    sc.tracer_t_end = cfg->tracer_t_end;
    sc.tracer_dt_out = cfg->tracer_dt_out;
    sc.detect = to_cpp(cfg->detect);
    sc.core_cluster = cfg->core_cluster;
    sc.cell_size = cfg->cell_size;
    sc.start = {cfg->start[0], cfg->start[1]};
    sc.goal = {cfg->goal[0], cfg->goal[1]};
    sc.dt = cfg->dt;
    sc.t_max = cfg->t_max;
    sc.drift_timeout_factor = cfg->drift_timeout_factor;
    *out = new cf_mission{cf::run_plan_scenario(sc)};
  });
}

void cf_mission_free(cf_mission* m) { delete m; }

cf_status cf_mission_summary_get(const cf_mission* m, int which, cf_mission_summary* out) {
  CF_REQUIRE_PTR(m);
  CF_REQUIRE_PTR(out);
  if (which != 0 && which != 1) return fail(CF_ERR_INVALID_ARGUMENT, "which must be 0 or 1");
  const auto& r = which == 0 ? m->value.aware : m->value.naive;
  out->reached = r.reached;
  out->energy = r.energy;
  out->duration = r.duration;
  out->drift_time = r.drift_time;
  out->recovery = r.recovery;
  out->legs = which == 0 ? m->value.plan.legs.size() : 1;
  return CF_OK;
}

cf_status cf_mission_write(const cf_mission* m, const char* dir, int write_pgm) {
  CF_REQUIRE_PTR(m);
  CF_REQUIRE_PTR(dir);
  return guard([&] {
    const cf::fs::path root(dir);
    const auto& o = m->value;
    cf::MissionPlan naive_plan;
    naive_plan.legs.push_back({o.plan.legs.back().target, cf::LegMode::thrust});
    cf::write_mission_csv(o.aware, root / "mission_aware.csv");
    cf::write_text(root / "mission_aware.json", cf::mission_json(o.aware, o.plan));
    cf::write_mission_csv(o.naive, root / "mission_naive.csv");
    cf::write_text(root / "mission_naive.json", cf::mission_json(o.naive, naive_plan));
    cf::write_labels_csv(o.labels, {}, root / "tracer_labels.csv");
    nlohmann::ordered_json cmp;
    for (const auto* r : {&o.aware, &o.naive})
      cmp[r == &o.aware ? "aware" : "naive"] = {{"reached", r->reached},
                                                {"energy", r->energy},
                                                {"duration", r->duration},
                                                {"drift_time", r->drift_time},
                                                {"recovery", r->recovery}};
    cmp["core_cluster"] = o.core_cluster;
    cmp["region_cells"] = o.region.count();
    cmp["revolution_period"] = o.revolution_period;
    cmp["energy_ratio"] = o.aware.energy > 0.0 ? o.naive.energy / o.aware.energy : 0.0;
    cf::write_text(root / "comparison.json", cmp.dump(2) + "\n");
    if (write_pgm) cf::write_region_pgm(o.region, {&o.aware, &o.naive}, root / "region.pgm");
  });
}

cf_status cf_sha256_file(const char* path, char* out) {
  CF_REQUIRE_PTR(path);
  CF_REQUIRE_PTR(out);
  return guard([&] {
    const std::string h = cf::sha256_file(path);
    std::memcpy(out, h.c_str(), h.size() + 1);
  });
}

}  // extern "C"
