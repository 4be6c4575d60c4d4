// coherentflow command-line front end. Talks to the library only through
// the C API in coherentflow/coherentflow.h.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coherentflow/coherentflow.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Double-gyre and Bickley runs use a smaller ridge than the library default;
// see README.
constexpr const char* kBenchmarkEpsilon = "1e-4";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
  ApiError(cf_status s, const std::string& what) : std::runtime_error(what), status(s) {}
  cf_status status;
};

void check(cf_status s, const std::string& what) {
  if (s != CF_OK) throw ApiError(s, what + ": " + cf_last_error());
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  explicit Handle(T* p) : ptr(p) {}
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
  ~Handle() { Free(ptr); }
  T** out() {
    Free(ptr);
    ptr = nullptr;
    return &ptr;
  }
  T* get() const { return ptr; }
};
using Ensemble = Handle<cf_ensemble, cf_ensemble_free>;
using Detection = Handle<cf_detection, cf_detection_free>;
using Labeling = Handle<cf_labeling, cf_labeling_free>;
using Report = Handle<cf_report, cf_report_free>;
using Tracks = Handle<cf_tracks, cf_tracks_free>;
using Mission = Handle<cf_mission, cf_mission_free>;

// ---- settings --------------------------------------------------------

// Every accepted key with its fallback value. Empty fallbacks are filled
// per environment.
const std::vector<std::pair<std::string, std::string>> kKeys = {
    {"run.environment", "double_gyre"},
    {"run.output", "out"},
    {"simulate.nx", ""},
    {"simulate.ny", ""},
    {"simulate.t0", "0"},
    {"simulate.t_end", ""},
    {"simulate.dt_out", ""},
    {"simulate.method", "rk45"},
    {"simulate.rel_tol", "1e-8"},
    {"simulate.abs_tol", "1e-10"},
    {"simulate.max_step", "0"},
    {"simulate.amp", ""},
    {"csv.frame_dt", "0.4"},
    {"csv.frame0", "-1"},
    {"csv.n_frames", "0"},
    {"csv.synthesize", "false"},
    {"csv.agents", "116"},
    {"csv.frames", "51"},
    {"csv.seed", "1"},
    {"csv.scenario", "platform"},
    {"detect.mode", "online"},
    {"detect.kernel", ""},
    {"detect.sigma", ""},
    {"detect.degree", "2"},
    {"detect.offset", "1"},
    {"detect.epsilon", ""},
    {"detect.n_eigen", ""},
    {"detect.imag_tol", "1e-6"},
    {"detect.k", ""},
    {"detect.restarts", "20"},
    {"detect.seed", "1"},
    {"detect.rank_tol", "1e-12"},
    {"evaluate.truth_runs", "5"},
    {"evaluate.truth_seed", "7"},
    {"evaluate.tau_index", "-1"},
    {"evaluate.truth", ""},
    {"plan.amp", ""},
    {"plan.still_water", "false"},
    {"plan.u_max", ""},
    {"plan.omega_max", ""},
    {"plan.goal_radius", ""},
    {"plan.waypoint_radius", ""},
    {"plan.tracer_nx", ""},
    {"plan.tracer_ny", ""},
    {"plan.tracer_t_end", ""},
    {"plan.tracer_dt_out", ""},
    {"plan.sigma", ""},
    {"plan.epsilon", ""},
    {"plan.k", ""},
    {"plan.restarts", ""},
    {"plan.seed", ""},
    {"plan.core_cluster", ""},
    {"plan.cell_size", ""},
    {"plan.start_x", ""},
    {"plan.start_y", ""},
    {"plan.goal_x", ""},
    {"plan.goal_y", ""},
    {"plan.dt", ""},
    {"plan.t_max", ""},
    {"plan.drift_timeout_factor", ""},
    {"plan.pgm", "true"},
};

class Settings {
 public:
  Settings() {
    for (const auto& [k, v] : kKeys) values_[k] = v;
  }

  void set(const std::string& key, const std::string& value, const std::string& origin) {
    const std::string full = resolve(key, origin);
    values_[full] = value;
    explicit_.insert(full);
  }

  bool is_set(const std::string& key) const { return explicit_.count(key) > 0; }
  void fallback(const std::string& key, const std::string& value) {
    if (!is_set(key) && values_[key].empty()) values_[key] = value;
  }

  const std::string& str(const std::string& key) const { return values_.at(key); }
  double num(const std::string& key) const {
    const auto& s = str(key);
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(key + ": expected a number, got '" + s + "'");
  }
  long integer(const std::string& key) const {
    const auto& s = str(key);
    try {
      std::size_t used = 0;
      const long v = std::stol(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(key + ": expected an integer, got '" + s + "'");
  }
  bool flag(const std::string& key) const {
    const auto& s = str(key);
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError(key + ": expected true or false, got '" + s + "'");
  }

  json to_json() const {
    json j = json::object();
    for (const auto& [k, v] : kKeys) j[k] = values_.at(k);
    return j;
  }

 private:
  // Accepts "section.key" or a bare key that is unique across sections.
  std::string resolve(const std::string& key, const std::string& origin) const {
    if (values_.count(key)) return key;
    std::string match;
    for (const auto& [k, v] : kKeys) {
      const auto dot = k.find('.');
      if (k.substr(dot + 1) == key) {
        if (!match.empty())
          throw ConfigError(origin + ": ambiguous key '" + key + "' (use section.key)");
        match = k;
      }
    }
    if (match.empty()) throw ConfigError(origin + ": unknown key '" + key + "'");
    return match;
  }

  std::map<std::string, std::string> values_;
  std::set<std::string> explicit_;
};

void load_toml(Settings& settings, const std::string& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(path);
  } catch (const CLI::Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    std::string key;
    for (const auto& p : item.parents) key += p + ".";
    key += item.name;
    if (item.inputs.size() != 1)
      throw ConfigError(path + ": key '" + key + "' must hold a single value");
    settings.set(key, item.inputs.front(), path);
  }
}

void apply_overrides(Settings& settings, const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0 || a.size() < 3)
      throw ConfigError("unexpected argument '" + a + "'");
    std::string key = a.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= args.size()) throw ConfigError("missing value for '" + a + "'");
      value = args[++i];
    }
    settings.set(key, value, "command line");
  }
}

// ---- environment handling --------------------------------------------

struct Env {
  std::string name;  // double_gyre | bickley | single_gyre | csv
  std::string csv_path;
};

Env parse_env(const std::string& s) {
  if (s == "double_gyre" || s == "bickley" || s == "single_gyre") return {s, ""};
  if (s.rfind("csv:", 0) == 0 && s.size() > 4) return {"csv", s.substr(4)};
  throw ConfigError("run.environment: expected double_gyre, bickley, single_gyre or csv:<path>, got '" +
                    s + "'");
}

void apply_env_defaults(Settings& st, const Env& env) {
  cf_plan_config plan;
  cf_plan_config_default(&plan);
  auto d = [](double v) {
    std::ostringstream o;
    o.precision(17);
    o << v;
    return o.str();
  };
  if (env.name == "double_gyre") {
    st.fallback("simulate.nx", "60");
    st.fallback("simulate.ny", "30");
    st.fallback("simulate.t_end", "20");
    st.fallback("simulate.dt_out", "0.1");
    st.fallback("detect.kernel", "gaussian");
    st.fallback("detect.sigma", "0.75");
    st.fallback("detect.k", "3");
    st.fallback("detect.epsilon", kBenchmarkEpsilon);
  } else if (env.name == "bickley") {
    st.fallback("simulate.nx", "60");
    st.fallback("simulate.ny", "24");
    st.fallback("simulate.t_end", "40");
    st.fallback("simulate.dt_out", "0.2");
    st.fallback("detect.kernel", "gaussian");
    st.fallback("detect.sigma", "1");
    st.fallback("detect.k", "9");
    st.fallback("detect.epsilon", kBenchmarkEpsilon);
  } else if (env.name == "single_gyre") {
    st.fallback("simulate.nx", std::to_string(plan.tracer_nx));
    st.fallback("simulate.ny", std::to_string(plan.tracer_ny));
    st.fallback("simulate.t_end", d(plan.tracer_t_end));
    st.fallback("simulate.dt_out", d(plan.tracer_dt_out));
    st.fallback("detect.kernel", "gaussian");
    st.fallback("detect.sigma", d(plan.detect.sigma));
    st.fallback("detect.k", std::to_string(plan.detect.k_clusters));
    st.fallback("detect.epsilon", d(plan.detect.epsilon));
  } else {
    st.fallback("detect.kernel", "polynomial");
    st.fallback("detect.sigma", "1");
    st.fallback("detect.k", "3");
  }
  cf_detect_config dc;
  cf_detect_config_default(&dc);
  st.fallback("detect.epsilon", d(dc.epsilon));
  st.fallback("simulate.nx", "60");
  st.fallback("simulate.ny", "30");
  st.fallback("simulate.t_end", "20");
  st.fallback("simulate.dt_out", "0.1");
  st.fallback("simulate.amp", d(plan.amp));
  st.fallback("detect.n_eigen", st.str("detect.k"));

  st.fallback("plan.amp", d(plan.amp));
  st.fallback("plan.u_max", d(plan.u_max));
  st.fallback("plan.omega_max", d(plan.omega_max));
  st.fallback("plan.goal_radius", d(plan.goal_radius));
  st.fallback("plan.waypoint_radius", d(plan.waypoint_radius));
  st.fallback("plan.tracer_nx", std::to_string(plan.tracer_nx));
  st.fallback("plan.tracer_ny", std::to_string(plan.tracer_ny));
  st.fallback("plan.tracer_t_end", d(plan.tracer_t_end));
  st.fallback("plan.tracer_dt_out", d(plan.tracer_dt_out));
  st.fallback("plan.sigma", d(plan.detect.sigma));
  st.fallback("plan.epsilon", d(plan.detect.epsilon));
  st.fallback("plan.k", std::to_string(plan.detect.k_clusters));
  st.fallback("plan.restarts", std::to_string(plan.detect.restarts));
  st.fallback("plan.seed", std::to_string(plan.detect.seed));
  st.fallback("plan.core_cluster", std::to_string(plan.core_cluster));
  st.fallback("plan.cell_size", d(plan.cell_size));
  st.fallback("plan.start_x", d(plan.start[0]));
  st.fallback("plan.start_y", d(plan.start[1]));
  st.fallback("plan.goal_x", d(plan.goal[0]));
  st.fallback("plan.goal_y", d(plan.goal[1]));
  st.fallback("plan.dt", d(plan.dt));
  st.fallback("plan.t_max", d(plan.t_max));
  st.fallback("plan.drift_timeout_factor", d(plan.drift_timeout_factor));
}

cf_detect_config detect_config(const Settings& st) {
  cf_detect_config c;
  cf_detect_config_default(&c);
  const auto& kernel = st.str("detect.kernel");
  if (kernel == "gaussian") {
    c.kernel = CF_KERNEL_GAUSSIAN;
  } else if (kernel == "polynomial") {
    c.kernel = CF_KERNEL_POLYNOMIAL;
  } else {
    throw ConfigError("detect.kernel: expected gaussian or polynomial, got '" + kernel + "'");
  }
  c.sigma = st.num("detect.sigma");
  c.degree = static_cast<int>(st.integer("detect.degree"));
  c.offset = st.num("detect.offset");
  c.epsilon = st.num("detect.epsilon");
  c.n_eigen = static_cast<int>(st.integer("detect.n_eigen"));
  c.imag_tol = st.num("detect.imag_tol");
  c.k_clusters = static_cast<int>(st.integer("detect.k"));
  c.restarts = static_cast<int>(st.integer("detect.restarts"));
  const long seed = st.integer("detect.seed");
  if (seed < 0) throw ConfigError("detect.seed must be >= 0");
  c.seed = static_cast<uint64_t>(seed);
  c.rank_tol = st.num("detect.rank_tol");
  return c;
}

std::vector<int> modes_of(const std::string& mode) {
  if (mode == "offline") return {CF_MODE_OFFLINE};
  if (mode == "online") return {CF_MODE_ONLINE};
  if (mode == "both") return {CF_MODE_OFFLINE, CF_MODE_ONLINE};
  throw ConfigError("detect.mode: expected offline, online or both, got '" + mode + "'");
}

const char* mode_name(int mode) { return mode == CF_MODE_OFFLINE ? "offline" : "online"; }

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out.good()) throw ApiError(CF_ERR_IO, "failed writing " + p.string());
}

std::string sha256(const fs::path& p) {
  char hex[65];
  check(cf_sha256_file(p.string().c_str(), hex), "hashing " + p.string());
  return hex;
}

fs::path output_dir(const Settings& st) { return fs::path(st.str("run.output")); }

std::string construction_labels_path(const std::string& tracks_path) {
  return tracks_path + ".labels.csv";
}

// ---- ids sidecar -----------------------------------------------------

void write_ids(const cf_ensemble* ens, const fs::path& p) {
  std::vector<int64_t> ids(cf_ensemble_particles(ens));
  check(cf_ensemble_ids(ens, ids.data(), ids.size()), "reading particle ids");
  std::ostringstream out;
  out << "particle_id\n";
  for (auto id : ids) out << id << '\n';
  write_file(p, out.str());
}

void read_ids(cf_ensemble* ens, const fs::path& p) {
  if (!fs::exists(p)) return;
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<int64_t> ids;
  while (std::getline(in, line))
    if (!line.empty()) ids.push_back(std::stoll(line));
  check(cf_ensemble_set_ids(ens, ids.data(), ids.size()), "applying " + p.string());
}

Ensemble load_ensemble(const Settings& st) {
  const fs::path dir = output_dir(st);
  const fs::path bin = dir / "ensemble.cfe";
  if (!fs::exists(bin))
    throw ApiError(CF_ERR_IO, "no ensemble at " + bin.string() + " (run simulate first)");
  Ensemble ens;
  check(cf_ensemble_read(bin.string().c_str(), ens.out()), "reading " + bin.string());
  read_ids(ens.get(), dir / "particle_ids.csv");
  return ens;
}

// ---- commands ---------------------------------------------------------

int cmd_simulate(const Settings& st, const Env& env) {
  const fs::path dir = output_dir(st);
  Ensemble ens;
  if (env.name == "csv") {
    if (st.flag("csv.synthesize")) {
      Tracks synth;
      check(cf_tracks_synth(static_cast<uint64_t>(st.integer("csv.seed")),
                            static_cast<size_t>(st.integer("csv.agents")),
                            static_cast<size_t>(st.integer("csv.frames")),
                            st.str("csv.scenario").c_str(), st.num("csv.frame_dt"), synth.out()),
            "synthesizing tracks");
      if (const fs::path parent = fs::path(env.csv_path).parent_path(); !parent.empty())
        fs::create_directories(parent);
      check(cf_tracks_write(synth.get(), env.csv_path.c_str()), "writing " + env.csv_path);
      check(cf_tracks_write_labels(synth.get(), construction_labels_path(env.csv_path).c_str()),
            "writing construction labels");
    }
    Tracks tracks;
    check(cf_tracks_read(env.csv_path.c_str(), st.num("csv.frame_dt"), tracks.out()),
          "reading " + env.csv_path);
    size_t kept = 0, dropped = 0;
    const long n_frames = st.integer("csv.n_frames");
    if (n_frames < 0) throw ConfigError("csv.n_frames must be >= 0");
    check(cf_tracks_window(tracks.get(), st.integer("csv.frame0"), static_cast<size_t>(n_frames),
                           ens.out(), &kept, &dropped),
          "windowing tracks");
    std::cerr << "tracks: kept " << kept << " agents, dropped " << dropped
              << " with incomplete coverage\n";
  } else {
    const cf_flow_kind kind = env.name == "double_gyre" ? CF_FLOW_DOUBLE_GYRE
                              : env.name == "bickley"   ? CF_FLOW_BICKLEY
                                                        : CF_FLOW_SINGLE_GYRE;
    cf_sim_config sc;
    check(cf_sim_config_default(kind, &sc), "simulation defaults");
    sc.nx = static_cast<int>(st.integer("simulate.nx"));
    sc.ny = static_cast<int>(st.integer("simulate.ny"));
    sc.t0 = st.num("simulate.t0");
    sc.t_end = st.num("simulate.t_end");
    sc.dt_out = st.num("simulate.dt_out");
    const auto& method = st.str("simulate.method");
    if (method != "rk45" && method != "rk4")
      throw ConfigError("simulate.method: expected rk45 or rk4, got '" + method + "'");
    sc.method = method == "rk4" ? CF_RK4 : CF_RK45;
    sc.rel_tol = st.num("simulate.rel_tol");
    sc.abs_tol = st.num("simulate.abs_tol");
    sc.max_step = st.num("simulate.max_step");
    sc.sg_amp = st.num("simulate.amp");
    check(cf_simulate(&sc, ens.out()), "simulating " + env.name);
  }

  const fs::path bin = dir / "ensemble.cfe";
  const fs::path csv = dir / "ensemble.csv";
  const fs::path ids = dir / "particle_ids.csv";
  fs::create_directories(dir);
  check(cf_ensemble_write_binary(ens.get(), bin.string().c_str()), "writing " + bin.string());
  check(cf_ensemble_write_csv(ens.get(), csv.string().c_str()), "writing " + csv.string());
  write_ids(ens.get(), ids);

  json manifest;
  manifest["tool"] = "coherentflow";
  manifest["version"] = cf_version();
  manifest["command"] = "simulate";
  manifest["environment"] = st.str("run.environment");
  manifest["particles"] = cf_ensemble_particles(ens.get());
  manifest["snapshots"] = cf_ensemble_steps(ens.get());
  manifest["dim"] = cf_ensemble_dim(ens.get());
  manifest["config"] = st.to_json();
  manifest["files"] = {{"ensemble.cfe", sha256(bin)},
                       {"ensemble.csv", sha256(csv)},
                       {"particle_ids.csv", sha256(ids)}};
  manifest["content_hash"] = sha256(bin);
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  manifest["created_utc"] = stamp;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "simulate: " << cf_ensemble_particles(ens.get()) << " particles x "
            << cf_ensemble_steps(ens.get()) << " snapshots -> " << bin.string() << "\n"
            << "content_hash " << manifest["content_hash"].get<std::string>() << "\n";
  return 0;
}

int cmd_detect(const Settings& st, const Env&) {
  const auto cfg = detect_config(st);
  const auto modes = modes_of(st.str("detect.mode"));
  Ensemble ens = load_ensemble(st);
  int mask = 0;
  for (int m : modes) mask |= m;
  Detection det;
  check(cf_detect(ens.get(), &cfg, mask, det.out()), "detect");
  for (int m : modes) {
    const int run = cf_detection_run_index(det.get(), m);
    const fs::path dir = output_dir(st) / "detect" / mode_name(m);
    check(cf_detection_write(det.get(), run, ens.get(), dir.string().c_str()),
          "writing " + dir.string());
    const size_t n = cf_detection_step_count(det.get(), run);
    Labeling last;
    check(cf_detection_labels(det.get(), run, n - 1, last.out()), "final labels");
    std::cout << "detect " << mode_name(m) << ": " << n << " steps, " << cf_labeling_k(last.get())
              << " sets at the final step -> " << dir.string() << "\n";
  }
  return 0;
}

std::vector<std::pair<size_t, fs::path>> label_files(const fs::path& dir) {
  std::vector<std::pair<size_t, fs::path>> files;
  if (!fs::is_directory(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("labels_", 0) != 0 || entry.path().extension() != ".csv") continue;
    files.emplace_back(std::stoul(name.substr(7, name.size() - 11)), entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_evaluate(const Settings& st, const Env& env) {
  Ensemble ens = load_ensemble(st);
  const fs::path dir = output_dir(st);
  const fs::path eval_dir = dir / "evaluate";

  Labeling truth;
  std::string truth_path = st.str("evaluate.truth");
  if (truth_path.empty() && env.name == "csv" && fs::exists(construction_labels_path(env.csv_path)))
    truth_path = construction_labels_path(env.csv_path);
  if (!truth_path.empty()) {
    check(cf_labeling_read(truth_path.c_str(), ens.get(), truth.out()), "reading " + truth_path);
  } else {
    const auto cfg = detect_config(st);
    check(cf_ground_truth(ens.get(), &cfg, st.integer("evaluate.tau_index"),
                          static_cast<int>(st.integer("evaluate.truth_runs")),
                          static_cast<uint64_t>(st.integer("evaluate.truth_seed")), truth.out()),
          "ground truth");
  }
  check(cf_labeling_write(truth.get(), ens.get(), (eval_dir / "truth_labels.csv").string().c_str()),
        "writing truth labels");

  std::vector<Report> reports;
  const double t0 = cf_ensemble_t0(ens.get());
  const double dt = cf_ensemble_dt(ens.get());
  for (int m : {CF_MODE_OFFLINE, CF_MODE_ONLINE}) {
    const auto files = label_files(dir / "detect" / mode_name(m) / "labels");
    if (files.empty()) continue;
    std::vector<Labeling> steps;
    std::vector<const cf_labeling*> ptrs;
    std::vector<double> times;
    for (const auto& [step, path] : files) {
      steps.emplace_back();
      check(cf_labeling_read(path.string().c_str(), ens.get(), steps.back().out()),
            "reading " + path.string());
      times.push_back(t0 + static_cast<double>(step) * dt);
    }
    for (const auto& s : steps) ptrs.push_back(s.get());
    Report rep;
    const std::string env_label = env.name == "csv" ? "csv" : env.name;
    check(cf_evaluate_labels(ptrs.data(), times.data(), ptrs.size(), truth.get(), mode_name(m),
                             env_label.c_str(), rep.out()),
          "scoring");
    size_t needed = 0;
    cf_report_json(rep.get(), nullptr, 0, &needed);
    std::string text(needed + 1, '\0');
    check(cf_report_json(rep.get(), text.data(), text.size(), &needed), "report json");
    text.resize(needed);
    write_file(eval_dir / (std::string("scores_") + mode_name(m) + ".json"), text);
    reports.push_back(std::move(rep));
  }
  if (reports.empty())
    throw ApiError(CF_ERR_IO, "no detect outputs under " + (dir / "detect").string() +
                                  " (run detect first)");

  std::vector<const cf_report*> ptrs;
  for (const auto& r : reports) ptrs.push_back(r.get());
  size_t needed = 0;
  cf_score_table(ptrs.data(), ptrs.size(), nullptr, 0, &needed);
  std::string table(needed + 1, '\0');
  check(cf_score_table(ptrs.data(), ptrs.size(), table.data(), table.size(), &needed), "table");
  table.resize(needed);
  write_file(eval_dir / "scores.txt", table);
  std::cout << table;
  return 0;
}

int cmd_plan(const Settings& st, const Env&) {
  cf_plan_config pc;
  cf_plan_config_default(&pc);
  pc.amp = st.num("plan.amp");
  pc.still_water = st.flag("plan.still_water");
  pc.u_max = st.num("plan.u_max");
  pc.omega_max = st.num("plan.omega_max");
  pc.goal_radius = st.num("plan.goal_radius");
  pc.waypoint_radius = st.num("plan.waypoint_radius");
  pc.tracer_nx = static_cast<int>(st.integer("plan.tracer_nx"));
  pc.tracer_ny = static_cast<int>(st.integer("plan.tracer_ny"));
  pc.tracer_t_end = st.num("plan.tracer_t_end");
  pc.tracer_dt_out = st.num("plan.tracer_dt_out");
  pc.detect.sigma = st.num("plan.sigma");
  pc.detect.epsilon = st.num("plan.epsilon");
  pc.detect.k_clusters = static_cast<int>(st.integer("plan.k"));
  pc.detect.n_eigen = pc.detect.k_clusters;
  pc.detect.restarts = static_cast<int>(st.integer("plan.restarts"));
  pc.detect.seed = static_cast<uint64_t>(st.integer("plan.seed"));
  pc.core_cluster = static_cast<int>(st.integer("plan.core_cluster"));
  pc.cell_size = st.num("plan.cell_size");
  pc.start[0] = st.num("plan.start_x");
  pc.start[1] = st.num("plan.start_y");
  pc.goal[0] = st.num("plan.goal_x");
  pc.goal[1] = st.num("plan.goal_y");
  pc.dt = st.num("plan.dt");
  pc.t_max = st.num("plan.t_max");
  pc.drift_timeout_factor = st.num("plan.drift_timeout_factor");

  Mission mission;
  check(cf_plan(&pc, mission.out()), "plan");
  const fs::path dir = output_dir(st) / "plan";
  check(cf_mission_write(mission.get(), dir.string().c_str(), st.flag("plan.pgm") ? 1 : 0),
        "writing " + dir.string());
  for (int which : {0, 1}) {
    cf_mission_summary s;
    check(cf_mission_summary_get(mission.get(), which, &s), "summary");
    std::printf("%-6s reached=%s energy=%.3f duration=%.2f drift=%.2f%s\n",
                which == 0 ? "aware" : "naive", s.reached ? "true" : "false", s.energy,
                s.duration, s.drift_time, s.recovery ? " (drift timeout recovery)" : "");
  }
  return 0;
}

int exit_code_for(cf_status s) { return s == CF_ERR_INVALID_ARGUMENT ? 2 : 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent-set detection, evaluation and coherence-aware planning"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("-c,--config", config_path, "TOML configuration file");

  struct Sub {
    CLI::App* app;
    std::string config;
  };
  std::map<std::string, Sub> subs;
  for (const char* name : {"simulate", "detect", "evaluate", "plan"}) {
    auto* sub = app.add_subcommand(name, std::string(name) + " (keys: --section.key value)");
    sub->allow_extras();
    subs[name] = {sub, ""};
    sub->add_option("-c,--config", subs[name].config, "TOML configuration file");
  }
  subs["detect"].app->add_option("--mode", "offline, online or both")->expected(1);
  auto* version = app.add_subcommand("version", "print the library version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (version->parsed()) {
    std::cout << "coherentflow " << cf_version() << "\n";
    return 0;
  }

  try {
    for (auto& [name, sub] : subs) {
      if (!sub.app->parsed()) continue;
      Settings st;
      const std::string cfg_file = !sub.config.empty() ? sub.config : config_path;
      if (!cfg_file.empty()) load_toml(st, cfg_file);
      if (name == "detect") {
        if (auto* opt = sub.app->get_option("--mode"); opt->count() > 0)
          st.set("detect.mode", opt->as<std::string>(), "command line");
      }
      apply_overrides(st, sub.app->remaining());
      const Env env = parse_env(st.str("run.environment"));
      apply_env_defaults(st, env);
      if (name == "simulate") return cmd_simulate(st, env);
      if (name == "detect") return cmd_detect(st, env);
      if (name == "evaluate") return cmd_evaluate(st, env);
      return cmd_plan(st, env);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
