#include "coherentflow/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "coherentflow/error.hpp"
#include "coherentflow/text.hpp"

namespace cf {

std::size_t TrackSet::dim() const {
  for (const auto& [id, track] : tracks)
    if (!track.empty()) return static_cast<std::size_t>(track.front().position.size());
  return 0;
}

void TrackSet::validate() const {
  require(frame_dt > 0.0, ErrorCode::invalid_argument, "frame_dt must be positive");
  const std::size_t d = dim();
  for (const auto& [id, track] : tracks) {
    for (std::size_t i = 0; i < track.size(); ++i) {
      require(static_cast<std::size_t>(track[i].position.size()) == d,
              ErrorCode::dimension_mismatch,
              "agent " + std::to_string(id) + ": inconsistent dimension");
      require(i == 0 || track[i].frame > track[i - 1].frame, ErrorCode::invalid_argument,
              "agent " + std::to_string(id) + ": frames not strictly increasing");
    }
  }
}

TrackSet read_tracks(const std::filesystem::path& path, double frame_dt) {
  require(frame_dt > 0.0, ErrorCode::invalid_argument, "frame_dt must be positive");
  std::ifstream in(path);
  require(in.good(), ErrorCode::io_error, "cannot open " + path.string());
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && !trim(line).empty(),
          ErrorCode::parse_error, path.string() + ": empty file");
  const auto header = split_csv(line);
  static const char* axes[] = {"x", "y", "z"};
  require(header.size() >= 4 && header.size() <= 5 && header[0] == "frame" &&
              header[1] == "agent_id",
          ErrorCode::parse_error, path.string() + ": expected header frame,agent_id,x,y[,z]");
  const std::size_t d = header.size() - 2;
  for (std::size_t a = 0; a < d; ++a)
    require(header[2 + a] == axes[a], ErrorCode::parse_error,
            path.string() + ": expected header frame,agent_id,x,y[,z]");

  TrackSet ts;
  ts.frame_dt = frame_dt;
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto fields = split_csv(line);
    require(fields.size() == header.size(), ErrorCode::parse_error, where + ": wrong column count");
    Observation obs;
    obs.frame = parse_int(fields[0], where);
    const auto agent = parse_int(fields[1], where);
    obs.position.resize(static_cast<Eigen::Index>(d));
    for (std::size_t a = 0; a < d; ++a)
      obs.position[static_cast<Eigen::Index>(a)] = parse_double(fields[2 + a], where);
    const auto [it, inserted] = seen.emplace(std::make_pair(agent, obs.frame), line_no);
    require(inserted, ErrorCode::duplicate_observation,
            where + ": duplicate observation of agent " + std::to_string(agent) + " at frame " +
                std::to_string(obs.frame) + " (first at line " + std::to_string(it->second) + ")");
    ts.tracks[agent].push_back(std::move(obs));
  }
  require(!ts.tracks.empty(), ErrorCode::parse_error, path.string() + ": no observations");
  for (auto& [id, track] : ts.tracks)
    std::sort(track.begin(), track.end(),
              [](const Observation& a, const Observation& b) { return a.frame < b.frame; });
  return ts;
}

void write_tracks(const TrackSet& ts, const std::filesystem::path& path) {
  ts.validate();
  const std::size_t d = ts.dim();
  require(d >= 2 && d <= 3, ErrorCode::invalid_argument, "write_tracks: dimension must be 2 or 3");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  require(out.good(), ErrorCode::io_error, "cannot open " + path.string() + " for writing");
  out << (d == 2 ? "frame,agent_id,x,y\n" : "frame,agent_id,x,y,z\n");
  for (const auto& [id, track] : ts.tracks) {
    for (const auto& obs : track) {
      out << obs.frame << ',' << id;
      for (Eigen::Index a = 0; a < obs.position.size(); ++a) out << ',' << format_double(obs.position[a]);
      out << '\n';
    }
  }
  require(out.good(), ErrorCode::io_error, "failed writing " + path.string());
}

void write_track_labels(const TrackSet& ts, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  require(out.good(), ErrorCode::io_error, "cannot open " + path.string() + " for writing");
  out << "particle_id,label\n";
  for (const auto& [id, label] : ts.labels) out << id << ',' << label << '\n';
}

WindowedEnsemble window_ensemble(const TrackSet& ts, std::int64_t frame0, std::size_t n_frames) {
  require(n_frames >= 2, ErrorCode::invalid_argument, "window_ensemble: n_frames must be >= 2");
  ts.validate();
  const auto frame_end = frame0 + static_cast<std::int64_t>(n_frames);

  WindowedEnsemble out;
  std::vector<std::pair<std::int64_t, const Observation*>> kept;
  for (const auto& [id, track] : ts.tracks) {
    const auto first = std::lower_bound(
        track.begin(), track.end(), frame0,
        [](const Observation& o, std::int64_t f) { return o.frame < f; });
    // Frames are strictly increasing, so completeness means n_frames
    // consecutive entries ending at frame_end - 1.
    const bool complete = static_cast<std::size_t>(track.end() - first) >= n_frames &&
                          first->frame == frame0 &&
                          first[static_cast<std::ptrdiff_t>(n_frames) - 1].frame == frame_end - 1;
    if (complete) {
      kept.emplace_back(id, &*first);
    } else {
      out.dropped_ids.push_back(id);
    }
  }
  out.kept = kept.size();
  out.dropped = out.dropped_ids.size();
  require(out.kept > 0, ErrorCode::empty_result,
          "window_ensemble: no agent is observed at every frame of the window");

  const std::size_t d = ts.dim();
  Ensemble ens(kept.size(), n_frames, d, static_cast<double>(frame0) * ts.frame_dt, ts.frame_dt);
  std::vector<std::int64_t> ids;
  for (std::size_t p = 0; p < kept.size(); ++p) {
    ids.push_back(kept[p].first);
    for (std::size_t s = 0; s < n_frames; ++s)
      for (std::size_t a = 0; a < d; ++a)
        ens.at(p, s, a) = kept[p].second[s].position[static_cast<Eigen::Index>(a)];
  }
  ens.set_ids(ids);
  out.ensemble = std::move(ens);
  return out;
}

TrackSet synth_crowd(std::uint64_t seed, std::size_t n_agents, std::size_t n_frames,
                     const std::string& scenario, double frame_dt) {
  require(n_agents >= 1, ErrorCode::invalid_argument, "synth_crowd: n_agents must be >= 1");
  require(n_frames >= 1, ErrorCode::invalid_argument, "synth_crowd: n_frames must be >= 1");
  require(frame_dt > 0.0, ErrorCode::invalid_argument, "synth_crowd: frame_dt must be positive");
  require(scenario == "platform", ErrorCode::invalid_argument,
          "synth_crowd: unknown scenario '" + scenario + "'");

  // Station concourse about 24 m x 12 m. Group 0 waits near the platform
  // edge, group 1 walks left to right along the lower lane, group 2 right to
  // left along the upper lane.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  TrackSet ts;
  ts.frame_dt = frame_dt;
  for (std::size_t i = 0; i < n_agents; ++i) {
    const int group = static_cast<int>(i * 3 / n_agents);
    const auto id = static_cast<std::int64_t>(i + 1);
    ts.labels[id] = group;

    Eigen::Vector2d pos;
    Eigen::Vector2d vel;
    if (group == 0) {
      pos = {12.0 + 1.5 * jitter(rng), 10.0 + 0.8 * jitter(rng)};
      vel = {0.0, 0.0};
    } else if (group == 1) {
      pos = {1.0 + 4.0 * unit(rng), 2.5 + 0.6 * jitter(rng)};
      vel = {1.1 + 0.1 * jitter(rng), 0.0};
    } else {
      pos = {19.0 + 4.0 * unit(rng), 6.0 + 0.6 * jitter(rng)};
      vel = {-1.1 - 0.1 * jitter(rng), 0.0};
    }

    auto& track = ts.tracks[id];
    for (std::size_t f = 0; f < n_frames; ++f) {
      Observation obs;
      obs.frame = static_cast<std::int64_t>(f);
      obs.position = pos;
      track.push_back(std::move(obs));
      const double step_sigma = group == 0 ? 0.05 : 0.03;
      pos += vel * frame_dt + step_sigma * Eigen::Vector2d(jitter(rng), jitter(rng));
    }
  }
  return ts;
}

}  // namespace cf
