#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "coherentflow/integrator.hpp"

namespace cf {

struct Observation {
  std::int64_t frame = 0;
  Eigen::VectorXd position;

  bool operator==(const Observation& o) const {
    return frame == o.frame && position == o.position;
  }
};

/// Observed agent tracks keyed by agent id; each track sorted by frame.
struct TrackSet {
  std::map<std::int64_t, std::vector<Observation>> tracks;
  double frame_dt = 1.0;
  /// Optional per-agent group labels (synthetic fixtures only).
  std::map<std::int64_t, int> labels;

  std::size_t dim() const;
  void validate() const;
  bool operator==(const TrackSet&) const = default;
};

/// CSV `frame,agent_id,x,y[,z]`; rows in any order.
TrackSet read_tracks(const std::filesystem::path& path, double frame_dt);
void write_tracks(const TrackSet& ts, const std::filesystem::path& path);

/// CSV `agent_id,label` for TrackSet::labels.
void write_track_labels(const TrackSet& ts, const std::filesystem::path& path);

struct WindowedEnsemble {
  Ensemble ensemble;  ///< ids are agent ids
  std::size_t kept = 0;
  std::size_t dropped = 0;
  std::vector<std::int64_t> dropped_ids;
};

/// Agents observed at every frame of [frame0, frame0 + n_frames) become
/// particles; the rest are dropped and counted.
WindowedEnsemble window_ensemble(const TrackSet& ts, std::int64_t frame0, std::size_t n_frames);

/// Deterministic synthetic crowd. Scenario "platform": a lingering group, a
/// left-to-right stream and a right-to-left stream, in equal thirds.
TrackSet synth_crowd(std::uint64_t seed, std::size_t n_agents, std::size_t n_frames,
                     const std::string& scenario, double frame_dt = 0.4);

}  // namespace cf
