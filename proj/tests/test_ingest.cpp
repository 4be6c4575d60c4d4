#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "coherentflow/error.hpp"
#include "coherentflow/ingest.hpp"
#include "doctest.h"

using namespace cf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "coherentflow_unit";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("read a small track file") {
  const fs::path p = scratch("small.csv");
  write(p, "frame,agent_id,x,y\n0,1,0.0,0.0\n1,1,0.5,0.0\n2,1,1.0,0.0\n0,2,3,3\n1,2,3,2.5\n2,2,3,2\n");
  const TrackSet ts = read_tracks(p, 0.4);
  CHECK(ts.tracks.size() == 2);
  CHECK(ts.tracks.at(1).size() == 3);
  CHECK(ts.tracks.at(2).size() == 3);
  CHECK(ts.dim() == 2);
  CHECK(ts.frame_dt == 0.4);
  CHECK(ts.tracks.at(2)[1].position[1] == 2.5);

  const fs::path q = scratch("shuffled.csv");
  write(q, "frame,agent_id,x,y\n2,2,3,2\n1,1,0.5,0.0\n0,2,3,3\n2,1,1.0,0.0\n0,1,0.0,0.0\n1,2,3,2.5\n");
  CHECK(read_tracks(q, 0.4) == ts);
}

TEST_CASE("duplicate observations name both lines") {
  const fs::path p = scratch("dup.csv");
  write(p, "frame,agent_id,x,y\n4,2,0,0\n5,2,1,1\n6,2,2,2\n5,2,9,9\n");
  try {
    read_tracks(p, 1.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::duplicate_observation);
    const std::string msg = e.what();
    CHECK(msg.find(":5") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
  }
}

TEST_CASE("malformed track files") {
  const fs::path p = scratch("bad.csv");
  write(p, "frame,agent,x,y\n0,1,0,0\n");
  CHECK_THROWS_AS(read_tracks(p, 1.0), Error);
  write(p, "frame,agent_id,x,y\n0,1,zero,0\n");
  CHECK_THROWS_AS(read_tracks(p, 1.0), Error);
  write(p, "frame,agent_id,x,y\n0,1,0\n");
  CHECK_THROWS_AS(read_tracks(p, 1.0), Error);
  CHECK_THROWS_AS(read_tracks(scratch("missing.csv"), 1.0), Error);
  CHECK_THROWS_AS(read_tracks(p, 0.0), Error);
}

TEST_CASE("three-dimensional tracks") {
  const fs::path p = scratch("xyz.csv");
  write(p, "frame,agent_id,x,y,z\n0,7,1,2,3\n1,7,1,2,4\n");
  const TrackSet ts = read_tracks(p, 1.0);
  CHECK(ts.dim() == 3);
  const auto w = window_ensemble(ts, 0, 2);
  CHECK(w.ensemble.dim() == 3);
  CHECK(w.ensemble.at(0, 1, 2) == 4.0);
}

TEST_CASE("round trip preserves the track set") {
  TrackSet ts = synth_crowd(3, 30, 12, "platform");
  const fs::path p = scratch("roundtrip.csv");
  write_tracks(ts, p);
  TrackSet back = read_tracks(p, ts.frame_dt);
  ts.labels.clear();
  CHECK(back == ts);
}

TEST_CASE("windowing keeps complete agents only") {
  TrackSet ts = synth_crowd(4, 12, 10, "platform");
  auto all = window_ensemble(ts, 0, 10);
  CHECK(all.kept == 12);
  CHECK(all.dropped == 0);
  CHECK(all.ensemble.particles() == 12);
  CHECK(all.ensemble.steps() == 10);

  auto& track = ts.tracks.at(5);
  track.erase(track.begin() + 4);
  auto some = window_ensemble(ts, 0, 10);
  CHECK(some.kept == 11);
  CHECK(some.dropped == 1);
  CHECK(some.dropped_ids == std::vector<std::int64_t>{5});
  CHECK(std::find(some.ensemble.ids().begin(), some.ensemble.ids().end(), 5) == some.ensemble.ids().end());
  // A window that skips the hole keeps everyone.
  CHECK(window_ensemble(ts, 5, 5).kept == 12);
  CHECK_THROWS_AS(window_ensemble(ts, 20, 5), Error);
}

TEST_CASE("windowing never invents positions") {
  const TrackSet ts = synth_crowd(5, 20, 15, "platform");
  const auto w = window_ensemble(ts, 3, 8);
  for (std::size_t p = 0; p < w.ensemble.particles(); ++p) {
    const auto& track = ts.tracks.at(w.ensemble.ids()[p]);
    for (std::size_t s = 0; s < w.ensemble.steps(); ++s) {
      bool found = false;
      for (const auto& o : track)
        if (o.position[0] == w.ensemble.at(p, s, 0) && o.position[1] == w.ensemble.at(p, s, 1))
          found = true;
      CHECK(found);
    }
  }
  CHECK(w.ensemble.t0() == doctest::Approx(3 * ts.frame_dt));
}

TEST_CASE("synthetic crowd") {
  const TrackSet a = synth_crowd(9, 60, 20, "platform");
  const TrackSet b = synth_crowd(9, 60, 20, "platform");
  CHECK(a == b);
  CHECK_FALSE(a == synth_crowd(10, 60, 20, "platform"));
  CHECK(a.tracks.size() == 60);
  std::map<int, int> sizes;
  for (const auto& [id, label] : a.labels) ++sizes[label];
  CHECK(sizes.size() == 3);
  for (const auto& [label, count] : sizes) CHECK(count == 20);

  const TrackSet paper_size = synth_crowd(1, 116, 51, "platform");
  CHECK(window_ensemble(paper_size, 0, 51).ensemble.particles() == 116);
  CHECK_THROWS_AS(synth_crowd(1, 10, 10, "stadium"), Error);
}
