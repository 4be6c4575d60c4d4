#include <filesystem>
#include <fstream>
#include <random>

#include "coherentflow/error.hpp"
#include "coherentflow/io.hpp"
#include "coherentflow/text.hpp"
#include "doctest.h"

using namespace cf;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "coherentflow_unit";
  fs::create_directories(dir);
  return dir / name;
}

Ensemble random_ensemble(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Ensemble e(7, 5, 2, 0.5, 0.1);
  for (double& v : e.raw()) v = g(rng);
  e.set_ids({10, 3, 99, 4, 5, 6, -2});
  return e;
}

}  // namespace

TEST_CASE("shortest round-trip number formatting") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(i % 20) - 10);
    CHECK(parse_double(format_double(v), "test") == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK_THROWS_AS(parse_double("1.5x", "here"), Error);
  CHECK_THROWS_AS(parse_int("3.0", "here"), Error);
  CHECK(parse_int(" 42 ", "here") == 42);
  CHECK(split_csv("a, b,,c") == std::vector<std::string>{"a", "b", "", "c"});
}

TEST_CASE("ensemble csv and binary round trip") {
  const Ensemble e = random_ensemble(72);
  write_ensemble_csv(e, scratch("e.csv"));
  const Ensemble c = read_ensemble_csv(scratch("e.csv"));
  CHECK(c.raw() == e.raw());
  CHECK(c.ids() == e.ids());
  CHECK(c.t0() == e.t0());
  CHECK(c.dt_out() == doctest::Approx(e.dt_out()).epsilon(1e-14));

  write_ensemble_binary(e, scratch("e.cfe"));
  const Ensemble b = read_ensemble_binary(scratch("e.cfe"));
  CHECK(b.raw() == e.raw());
  CHECK(b.particles() == 7);
  CHECK(b.steps() == 5);
  CHECK(b.dt_out() == e.dt_out());

  std::ofstream(scratch("junk.cfe")) << "CFE0 nope";
  CHECK_THROWS_AS(read_ensemble_binary(scratch("junk.cfe")), Error);
  std::ofstream(scratch("bad.csv")) << "id,step,t,x0\n";
  CHECK_THROWS_AS(read_ensemble_csv(scratch("bad.csv")), Error);
}

TEST_CASE("labels round trip and reorder by id") {
  const Labeling l{{2, 0, 1, 1}, 3};
  write_labels_csv(l, {40, 10, 30, 20}, scratch("l.csv"));
  CHECK(read_labels_csv(scratch("l.csv")) == l);
  const Labeling r = read_labels_csv(scratch("l.csv"), {10, 20, 30, 40});
  CHECK(r.labels == std::vector<int>{0, 1, 1, 2});
  CHECK_THROWS_AS(read_labels_csv(scratch("l.csv"), {10, 20, 30, 41}), Error);
}

TEST_CASE("score report json round trip and table") {
  ScoreReport rep;
  rep.method = "online";
  rep.environment = "double_gyre";
  rep.per_step = {{0.1, 0.5, 0.6, 0.7, 0.65}, {0.2, 0.9, 0.8, 0.85, 0.82}};
  rep.averaged = {2, 0.7, 0.7, 0.775, 0.735};
  const ScoreReport back = parse_score_report_json(score_report_json(rep));
  CHECK(back.method == rep.method);
  CHECK(back.per_step.size() == 2);
  CHECK(back.per_step[1].v_measure == 0.82);
  CHECK(back.averaged.rand_adjusted == 0.7);
  CHECK(score_report_json(back) == score_report_json(rep));
  const std::string table = score_table({rep});
  CHECK(table.find("Online") != std::string::npos);
  CHECK(table.find("0.700") != std::string::npos);
  CHECK_THROWS_AS(parse_score_report_json("{\"method\": 1}"), Error);
}

TEST_CASE("sha256 of known content") {
  write_text(scratch("abc.txt"), "abc");
  CHECK(sha256_file(scratch("abc.txt")) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  write_text(scratch("empty.txt"), "");
  CHECK(sha256_file(scratch("empty.txt")) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(read_text(scratch("abc.txt")) == "abc");
}
