#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>

#include "helpers.hpp"
#include "ves/io.hpp"

using namespace ves;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("ves_io_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("curve snapshot round trip is exact") {
  std::mt19937 rng(61);
  const GeneratingCurve c = test::random_curve(rng, 20, 0.05);
  TempDir tmp;
  write_curve(tmp.file("c.curve"), c);
  const GeneratingCurve c2 = read_curve(tmp.file("c.curve"));
  REQUIRE(c2.kv.knots.size() == c.kv.knots.size());
  for (std::size_t i = 0; i < c.kv.knots.size(); ++i)
    CHECK(c2.kv.knots[i] == c.kv.knots[i]);
  for (int i = 0; i < 20; ++i) {
    CHECK(c2.r[i] == c.r[i]);  // max_digits10 makes the round trip exact
    CHECK(c2.z[i] == c.z[i]);
  }
}

TEST_CASE("checkpoint round trip") {
  std::mt19937 rng(62);
  Checkpoint cp;
  cp.curve = test::random_curve(rng, 16, 0.05);
  cp.t = 0.123456789012345;
  cp.spec_hash = "model-A-n16";
  TempDir tmp;
  write_checkpoint(tmp.file("x.chk"), cp);
  const Checkpoint cp2 = read_checkpoint(tmp.file("x.chk"));
  CHECK(cp2.t == cp.t);
  CHECK(cp2.spec_hash == cp.spec_hash);
  for (int i = 0; i < 16; ++i) {
    CHECK(cp2.curve.r[i] == cp.curve.r[i]);
    CHECK(cp2.curve.z[i] == cp.curve.z[i]);
  }

  Checkpoint empty_hash;
  empty_hash.curve = cp.curve;
  empty_hash.t = 1.0;
  write_checkpoint(tmp.file("y.chk"), empty_hash);
  CHECK(read_checkpoint(tmp.file("y.chk")).spec_hash.empty());
}

TEST_CASE("malformed files are rejected") {
  TempDir tmp;
  {
    std::ofstream os(tmp.file("bad.curve"));
    os << "not-a-curve 1\n";
  }
  CHECK_THROWS(read_curve(tmp.file("bad.curve")));
  CHECK_THROWS(read_curve(tmp.file("missing.curve")));
  CHECK_THROWS(read_checkpoint(tmp.file("bad.curve")));
}

TEST_CASE("config parsing: comments, whitespace, key=value") {
  TempDir tmp;
  {
    std::ofstream os(tmp.file("run.cfg"));
    os << "# relaxation run\n"
       << "model = A\n"
       << "  size=2.5   # trailing comment\n"
       << "n_ctrl\t=\t40\n"
       << "\n"
       << "not a key value line\n"
       << "out_dir = results/run1\n";
  }
  const Config cfg = read_config(tmp.file("run.cfg"));
  CHECK(cfg.at("model") == "A");
  CHECK(cfg.at("size") == "2.5");
  CHECK(cfg.at("n_ctrl") == "40");
  CHECK(cfg.at("out_dir") == "results/run1");
  CHECK(cfg.size() == 4);
}

TEST_CASE("frames CSV schema") {
  Trajectory traj;
  TrajectoryFrame fr;
  fr.t = 0.5;
  fr.energy = 25.1;
  fr.dissipation = 1.5;
  fr.volume = 4.1;
  fr.area = 12.5;
  fr.lambda_max = 0.7;
  traj.frames.push_back(fr);
  fr.t = 1.0;
  fr.has_eigs = true;
  fr.mobility_eigs = {3.0, 2.0, 1.0};
  traj.frames.push_back(fr);
  TempDir tmp;
  write_frames_csv(tmp.file("frames.csv"), traj);
  std::ifstream is(tmp.file("frames.csv"));
  std::string header;
  std::getline(is, header);
  CHECK(header == "t,energy,dissipation,volume,area,lambda_max,eig1,eig2,eig3");
  std::string l1, l2;
  std::getline(is, l1);
  std::getline(is, l2);
  CHECK(l1.substr(l1.size() - 6) == ",0,0,0");
  CHECK(l2.find(",3,2,1") != std::string::npos);
}

TEST_CASE("sweep CSV schema") {
  std::vector<SweepRow> rows{{0.5, 1.25, "membrane"}, {8.0, 250.0, "bulk"}};
  TempDir tmp;
  write_sweep_csv(tmp.file("sweep.csv"), rows);
  std::ifstream is(tmp.file("sweep.csv"));
  std::string header, l1, l2;
  std::getline(is, header);
  CHECK(header == "R0,t_relax,regime");
  std::getline(is, l1);
  std::getline(is, l2);
  CHECK(l1 == "0.5,1.25,membrane");
  CHECK(l2 == "8,250,bulk");
}
