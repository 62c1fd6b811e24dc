#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "manial/trace.hpp"

namespace {

using namespace manial;

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct FileGuard {
  std::string path;
  ~FileGuard() { std::remove(path.c_str()); }
};

std::vector<TraceRecord> sample_rows() {
  std::vector<TraceRecord> rows(3);
  rows[0].k = 0;
  rows[0].oracle_calls = 5;
  rows[0].wall_seconds = 0.125;
  rows[0].objective = -1.5;
  rows[0].eta_p = 0.25;
  rows[0].eta_d = 1e-3;
  rows[0].eta_c = 2.5e-17;
  rows[0].sigma = 1.0;
  rows[0].beta = 0.6931471805599453;
  rows[0].z_norm = 0.0;
  rows[0].inner_iters = 2;
  rows[0].flags = "cap;G";
  rows[0].prox_calls = 7;
  rows[0].retraction_calls = 2;

  rows[1].k = 1;
  rows[1].oracle_calls = 17;
  rows[1].wall_seconds = 0.5;
  rows[1].objective = -2.0 / 3.0;
  rows[1].eta_p = 1e-300;
  rows[1].sigma = 2.0;
  rows[1].beta = 1.0;
  rows[1].z_norm = 3.141592653589793;
  rows[1].inner_iters = 4;
  rows[1].prox_calls = 9;
  rows[1].retraction_calls = 6;

  rows[2].k = 2;
  rows[2].oracle_calls = 33;
  rows[2].objective = 0.1;
  rows[2].sigma = 4.0;
  rows[2].flags = "surrogate";
  return rows;
}

}  // namespace

TEST_SUITE("trace") {

TEST_CASE("trace files round-trip every field exactly") {
  FileGuard guard{temp_file("manial_trace_roundtrip.csv")};
  const std::vector<TraceRecord> rows = sample_rows();
  write_trace_csv(guard.path, rows);

  const std::string text = slurp(guard.path);
  CHECK(text.rfind(std::string(kTraceCsvHeader) + "\n", 0) == 0);

  std::vector<TraceRecord> back = read_trace_csv(guard.path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].k == rows[i].k);
    CHECK(back[i].oracle_calls == rows[i].oracle_calls);
    CHECK(back[i].wall_seconds == rows[i].wall_seconds);
    CHECK(back[i].objective == rows[i].objective);
    CHECK(back[i].eta_p == rows[i].eta_p);
    CHECK(back[i].eta_d == rows[i].eta_d);
    CHECK(back[i].eta_c == rows[i].eta_c);
    CHECK(back[i].sigma == rows[i].sigma);
    CHECK(back[i].beta == rows[i].beta);
    CHECK(back[i].z_norm == rows[i].z_norm);
    CHECK(back[i].inner_iters == rows[i].inner_iters);
    CHECK(back[i].flags == rows[i].flags);
    CHECK(back[i].prox_calls == rows[i].prox_calls);
    CHECK(back[i].retraction_calls == rows[i].retraction_calls);
  }

  // An empty row list still writes a parseable header-only file.
  write_trace_csv(guard.path, {});
  CHECK(read_trace_csv(guard.path).empty());
}

TEST_CASE("disabling timing zeroes the only nondeterministic column") {
  FileGuard a{temp_file("manial_trace_timing_a.csv")};
  FileGuard b{temp_file("manial_trace_timing_b.csv")};

  std::vector<TraceRecord> first = sample_rows();
  std::vector<TraceRecord> second = sample_rows();
  second[0].wall_seconds = 99.5;
  second[1].wall_seconds = 123.25;

  write_trace_csv(a.path, first, false);
  write_trace_csv(b.path, second, false);
  CHECK(slurp(a.path) == slurp(b.path));

  std::vector<TraceRecord> back = read_trace_csv(a.path);
  for (const TraceRecord& r : back) CHECK(r.wall_seconds == 0.0);

  // With timing on, the same rows differ in that column only.
  write_trace_csv(a.path, first, true);
  std::vector<TraceRecord> timed = read_trace_csv(a.path);
  CHECK(timed[0].wall_seconds == 0.125);
}

TEST_CASE("flags column refuses commas") {
  FileGuard guard{temp_file("manial_trace_flagcomma.csv")};
  std::vector<TraceRecord> rows(1);
  rows[0].flags = "cap,G";
  CHECK_THROWS_AS(write_trace_csv(guard.path, rows), std::invalid_argument);
}

TEST_CASE("trace reader names the offending line") {
  FileGuard guard{temp_file("manial_trace_bad.csv")};

  CHECK_THROWS_WITH_AS(read_trace_csv(temp_file("manial_trace_absent.csv")),
                       doctest::Contains("cannot open"), std::runtime_error);

  std::ofstream(guard.path) << "";
  CHECK_THROWS_WITH_AS(read_trace_csv(guard.path), doctest::Contains("empty"),
                       std::runtime_error);

  std::ofstream(guard.path) << "not,a,header\n";
  CHECK_THROWS_WITH_AS(read_trace_csv(guard.path), doctest::Contains("line 1"),
                       std::runtime_error);

  std::ofstream(guard.path) << kTraceCsvHeader << "\n1,2,3\n";
  CHECK_THROWS_WITH_AS(read_trace_csv(guard.path), doctest::Contains("line 2"),
                       std::runtime_error);

  std::ofstream(guard.path) << kTraceCsvHeader
                            << "\n0,5,0,0,0,0,0,1,1,0,2,ok,7,2"
                            << "\nx,5,0,0,0,0,0,1,1,0,2,ok,7,2\n";
  CHECK_THROWS_WITH_AS(read_trace_csv(guard.path), doctest::Contains("line 3"),
                       std::runtime_error);

  std::ofstream(guard.path) << kTraceCsvHeader << "\n0,5,zz,0,0,0,0,1,1,0,2,ok,7,2\n";
  CHECK_THROWS_WITH_AS(read_trace_csv(guard.path), doctest::Contains("bad number"),
                       std::runtime_error);
}

TEST_CASE("trace reader tolerates blank trailing lines and empty flags") {
  FileGuard guard{temp_file("manial_trace_tolerant.csv")};
  std::ofstream(guard.path) << kTraceCsvHeader << "\n0,5,0,0.5,0,0,0,1,1,0,2,,7,2\n\n";
  std::vector<TraceRecord> rows = read_trace_csv(guard.path);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].flags.empty());
  CHECK(rows[0].objective == 0.5);
}

}  // TEST_SUITE
