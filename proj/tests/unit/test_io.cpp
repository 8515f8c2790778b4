#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "clo/harness.hpp"
#include "clo/io.hpp"
#include "clo/scenario.hpp"

using namespace clo;
namespace fs = std::filesystem;

TEST_SUITE("io") {

TEST_CASE("format_double") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(std::nan("")) == "");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("frames CSV round trip") {
  auto c = default_scenario();
  c.run.slots = 1000;
  c.run.converged_window = 100;
  c.network.defaults.user.delay_frames = 2;
  const auto m = run_scenario(c, 9);
  std::stringstream s;
  write_frames_csv(s, m);
  const auto got = read_frames_csv(s);
  const auto want = user_histories(m);
  REQUIRE(got.size() == want.size());
  for (std::size_t k = 0; k < got.size(); ++k) {
    CHECK(got[k].id == want[k].id);
    CHECK(got[k].target == want[k].target);
    CHECK(got[k].learning_rate == want[k].learning_rate);
    CHECK(got[k].theta0 == want[k].theta0);
    CHECK(got[k].delay == 2);
    CHECK(got[k].theta == want[k].theta);
    CHECK(got[k].frames == want[k].frames);
  }
  CHECK(certificate_check(got).pass);
}

TEST_CASE("malformed frames CSV") {
  std::stringstream empty;
  CHECK_THROWS_AS(read_frames_csv(empty), std::runtime_error);
  std::stringstream junk("frame,user\n1,x\n");
  CHECK_THROWS_AS(read_frames_csv(junk), std::runtime_error);
}

TEST_CASE("write_run") {
  auto c = default_scenario();
  c.run.slots = 200;
  c.run.converged_window = 100;
  const auto m = run_scenario(c, 1);
  CHECK(run_prefix(m) == "single_hop_clo_seed1");
  const auto dir = fs::temp_directory_path() / "clo_io_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto paths = write_run(dir.string(), m);
  CHECK(paths.size() == 3);
  for (const auto& p : paths) CHECK(fs::file_size(p) > 0);
  const auto j = run_summary(m, 100);
  CHECK(j.contains("users"));
  const std::vector<RunMetrics> runs{m};
  CHECK(batch_summary(c, runs).is_object());
  fs::remove_all(dir);
}

}
