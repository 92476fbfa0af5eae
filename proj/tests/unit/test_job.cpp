#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hsm5/job.hpp"

using namespace hsm5;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(surface:
  kind: analytic-saddle
tool:
  R: 9
  r: 1
feedrate: 5000
)";

ConfigError config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected a config error");
  return ConfigError("");
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("minimal config takes defaults") {
  const JobConfig job = parse_config(kMinimal);
  CHECK(job.surface.kind == SurfaceKind::AnalyticSaddle);
  CHECK(job.surface.a == 50.0);
  CHECK(job.strategy.plane_angle == 45.0);
  CHECK(job.strategy.stepover == 2.0);
  CHECK(job.machine.va == 15.0);
  CHECK(job.machine.vc == 20.0);
  CHECK(job.machine.a.lo == -30.0);
  CHECK(job.feedrate == 5000.0);
  CHECK(job.optimization.candidates == std::vector<double>{1, 2, 3, 5, 8});
}

TEST_CASE("validation errors name the field") {
  std::string text = kMinimal;
  text.replace(text.find("feedrate: 5000"), 14, "feedrate: 0");
  const ConfigError e = config_error(text);
  CHECK(std::string(e.what()).find("feedrate") != std::string::npos);
  CHECK(e.line() == 6);

  CHECK(std::string(config_error("tool: {R: 9}\nfeedrate: 1\n").what()).find("surface") != std::string::npos);
  CHECK(std::string(config_error(std::string(kMinimal) + "machine:\n  velocity_limits:\n    C: -1\n").what())
            .find("machine.velocity_limits.C") != std::string::npos);
}

TEST_CASE("unknown keys are rejected with their position") {
  const ConfigError e = config_error(std::string(kMinimal) + "strategy:\n  stepover: 2\n  step_over: 3\n");
  CHECK(std::string(e.what()).find("strategy.step_over") != std::string::npos);
  CHECK(e.line() == 9);
  CHECK(e.column() == 3);
}

TEST_CASE("syntax errors carry line and column") {
  const ConfigError e = config_error("surface:\n  kind: [analytic-saddle\ntool: {R: 9}\n");
  CHECK(e.line() > 0);
  CHECK(e.column() > 0);
}

TEST_CASE("patch surface block") {
  const JobConfig job = parse_config(R"(surface:
  kind: tensor-polynomial-patch
  degree_u: 1
  degree_v: 1
  control_net:
    - [[0, 0, 0], [0, 10, 0]]
    - [[10, 0, 0], [10, 10, 1]]
tool: {R: 4, r: 2}
feedrate: 3000
)");
  const ParametricSurface s = job.surface.build();
  CHECK((s.evaluate(1, 1).p - Vec3(10, 10, 1)).norm() < 1e-12);
  CHECK_THROWS_AS(parse_config(R"(surface:
  kind: tensor-polynomial-patch
  degree_u: 2
  degree_v: 1
  control_net:
    - [[0, 0, 0], [0, 10, 0]]
    - [[10, 0, 0], [10, 10, 1]]
tool: {R: 4, r: 2}
feedrate: 3000
)"),
                  ConfigError);
}

TEST_CASE("saddle job file") {
  const JobConfig job = load_config(HSM5_SOURCE_DIR "/jobs/saddle.yaml");
  CHECK(job.tool.R == 9.0);
  CHECK(job.tool.r == 1.0);
  CHECK(job.strategy.base_tilt == 1.0);
  CHECK(job.strategy.plane_angle == 45.0);
  CHECK(job.feedrate == 5000.0);
  CHECK(job.machine.va == 15.0);
  CHECK(job.machine.vc == 20.0);
}

TEST_CASE("flat job runs clean") {
  const JobConfig job = load_config(HSM5_SOURCE_DIR "/jobs/flat_plane.yaml");
  const fs::path out = fs::temp_directory_path() / "hsm5_test_flat";
  fs::remove_all(out);
  RunOptions opt;
  opt.out_dir = out.string();
  const RunSummary s = run(job, opt);
  CHECK(s.before.saturated_blocks == 0);
  CHECK(s.after.saturated_blocks == 0);
  CHECK(s.time_effective == doctest::Approx(s.time_programmed).epsilon(1e-12));
  CHECK(std::abs(s.time_programmed * job.feedrate / 60.0 - s.relative_length) <= 1e-9 * s.relative_length);
  CHECK_FALSE(s.violations);
  for (const char* name : {"toolpath.cl", "program.nc", "report.csv", "field.csv", "summary.yaml"}) {
    CHECK(fs::exists(out / name));
  }
  const std::string csv = read(out / "report.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "path,sample,block_len_mm,dt_s,vx,vy,vz,vA_rpm,vC_rpm,sat_A,sat_C,F_eff");
  while (std::getline(lines, line)) CHECK(line.substr(line.rfind(',') + 1) == "5000.0000");
  fs::remove_all(out);
}
