#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hsm5/io.hpp"
#include "hsm5/optimizer.hpp"

namespace hsm5 {

struct SurfaceSpec {
  SurfaceKind kind = SurfaceKind::AnalyticSaddle;
  double a = 50.0;  // mm
  double b = 50.0;
  double c = 20.0;
  int degree_u = 1;
  int degree_v = 1;
  std::vector<Vec3> control_net;  // u-major

  ParametricSurface build() const;
};

struct OptimizationConfig {
  bool enabled = true;
  std::vector<double> candidates{1.0, 2.0, 3.0, 5.0, 8.0};
  double scallop_tol = 0.002;
  BlendHalfwidth halfwidth{1, 8};
  int max_iterations = 30;
  bool tighten = true;
};

struct OutputConfig {
  std::string dir = ".";
  std::string cl = "toolpath.cl";
  std::string nc = "program.nc";
  std::string report = "report.csv";
  std::string field = "field.csv";
  std::string summary = "summary.yaml";
};

struct JobConfig {
  SurfaceSpec surface;
  CutterGeometry tool;
  MachiningStrategy strategy;
  MachineModel machine;
  double feedrate = 5000.0;  // mm/min
  OptimizationConfig optimization;
  OutputConfig output;
};

/// Parses the YAML job description, applies defaults and validates it.
/// Unknown keys are rejected. Throws ConfigError carrying line/column.
JobConfig parse_config(const std::string& text);
JobConfig load_config(const std::string& path);

struct RunOptions {
  std::string out_dir;  // overrides output.dir when set
  bool optimize = true;
  std::size_t workers = 1;
  bool verbose = false;
  bool strict = false;
};

struct RunSummary {
  std::size_t paths = 0;
  std::size_t postures = 0;
  SaturationReport before;
  SaturationReport after;
  std::vector<int> deformed_rows;
  int iterations = 0;
  double time_programmed = 0.0;  // s
  double time_effective = 0.0;   // s
  double relative_length = 0.0;  // mm
  double max_scallop = 0.0;      // mm
  TightenResult tightening;
  int gouges = 0;
  int singular_blocks = 0;
  int out_of_range = 0;
  bool violations = false;  // residual saturation, scallop or gouges

  std::string text;  // summary file contents
};

/// Full pipeline: generate, solve, simulate, optionally optimize, and write
/// the CL, NC, report CSV, field CSV and summary under the output directory.
RunSummary run(const JobConfig& job, const RunOptions& options);

/// Solved joint blocks of a toolpath, ready for emit_gcode().
std::vector<JointBlockPath> joint_blocks(const KinematicProfile& profile);

/// Post-processes a CL file into an NC program (IKT and inverse time only).
std::string post_process(const ClFile& cl, const JobConfig& job, std::size_t workers = 1);

/// Kinematic profile of a CL or NC file.
KinematicProfile simulate_file(const std::string& path, const JobConfig& job, std::size_t workers = 1);

}  // namespace hsm5
