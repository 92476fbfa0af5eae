// hsm5: plan / post / simulate front-end for the 5-axis HSM toolpath engine.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hsm5/job.hpp"
#include "hsm5/parallel.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitViolations = 5;

struct Flags {
  std::string config;
  std::string out_dir;
  bool no_optimize = false;
  std::size_t workers = 0;
  bool verbose = false;
  bool strict = false;
};

void add_common(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config, "job configuration file");
  cmd->add_option("--out-dir", flags.out_dir, "output directory (overrides output.dir)");
  cmd->add_flag("--no-optimize", flags.no_optimize, "skip the tilt optimization loop");
  cmd->add_option("--workers", flags.workers, "worker threads (default: logical cores)")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--verbose,-v", flags.verbose, "print the run summary");
  cmd->add_flag("--strict", flags.strict, "exit 5 on residual saturation, scallop or gouge violations");
}

std::size_t workers(const Flags& flags) { return flags.workers ? flags.workers : hsm5::default_workers(); }

fs::path out_dir(const Flags& flags, const hsm5::JobConfig& job) {
  fs::path dir = flags.out_dir.empty() ? fs::path(job.output.dir) : fs::path(flags.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw hsm5::Error(hsm5::ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

int cmd_plan(const Flags& flags) {
  const hsm5::JobConfig job = hsm5::load_config(flags.config);
  hsm5::RunOptions opt;
  opt.out_dir = flags.out_dir;
  opt.optimize = !flags.no_optimize;
  opt.workers = workers(flags);
  opt.verbose = flags.verbose;
  opt.strict = flags.strict;
  const hsm5::RunSummary s = hsm5::run(job, opt);
  if (flags.verbose) std::cout << s.text;
  std::cerr << "plan: " << s.paths << " paths, " << s.postures << " postures, saturated blocks "
            << s.before.saturated_blocks << " -> " << s.after.saturated_blocks << "\n";
  return flags.strict && s.violations ? kExitViolations : 0;
}

int cmd_post(const std::string& clfile, const Flags& flags) {
  const hsm5::JobConfig job = hsm5::load_config(flags.config);
  std::ifstream in(clfile);
  if (!in) throw hsm5::Error(hsm5::ErrorKind::Io, "cannot read " + clfile);
  const hsm5::ClFile cl = hsm5::read_cl(in);
  const std::string nc = hsm5::post_process(cl, job, workers(flags));
  const fs::path path = out_dir(flags, job) / job.output.nc;
  write_text(path, nc);
  if (flags.verbose) std::cout << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_simulate(const std::string& file, const Flags& flags) {
  const hsm5::JobConfig job = hsm5::load_config(flags.config);
  const hsm5::KinematicProfile profile = hsm5::simulate_file(file, job, workers(flags));
  const hsm5::SaturationReport sat = hsm5::saturation(profile, job.machine);
  std::ostringstream csv;
  hsm5::write_report_csv(csv, profile);
  const fs::path path = out_dir(flags, job) / job.output.report;
  write_text(path, csv.str());

  std::ostringstream os;
  os << "blocks: " << sat.total_blocks << "\n";
  for (hsm5::Axis a : hsm5::kAllAxes) {
    os << "saturated_" << hsm5::axis_name(a) << ": " << sat[a].blocks << " (max " << hsm5::fixed(sat[a].max_abs, 4)
       << ", limit " << hsm5::fixed(sat[a].limit, 4) << ")\n";
  }
  os << "time_programmed_s: " << hsm5::fixed(profile.time_programmed, 6) << "\n";
  os << "time_effective_s: " << hsm5::fixed(profile.time_effective, 6) << "\n";
  std::cout << os.str();
  return flags.strict && sat.saturated_blocks > 0 ? kExitViolations : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"5-axis HSM toolpath planner, post-processor and kinematic simulator", "hsm5"};
  app.require_subcommand(1);

  Flags flags;
  std::string input;
  std::string config_pos;

  auto* plan = app.add_subcommand("plan", "full pipeline: generate, solve, simulate, optimize, emit");
  plan->add_option("job", config_pos, "job configuration file");
  add_common(plan, flags);

  auto* post = app.add_subcommand("post", "post-process a CL file into an ISO 6983 program");
  post->add_option("clfile", input, "CL file")->required();
  post->add_option("job", config_pos, "job configuration file");
  add_common(post, flags);

  auto* sim = app.add_subcommand("simulate", "kinematic profile of an NC or CL file");
  sim->add_option("file", input, "NC or CL file")->required();
  sim->add_option("job", config_pos, "job configuration file");
  add_common(sim, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (flags.config.empty()) flags.config = config_pos;
  if (flags.config.empty()) {
    std::cerr << "error: a job configuration is required (positional or --config)\n";
    return 2;
  }

  try {
    if (*plan) return cmd_plan(flags);
    if (*post) return cmd_post(input, flags);
    return cmd_simulate(input, flags);
  } catch (const hsm5::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hsm5::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
