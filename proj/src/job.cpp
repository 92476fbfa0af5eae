#include "hsm5/job.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hsm5/parallel.hpp"

namespace hsm5 {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& field, const std::string& why, const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  const int line = mark.is_null() ? 0 : mark.line + 1;
  const int col = mark.is_null() ? 0 : mark.column + 1;
  std::ostringstream os;
  os << field << ": " << why;
  if (line > 0) os << " (line " << line << ", column " << col << ")";
  throw ConfigError(os.str(), line, col);
}

// A mapping node whose keys are consumed explicitly; leftovers are errors.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) fail(path_, "expected a mapping", node_);
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_ && node_.IsMap() && node_[key] && !node_[key].IsNull();
  }
  YAML::Node get(const std::string& key) {
    seen_.insert(key);
    return node_ && node_.IsMap() ? node_[key] : YAML::Node();
  }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return as_number(get(key), field(key));
  }
  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const YAML::Node n = get(key);
    try {
      return n.as<int>();
    } catch (const YAML::Exception&) {
      fail(field(key), "expected an integer", n);
    }
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const YAML::Node n = get(key);
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(field(key), "expected true or false", n);
    }
  }
  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const YAML::Node n = get(key);
    if (!n.IsScalar()) fail(field(key), "expected a string", n);
    return n.Scalar();
  }
  Section section(const std::string& key) { return Section(get(key), field(key)); }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!seen_.count(key)) fail(field(key), "unknown key", kv.first);
    }
  }

  static double as_number(const YAML::Node& n, const std::string& field) {
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      fail(field, "expected a number", n);
    }
  }

  static Vec3 as_vec3(const YAML::Node& n, const std::string& field) {
    if (!n.IsSequence() || n.size() != 3) fail(field, "expected [x, y, z]", n);
    return Vec3(as_number(n[0], field), as_number(n[1], field), as_number(n[2], field));
  }

  static Interval as_interval(const YAML::Node& n, const std::string& field) {
    if (!n.IsSequence() || n.size() != 2) fail(field, "expected [min, max]", n);
    Interval i{as_number(n[0], field), as_number(n[1], field)};
    if (!(i.lo <= i.hi)) fail(field, "empty range", n);
    return i;
  }

  const YAML::Node& node() const { return node_; }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require_positive(double value, const std::string& field, const YAML::Node& node) {
  if (!(value > 0.0)) fail(field, "must be > 0", node);
}

SurfaceSpec parse_surface(Section s) {
  SurfaceSpec spec;
  const std::string kind = s.string("kind", "analytic-saddle");
  if (kind == "analytic-saddle") {
    spec.kind = SurfaceKind::AnalyticSaddle;
    spec.a = s.number("a", spec.a);
    spec.b = s.number("b", spec.b);
    spec.c = s.number("c", spec.c);
    require_positive(spec.a, s.field("a"), s.get("a"));
    require_positive(spec.b, s.field("b"), s.get("b"));
  } else if (kind == "tensor-polynomial-patch") {
    spec.kind = SurfaceKind::TensorPolynomialPatch;
    spec.degree_u = s.integer("degree_u", 1);
    spec.degree_v = s.integer("degree_v", 1);
    if (spec.degree_u < 1) fail(s.field("degree_u"), "must be >= 1", s.get("degree_u"));
    if (spec.degree_v < 1) fail(s.field("degree_v"), "must be >= 1", s.get("degree_v"));
    if (!s.has("control_net")) fail(s.field("control_net"), "required for a patch", s.node());
    const YAML::Node net = s.get("control_net");
    const std::string field = s.field("control_net");
    if (!net.IsSequence() || static_cast<int>(net.size()) != spec.degree_u + 1) {
      fail(field, "expected degree_u + 1 rows", net);
    }
    for (const auto& row : net) {
      if (!row.IsSequence() || static_cast<int>(row.size()) != spec.degree_v + 1) {
        fail(field, "expected degree_v + 1 points per row", row);
      }
      for (const auto& pt : row) spec.control_net.push_back(Section::as_vec3(pt, field));
    }
  } else {
    fail(s.field("kind"), "expected analytic-saddle or tensor-polynomial-patch", s.get("kind"));
  }
  s.finish();
  return spec;
}

MachineModel parse_machine(Section s) {
  MachineModel m;
  Section ranges = s.section("ranges");
  auto range = [&](const char* key, Interval& out) {
    if (ranges.has(key)) out = Section::as_interval(ranges.get(key), ranges.field(key));
  };
  range("X", m.x);
  range("Y", m.y);
  range("Z", m.z);
  range("A", m.a);
  if (ranges.has("C")) m.c = Section::as_interval(ranges.get("C"), ranges.field("C"));
  ranges.finish();

  Section limits = s.section("velocity_limits");
  auto limit = [&](const char* key, double& out) {
    out = limits.number(key, out);
    if (limits.has(key)) require_positive(out, limits.field(key), limits.get(key));
  };
  limit("X", m.vx);
  limit("Y", m.vy);
  limit("Z", m.vz);
  limit("A", m.va);
  limit("C", m.vc);
  limits.finish();

  Section offsets = s.section("offsets");
  if (offsets.has("o_CA")) m.o_ca = Section::as_vec3(offsets.get("o_CA"), offsets.field("o_CA"));
  if (offsets.has("o_AM")) m.o_am = Section::as_vec3(offsets.get("o_AM"), offsets.field("o_AM"));
  offsets.finish();

  Section setup = s.section("part_setup");
  Vec3 position = Vec3::Zero(), rotation = Vec3::Zero();
  if (setup.has("position")) position = Section::as_vec3(setup.get("position"), setup.field("position"));
  if (setup.has("rotation_deg")) rotation = Section::as_vec3(setup.get("rotation_deg"), setup.field("rotation_deg"));
  setup.finish();
  m.part_setup = RigidTransform::from_position_rotation(position, rotation);

  m.singularity_threshold = s.number("singularity_threshold_deg", m.singularity_threshold);
  if (m.singularity_threshold < 0.0) {
    fail(s.field("singularity_threshold_deg"), "must be >= 0", s.get("singularity_threshold_deg"));
  }
  s.finish();
  return m;
}

MachiningStrategy parse_strategy(Section s) {
  MachiningStrategy st;
  st.plane_angle = s.number("plane_angle", st.plane_angle);
  st.stepover = s.number("stepover", st.stepover);
  st.chord_tol = s.number("chord_tol", st.chord_tol);
  st.max_sample_spacing = s.number("max_sample_spacing", st.max_sample_spacing);
  st.base_tilt = s.number("base_tilt", st.base_tilt);
  st.base_yaw = s.number("base_yaw", st.base_yaw);
  st.scallop_tol = s.number("scallop_tol", st.scallop_tol);
  st.tilt_min = s.number("tilt_min", st.tilt_min);
  st.tilt_max = s.number("tilt_max", st.tilt_max);
  st.zigzag = s.boolean("zigzag", st.zigzag);
  st.field_columns = s.integer("field_columns", st.field_columns);
  for (const char* key : {"stepover", "chord_tol", "max_sample_spacing", "scallop_tol"}) {
    if (s.has(key)) require_positive(s.number(key, 1.0), s.field(key), s.get(key));
  }
  if (st.field_columns < 0 || st.field_columns == 1) {
    fail(s.field("field_columns"), "must be 0 or >= 2", s.get("field_columns"));
  }
  if (!(st.tilt_min <= st.tilt_max)) fail(s.field("tilt_min"), "must not exceed tilt_max", s.get("tilt_min"));
  if (st.base_tilt < st.tilt_min || st.base_tilt > st.tilt_max || st.base_tilt >= 90.0) {
    fail(s.field("base_tilt"), "outside [tilt_min, tilt_max]", s.get("base_tilt"));
  }
  s.finish();
  return st;
}

OptimizationConfig parse_optimization(Section s, double default_scallop) {
  OptimizationConfig o;
  o.scallop_tol = default_scallop;
  o.enabled = s.boolean("enabled", o.enabled);
  if (s.has("candidates")) {
    const YAML::Node n = s.get("candidates");
    if (!n.IsSequence() || n.size() == 0) fail(s.field("candidates"), "expected a non-empty list", n);
    o.candidates.clear();
    for (const auto& c : n) o.candidates.push_back(Section::as_number(c, s.field("candidates")));
    if (!std::is_sorted(o.candidates.begin(), o.candidates.end())) {
      fail(s.field("candidates"), "must be sorted ascending", n);
    }
  }
  o.scallop_tol = s.number("scallop_tol", o.scallop_tol);
  if (s.has("scallop_tol")) require_positive(o.scallop_tol, s.field("scallop_tol"), s.get("scallop_tol"));
  if (s.has("blend_halfwidth")) {
    const YAML::Node n = s.get("blend_halfwidth");
    if (n.IsScalar()) {
      o.halfwidth = BlendHalfwidth(n.as<int>());
    } else {
      Section hw(n, s.field("blend_halfwidth"));
      o.halfwidth.paths = hw.integer("paths", o.halfwidth.paths);
      o.halfwidth.samples = hw.integer("samples", o.halfwidth.samples);
      hw.finish();
    }
    if (o.halfwidth.paths < 0 || o.halfwidth.samples < 0) fail(s.field("blend_halfwidth"), "must be >= 0", n);
  }
  o.max_iterations = s.integer("max_iterations", o.max_iterations);
  o.tighten = s.boolean("tighten", o.tighten);
  s.finish();
  return o;
}

std::string summary_text(const RunSummary& s, const JobConfig& job) {
  std::ostringstream os;
  auto counts = [&](const char* name, const SaturationReport& r) {
    os << name << ":\n";
    for (Axis a : kAllAxes) os << "  " << axis_name(a) << ": " << r[a].blocks << "\n";
    os << "  any: " << r.saturated_blocks << "\n";
    os << "  regions_C: " << r[Axis::C].regions.size() << "\n";
    os << "  max_vA_rpm: " << fixed(r[Axis::A].max_abs, 6) << "\n";
    os << "  max_vC_rpm: " << fixed(r[Axis::C].max_abs, 6) << "\n";
  };
  os << "feedrate_mm_min: " << fixed(job.feedrate, 4) << "\n";
  os << "tool: {R: " << fixed(job.tool.R, 6) << ", r: " << fixed(job.tool.r, 6) << "}\n";
  os << "paths: " << s.paths << "\n";
  os << "postures: " << s.postures << "\n";
  counts("saturation_before", s.before);
  counts("saturation_after", s.after);
  os << "optimization_iterations: " << s.iterations << "\n";
  os << "deformed_rows: [";
  for (std::size_t i = 0; i < s.deformed_rows.size(); ++i) os << (i ? ", " : "") << s.deformed_rows[i];
  os << "]\n";
  os << "relative_length_mm: " << fixed(s.relative_length, 6) << "\n";
  os << "time_programmed_s: " << fixed(s.time_programmed, 6) << "\n";
  os << "time_effective_s: " << fixed(s.time_effective, 6) << "\n";
  os << "max_scallop_mm: " << fixed(s.max_scallop, 6) << "\n";
  os << "tighten: {levels: " << s.tightening.levels << ", inserted: " << s.tightening.inserted
     << ", limit_reached: " << (s.tightening.limit_reached ? "true" : "false") << "}\n";
  os << "gouge_flags: " << s.gouges << "\n";
  os << "singular_blocks: " << s.singular_blocks << "\n";
  os << "out_of_range_poses: " << s.out_of_range << "\n";
  os << "violations: " << (s.violations ? "true" : "false") << "\n";
  return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ParametricSurface SurfaceSpec::build() const {
  if (kind == SurfaceKind::AnalyticSaddle) return ParametricSurface::saddle(a, b, c);
  return ParametricSurface::patch(degree_u, degree_v, control_net);
}

JobConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("parse error: " + e.msg + " (line " + std::to_string(e.mark.line + 1) + ", column " +
                          std::to_string(e.mark.column + 1) + ")",
                      e.mark.line + 1, e.mark.column + 1);
  }
  if (!root || !root.IsMap()) throw ConfigError("job config must be a mapping", 1, 1);
  Section top(root, "");
  JobConfig job;
  if (!top.has("surface")) throw ConfigError("surface: required block missing");
  if (!top.has("tool")) throw ConfigError("tool: required block missing");
  if (!top.has("feedrate")) throw ConfigError("feedrate: required value missing");

  job.surface = parse_surface(top.section("surface"));

  Section tool = top.section("tool");
  job.tool.R = tool.number("R", job.tool.R);
  job.tool.r = tool.number("r", job.tool.r);
  if (!(job.tool.R > 0.0)) fail("tool.R", "must be > 0", tool.get("R"));
  if (!(job.tool.r >= 0.0)) fail("tool.r", "must be >= 0", tool.get("r"));
  tool.finish();

  job.strategy = parse_strategy(top.section("strategy"));
  job.machine = parse_machine(top.section("machine"));

  job.feedrate = Section::as_number(top.get("feedrate"), "feedrate");
  if (!(job.feedrate > 0.0)) fail("feedrate", "must be > 0", top.get("feedrate"));

  job.optimization = parse_optimization(top.section("optimization"), job.strategy.scallop_tol);
  for (double c : job.optimization.candidates) {
    if (c < job.strategy.tilt_min || c > job.strategy.tilt_max) {
      fail("optimization.candidates", "candidate tilt outside [tilt_min, tilt_max]", top.get("optimization"));
    }
  }

  Section out = top.section("output");
  job.output.dir = out.string("dir", job.output.dir);
  job.output.cl = out.string("cl", job.output.cl);
  job.output.nc = out.string("nc", job.output.nc);
  job.output.report = out.string("report", job.output.report);
  job.output.field = out.string("field", job.output.field);
  job.output.summary = out.string("summary", job.output.summary);
  out.finish();
  top.finish();
  return job;
}

JobConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<JointBlockPath> joint_blocks(const KinematicProfile& profile) {
  std::vector<JointBlockPath> out;
  out.reserve(profile.paths.size());
  for (const PathProfile& p : profile.paths) {
    JointBlockPath jb;
    for (const BlockRecord& b : p.blocks) {
      jb.poses.push_back(b.end);
      jb.lengths.push_back(b.length);
    }
    out.push_back(std::move(jb));
  }
  return out;
}

RunSummary run(const JobConfig& job, const RunOptions& options) {
  const ParametricSurface surface = job.surface.build();
  job.machine.validate();
  const std::size_t workers = std::max<std::size_t>(1, options.workers);

  const OrientationField field = initial_field(surface, job.strategy);
  ToolPath toolpath = generate(surface, job.strategy, job.tool, field, workers);
  KinematicProfile profile = simulate(toolpath, job.machine, job.feedrate, workers);

  RunSummary s;
  s.before = saturation(profile, job.machine);
  const bool optimize = options.optimize && job.optimization.enabled;
  if (optimize) {
    OptimizeOptions opt;
    opt.candidates = job.optimization.candidates;
    opt.scallop_tol = job.optimization.scallop_tol;
    opt.halfwidth = job.optimization.halfwidth;
    opt.max_iterations = job.optimization.max_iterations;
    opt.tighten = job.optimization.tighten;
    opt.workers = workers;
    OptimizationResult res = optimize_tilt(surface, toolpath, job.machine, job.feedrate, opt);
    s.deformed_rows = res.deformed_rows(field);
    s.iterations = res.iterations;
    s.tightening = std::move(res.tightening);
    toolpath = std::move(res.toolpath);
    profile = std::move(res.profile);
  }
  s.after = saturation(profile, job.machine);
  s.paths = toolpath.paths.size();
  s.postures = toolpath.posture_count();
  s.time_programmed = profile.time_programmed;
  s.time_effective = profile.time_effective;
  for (const PathProfile& p : profile.paths) {
    for (const BlockRecord& b : p.blocks) {
      s.relative_length += b.length;
      s.singular_blocks += b.singular ? 1 : 0;
      s.out_of_range += within_ranges(b.end, job.machine) ? 0 : 1;
    }
  }
  s.max_scallop = max_scallop(toolpath);
  s.gouges = static_cast<int>(gouge_check(toolpath, surface).size());
  s.violations = s.after.saturated_blocks > 0 || s.gouges > 0 || s.max_scallop > job.optimization.scallop_tol;
  s.text = summary_text(s, job);

  const fs::path dir = options.out_dir.empty() ? fs::path(job.output.dir) : fs::path(options.out_dir);
  fs::create_directories(dir);
  {
    std::ostringstream cl;
    write_cl(cl, toolpath);
    write_file(dir / job.output.cl, cl.str());
  }
  write_file(dir / job.output.nc, emit_gcode(joint_blocks(profile), job.feedrate));
  {
    std::ostringstream csv;
    write_report_csv(csv, profile);
    write_file(dir / job.output.report, csv.str());
  }
  {
    std::ostringstream csv;
    write_field_csv(csv, toolpath.field);
    write_file(dir / job.output.field, csv.str());
  }
  write_file(dir / job.output.summary, s.text);
  return s;
}

namespace {

std::vector<std::vector<JointPose>> solve_cl(const ClFile& cl, const MachineModel& machine, std::size_t workers,
                                             std::vector<std::vector<bool>>& singular) {
  std::vector<std::vector<JointPose>> joints(cl.paths.size());
  singular.assign(cl.paths.size(), {});
  parallel_for(cl.paths.size(), workers, [&](std::size_t k) {
    std::optional<JointPose> prev;
    for (const PartPose& pose : cl.paths[k]) {
      const InverseResult r = inverse(pose, machine, prev);
      joints[k].push_back(r.pose);
      singular[k].push_back(r.singular);
      prev = r.pose;
    }
  });
  return joints;
}

}  // namespace

std::string post_process(const ClFile& cl, const JobConfig& job, std::size_t workers) {
  std::vector<std::vector<bool>> singular;
  const auto joints = solve_cl(cl, job.machine, workers, singular);
  const KinematicProfile profile = profile_joints(joints, job.machine, job.feedrate, workers, &singular);
  return emit_gcode(joint_blocks(profile), job.feedrate);
}

KinematicProfile simulate_file(const std::string& path, const JobConfig& job, std::size_t workers) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  const bool is_cl = text.find("GOTO/") != std::string::npos;
  if (is_cl) {
    const ClFile cl = read_cl(in);
    std::vector<std::vector<bool>> singular;
    const auto joints = solve_cl(cl, job.machine, workers, singular);
    return profile_joints(joints, job.machine, job.feedrate, workers, &singular);
  }
  return profile_joints(read_nc(in), job.machine, job.feedrate, workers);
}

}  // namespace hsm5
