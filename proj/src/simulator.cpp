#include "hsm5/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "hsm5/parallel.hpp"

namespace hsm5 {
namespace {

constexpr double kZeroLength = 1e-9;  // mm

AxisValues delta(const JointPose& a, const JointPose& b) {
  return {b.x - a.x, b.y - a.y, b.z - a.z, b.a - a.a, b.c - a.c};
}

// Joint deltas over dt minutes: mm/min for translations, rpm for rotaries.
AxisValues rates(const AxisValues& d, double dt_min) {
  AxisValues v{};
  for (int i = 0; i < 3; ++i) v[i] = d[i] / dt_min;
  for (int i = 3; i < 5; ++i) v[i] = d[i] / dt_min / 360.0;
  return v;
}

double feed_ratio(const AxisValues& v, const AxisValues& limits) {
  double ratio = 1.0;
  for (int i = 0; i < 5; ++i) {
    const double mag = std::abs(v[i]);
    if (mag > limits[i]) ratio = std::min(ratio, limits[i] / mag);
  }
  return ratio;
}

}  // namespace

const char* axis_name(Axis axis) {
  static const char* names[] = {"X", "Y", "Z", "A", "C"};
  return names[static_cast<int>(axis)];
}

AxisValues velocity_limits(const MachineModel& m) { return {m.vx, m.vy, m.vz, m.va, m.vc}; }

bool BlockRecord::any_saturated() const { return std::any_of(saturated.begin(), saturated.end(), [](bool b) { return b; }); }

std::size_t KinematicProfile::block_count() const {
  std::size_t n = 0;
  for (const PathProfile& p : paths) n += p.blocks.size();
  return n;
}

int KinematicProfile::saturated_blocks(Axis axis) const {
  int n = 0;
  for (const PathProfile& p : paths)
    for (const BlockRecord& b : p.blocks) n += b.saturated[static_cast<int>(axis)] ? 1 : 0;
  return n;
}

int KinematicProfile::saturated_blocks_any() const {
  int n = 0;
  for (const PathProfile& p : paths)
    for (const BlockRecord& b : p.blocks) n += b.any_saturated() ? 1 : 0;
  return n;
}

bool joint_velocities(const JointPose& q_prev, const JointPose& q, const JointPose& q_next,
                      const MachineModel& machine, double feedrate, AxisValues& out) {
  const double t_prev = relative_path_length(q_prev, q, machine) / feedrate;
  const double t_next = relative_path_length(q, q_next, machine) / feedrate;
  const double total = t_prev + t_next;
  if (!(total * feedrate > kZeroLength)) {
    out.fill(0.0);
    return false;
  }
  out = rates(delta(q_prev, q_next), total);
  return true;
}

bool joint_velocities(const JointPose& q0, const JointPose& q1, const MachineModel& machine, double feedrate,
                      AxisValues& out) {
  const double len = relative_path_length(q0, q1, machine);
  if (!(len > kZeroLength)) {
    out.fill(0.0);
    return false;
  }
  out = rates(delta(q0, q1), len / feedrate);
  return true;
}

std::vector<InverseResult> solve_path(const Path& path, const MachineModel& machine) {
  std::vector<InverseResult> out;
  out.reserve(path.postures.size());
  std::optional<JointPose> prev;
  for (const CutterLocation& loc : path.postures) {
    out.push_back(inverse(PartPose{loc.cl, loc.axis}, machine, prev));
    prev = out.back().pose;
  }
  return out;
}

namespace {

PathProfile profile_one(const std::vector<JointPose>& q, const MachineModel& machine, double feedrate,
                        const std::vector<bool>* singular) {
  PathProfile prof;
  const std::size_t n = q.size();
  prof.blocks.resize(n);
  std::vector<double> lengths(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) lengths[i] = relative_path_length(q[i - 1], q[i], machine);
  for (std::size_t i = 0; i < n; ++i) {
    BlockRecord& b = prof.blocks[i];
    b.start = i > 0 ? q[i - 1] : q[i];
    b.end = q[i];
    b.length = lengths[i];
    b.dt = lengths[i] / feedrate * 60.0;
    b.singular = singular && (*singular)[i];
    if (n < 2) {
      b.velocity.fill(0.0);
      continue;
    }
    // Block times from the precomputed lengths; same estimator as joint_velocities().
    double t_total = 0.0;
    AxisValues d{};
    if (i == 0) {
      t_total = lengths[1] / feedrate;
      d = delta(q[0], q[1]);
    } else if (i + 1 == n) {
      t_total = lengths[i] / feedrate;
      d = delta(q[i - 1], q[i]);
    } else {
      t_total = (lengths[i] + lengths[i + 1]) / feedrate;
      d = delta(q[i - 1], q[i + 1]);
    }
    if (t_total * feedrate > kZeroLength) {
      b.velocity = rates(d, t_total);
    } else {
      b.velocity.fill(0.0);
      b.velocity_defined = false;
    }
  }
  return prof;
}

}  // namespace

KinematicProfile profile_joints(const std::vector<std::vector<JointPose>>& joints, const MachineModel& machine,
                                double feedrate, std::size_t workers,
                                const std::vector<std::vector<bool>>* singular) {
  if (!(feedrate > 0.0)) throw DomainError("feedrate must be > 0");
  KinematicProfile profile;
  profile.feedrate = feedrate;
  profile.paths.resize(joints.size());
  parallel_for(joints.size(), workers, [&](std::size_t k) {
    profile.paths[k] = profile_one(joints[k], machine, feedrate, singular ? &(*singular)[k] : nullptr);
  });
  effective_feedrate(profile, machine);
  return profile;
}

PathProfile simulate_path(const Path& path, const MachineModel& machine, double feedrate) {
  const std::vector<InverseResult> solved = solve_path(path, machine);
  std::vector<JointPose> q;
  std::vector<bool> singular;
  for (const InverseResult& r : solved) {
    q.push_back(r.pose);
    singular.push_back(r.singular);
  }
  KinematicProfile one = profile_joints({q}, machine, feedrate, 1, nullptr);
  for (std::size_t i = 0; i < singular.size(); ++i) one.paths[0].blocks[i].singular = singular[i];
  return std::move(one.paths[0]);
}

KinematicProfile simulate(const ToolPath& toolpath, const MachineModel& machine, double feedrate,
                          std::size_t workers) {
  if (!(feedrate > 0.0)) throw DomainError("feedrate must be > 0");
  KinematicProfile profile;
  profile.feedrate = feedrate;
  profile.paths.resize(toolpath.paths.size());
  parallel_for(toolpath.paths.size(), workers, [&](std::size_t k) {
    try {
      profile.paths[k] = simulate_path(toolpath.paths[k], machine, feedrate);
    } catch (const Error& e) {
      throw Error(e.kind(), "path " + std::to_string(k) + ": " + e.what());
    }
  });
  effective_feedrate(profile, machine);
  return profile;
}

void effective_feedrate(KinematicProfile& profile, const MachineModel& machine) {
  const AxisValues limits = velocity_limits(machine);
  const double f = profile.feedrate;
  profile.time_programmed = 0.0;
  profile.time_effective = 0.0;
  profile.undefined_velocities = 0;
  for (PathProfile& path : profile.paths) {
    double prev_ratio = 1.0;
    for (std::size_t i = 0; i < path.blocks.size(); ++i) {
      BlockRecord& b = path.blocks[i];
      for (int a = 0; a < 5; ++a) b.saturated[a] = std::abs(b.velocity[a]) > limits[a];
      const double ratio = feed_ratio(b.velocity, limits);
      b.f_eff = f * ratio;
      b.frn = b.length > kZeroLength ? f / b.length : 0.0;
      if (!b.velocity_defined) ++profile.undefined_velocities;
      profile.time_programmed += b.dt;
      // A block runs at the slower of its two end-point feeds.
      if (i > 0) profile.time_effective += b.dt / std::min(ratio, prev_ratio);
      prev_ratio = ratio;
    }
  }
}

SaturationReport saturation(const KinematicProfile& profile, const MachineModel& machine, int merge_gap) {
  SaturationReport report;
  const AxisValues limits = velocity_limits(machine);
  for (int a = 0; a < 5; ++a) report.axes[a].limit = limits[a];
  for (std::size_t p = 0; p < profile.paths.size(); ++p) {
    const auto& blocks = profile.paths[p].blocks;
    report.total_blocks += static_cast<int>(blocks.size());
    for (const BlockRecord& b : blocks) report.saturated_blocks += b.any_saturated() ? 1 : 0;
    for (int a = 0; a < 5; ++a) {
      AxisSaturation& axis = report.axes[a];
      int run_first = -1, run_last = -1, run_count = 0;
      auto flush = [&] {
        if (run_first >= 0) axis.regions.push_back(SaturatedRegion{static_cast<int>(p), run_first, run_last, run_count});
        run_first = -1;
        run_count = 0;
      };
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        axis.max_abs = std::max(axis.max_abs, std::abs(blocks[i].velocity[a]));
        if (!blocks[i].saturated[a]) continue;
        ++axis.blocks;
        const int idx = static_cast<int>(i);
        if (run_first >= 0 && idx - run_last - 1 <= merge_gap) {
          run_last = idx;
          ++run_count;
        } else {
          flush();
          run_first = run_last = idx;
          run_count = 1;
        }
      }
      flush();
    }
  }
  report.saturated_fraction =
      report.total_blocks > 0 ? static_cast<double>(report.saturated_blocks) / report.total_blocks : 0.0;
  return report;
}

std::vector<std::vector<double>> inverse_time(const KinematicProfile& profile) {
  std::vector<std::vector<double>> out;
  out.reserve(profile.paths.size());
  for (const PathProfile& p : profile.paths) {
    std::vector<double> frn;
    frn.reserve(p.blocks.size());
    for (const BlockRecord& b : p.blocks) {
      const double dt_min = b.dt / 60.0;
      frn.push_back(b.length > kZeroLength ? 1.0 / dt_min : 0.0);
    }
    out.push_back(std::move(frn));
  }
  return out;
}

}  // namespace hsm5
