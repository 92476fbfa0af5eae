#pragma once

#include <array>
#include <string>
#include <vector>

#include "hsm5/kinematics.hpp"
#include "hsm5/toolpath.hpp"

namespace hsm5 {

enum class Axis : int { X = 0, Y, Z, A, C };
inline constexpr std::array<Axis, 5> kAllAxes{Axis::X, Axis::Y, Axis::Z, Axis::A, Axis::C};
const char* axis_name(Axis axis);

// Per-axis values indexed by Axis: X, Y, Z in mm/min, A and C in rpm.
using AxisValues = std::array<double, 5>;

inline double& at(AxisValues& v, Axis a) { return v[static_cast<int>(a)]; }
inline double at(const AxisValues& v, Axis a) { return v[static_cast<int>(a)]; }

AxisValues velocity_limits(const MachineModel& machine);

// Record i of a path covers the joint-linear block from sample i-1 to sample
// i; record 0 is the zero-length start of the path. Velocities are the
// estimates at sample i.
struct BlockRecord {
  JointPose start;
  JointPose end;
  double length = 0.0;  // mm, relative tool-point path length
  double dt = 0.0;      // s at the programmed feedrate
  AxisValues velocity{};
  std::array<bool, 5> saturated{};
  double f_eff = 0.0;  // mm/min
  double frn = 0.0;    // 1/min inverse-time value, 0 for zero-length records
  bool singular = false;
  bool velocity_defined = true;

  bool any_saturated() const;
};

struct PathProfile {
  std::vector<BlockRecord> blocks;
};

struct KinematicProfile {
  std::vector<PathProfile> paths;
  double feedrate = 0.0;        // mm/min
  double time_programmed = 0.0; // s
  double time_effective = 0.0;  // s
  int undefined_velocities = 0;

  std::size_t block_count() const;
  int saturated_blocks(Axis axis) const;
  int saturated_blocks_any() const;
};

/// Central-difference joint velocities at q over the three successive poses,
/// with block times from the relative path length at feedrate F (mm/min).
/// Returns false (velocities zero) when both neighbouring blocks have zero length.
bool joint_velocities(const JointPose& q_prev, const JointPose& q, const JointPose& q_next,
                      const MachineModel& machine, double feedrate, AxisValues& out);

/// One-sided difference over a single block, used at path ends.
bool joint_velocities(const JointPose& q0, const JointPose& q1, const MachineModel& machine, double feedrate,
                      AxisValues& out);

/// Joint solution along a path, each posture seeded by the previous one.
std::vector<InverseResult> solve_path(const Path& path, const MachineModel& machine);

/// Profile of already-solved joint paths; fills block times, velocities,
/// saturation flags, F_eff and inverse-time values.
KinematicProfile profile_joints(const std::vector<std::vector<JointPose>>& joints, const MachineModel& machine,
                                double feedrate, std::size_t workers = 1,
                                const std::vector<std::vector<bool>>* singular = nullptr);

KinematicProfile simulate(const ToolPath& toolpath, const MachineModel& machine, double feedrate,
                          std::size_t workers = 1);
PathProfile simulate_path(const Path& path, const MachineModel& machine, double feedrate);

struct SaturatedRegion {
  int path = 0;
  int first = 0;  // record index, inclusive
  int last = 0;
  int count = 0;  // saturated records inside

  bool operator==(const SaturatedRegion&) const = default;
};

struct AxisSaturation {
  double max_abs = 0.0;
  double limit = 0.0;
  int blocks = 0;
  std::vector<SaturatedRegion> regions;
};

struct SaturationReport {
  std::array<AxisSaturation, 5> axes;
  int total_blocks = 0;
  int saturated_blocks = 0;  // records with any axis saturated
  double saturated_fraction = 0.0;

  const AxisSaturation& operator[](Axis a) const { return axes[static_cast<int>(a)]; }
};

/// Saturation is strict: |v| > limit. Runs separated by at most `merge_gap`
/// unsaturated records are reported as one region.
SaturationReport saturation(const KinematicProfile& profile, const MachineModel& machine, int merge_gap = 2);

/// Recomputes flags, F_eff = F_prog * min(1, min_axis limit/|v|) and the
/// velocity-capped total time, in place.
void effective_feedrate(KinematicProfile& profile, const MachineModel& machine);

/// Inverse-time values per record: FRN = 1 / dt[min]; zero-length records get 0.
std::vector<std::vector<double>> inverse_time(const KinematicProfile& profile);

}  // namespace hsm5
