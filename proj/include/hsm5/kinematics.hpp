#pragma once

#include <array>
#include <optional>

#include "hsm5/surface.hpp"

namespace hsm5 {

struct Interval {
  double lo = -1e300;
  double hi = 1e300;

  bool contains(double x, double eps = 1e-9) const { return x >= lo - eps && x <= hi + eps; }
};

struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 translation = Vec3::Zero();

  /// Rotation from an X-Y-Z fixed-axis triplet in degrees (R = Rz Ry Rx).
  static RigidTransform from_position_rotation(const Vec3& position, const Vec3& rotation_deg);
  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

// Five-axis machine with a C table carried by an A cradle (RRTTT): the part
// rotates about C then A, the tool translates along X, Y, Z and stays
// parallel to the machine Z axis.
//   machine point = Rx(A) (Rz(C) (setup(part point)) + o_ca) + o_am
struct MachineModel {
  Interval x{-500.0, 500.0};
  Interval y{-500.0, 500.0};
  Interval z{-500.0, 500.0};
  Interval a{-30.0, 120.0};
  std::optional<Interval> c;  // unbounded when empty

  double vx = 30000.0;  // mm/min
  double vy = 30000.0;
  double vz = 30000.0;
  double va = 15.0;  // rpm
  double vc = 20.0;  // rpm

  Vec3 o_ca = Vec3::Zero();  // C-table origin in the A-cradle frame
  Vec3 o_am = Vec3::Zero();  // A pivot in the machine frame
  RigidTransform part_setup;

  double singularity_threshold = 0.1;  // deg

  void validate() const;
};

struct JointPose {
  double x = 0.0, y = 0.0, z = 0.0;  // mm
  double a = 0.0, c = 0.0;           // deg; c is unwound, never reduced mod 360
};

struct PartPose {
  Vec3 p;  // controlled tool point (C_L) in the part frame
  Vec3 u;  // unit tool axis in the part frame
};

struct RotaryAngles {
  double a = 0.0;
  double c = 0.0;
};

PartPose forward(const JointPose& q, const MachineModel& machine);

/// Both (A, C) solutions of Rx(A) Rz(C) u_table = z, where u_table is the part
/// axis expressed in the C-table frame. The first has A >= 0.
std::array<RotaryAngles, 2> orientation_candidates(const Vec3& u, const MachineModel& machine);

/// C + 360k closest to `reference`.
double unwind(double c, double reference);

/// Picks the in-range candidate with the smallest max(|dA|, |dC|) from prev
/// (C unwound against prev), or the smallest |A| without prev, ties toward
/// positive A. Throws UnreachablePoseError when neither is in the A range.
RotaryAngles select_branch(const std::array<RotaryAngles, 2>& candidates, const std::optional<JointPose>& prev,
                           const MachineModel& machine);

/// Held-C solution when the axis is within the singular cone about machine Z:
/// C stays at prev.C (0 without prev) and A takes the signed residual tilt in
/// that azimuth. Returns nullopt outside the cone.
std::optional<RotaryAngles> singularity_guard(const Vec3& u, const std::optional<JointPose>& prev,
                                              const MachineModel& machine);

struct InverseResult {
  JointPose pose;
  bool singular = false;
};

/// Inverse kinematic transformation with branch selection and singular-zone
/// handling; C is unwound to the revolution nearest prev.C.
InverseResult inverse(const PartPose& pose, const MachineModel& machine, const std::optional<JointPose>& prev = {});

/// Translations that put the part point p under the tool for fixed rotaries.
Vec3 machine_position(const Vec3& p, const RotaryAngles& angles, const MachineModel& machine);

bool within_ranges(const JointPose& q, const MachineModel& machine);

/// Chord-sum length, in the part frame, of the tool point while the joints
/// move linearly from q0 to q1, using n_sub equal steps.
double relative_path_length(const JointPose& q0, const JointPose& q1, const MachineModel& machine, int n_sub);

/// Default estimator: chord sums at 16 and 32 steps with one Richardson step.
double relative_path_length(const JointPose& q0, const JointPose& q1, const MachineModel& machine);

}  // namespace hsm5
