#include "hsm5/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace hsm5 {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Eigen::Matrix3d rot_x(double deg) { return Eigen::AngleAxisd(deg * kDeg, Vec3::UnitX()).toRotationMatrix(); }
Eigen::Matrix3d rot_z(double deg) { return Eigen::AngleAxisd(deg * kDeg, Vec3::UnitZ()).toRotationMatrix(); }

bool in_a_range(const RotaryAngles& r, const MachineModel& m) { return m.a.contains(r.a); }

}  // namespace

RigidTransform RigidTransform::from_position_rotation(const Vec3& position, const Vec3& rotation_deg) {
  RigidTransform t;
  t.rotation = (Eigen::AngleAxisd(rotation_deg.z() * kDeg, Vec3::UnitZ()) *
                Eigen::AngleAxisd(rotation_deg.y() * kDeg, Vec3::UnitY()) *
                Eigen::AngleAxisd(rotation_deg.x() * kDeg, Vec3::UnitX()))
                   .toRotationMatrix();
  t.translation = position;
  return t;
}

void MachineModel::validate() const {
  auto check = [](const Interval& i, const char* name) {
    if (!(i.lo <= i.hi)) throw DomainError(std::string("machine range ") + name + " is empty");
  };
  check(x, "X");
  check(y, "Y");
  check(z, "Z");
  check(a, "A");
  if (c) check(*c, "C");
  if (!(vx > 0 && vy > 0 && vz > 0 && va > 0 && vc > 0)) throw DomainError("machine velocity limits must be > 0");
  if (!(singularity_threshold >= 0.0)) throw DomainError("singularity threshold must be >= 0");
}

PartPose forward(const JointPose& q, const MachineModel& m) {
  const Eigen::Matrix3d rz_inv = rot_z(-q.c);
  const Eigen::Matrix3d rx_inv = rot_x(-q.a);
  const Eigen::Matrix3d setup_inv = m.part_setup.rotation.transpose();
  const Vec3 machine_point(q.x, q.y, q.z);
  const Vec3 in_table = rz_inv * (rx_inv * (machine_point - m.o_am) - m.o_ca);
  PartPose pose;
  pose.p = setup_inv * (in_table - m.part_setup.translation);
  pose.u = setup_inv * (rz_inv * (rx_inv * Vec3::UnitZ()));
  return pose;
}

std::array<RotaryAngles, 2> orientation_candidates(const Vec3& u, const MachineModel& m) {
  const Vec3 w = m.part_setup.rotation * u;
  const double a = std::atan2(std::hypot(w.x(), w.y()), w.z()) / kDeg;
  const double c = std::atan2(w.x(), w.y()) / kDeg;
  return {RotaryAngles{a, c}, RotaryAngles{-a, c + 180.0}};
}

double unwind(double c, double reference) { return c - 360.0 * std::round((c - reference) / 360.0); }

RotaryAngles select_branch(const std::array<RotaryAngles, 2>& candidates, const std::optional<JointPose>& prev,
                           const MachineModel& m) {
  const RotaryAngles* best = nullptr;
  double best_cost = 0.0;
  RotaryAngles unwound[2];
  for (int i = 0; i < 2; ++i) {
    unwound[i] = candidates[i];
    if (prev) unwound[i].c = unwind(candidates[i].c, prev->c);
    if (!in_a_range(unwound[i], m)) continue;
    const double cost = prev ? std::max(std::abs(unwound[i].a - prev->a), std::abs(unwound[i].c - prev->c))
                             : std::abs(unwound[i].a);
    const bool better = !best || cost < best_cost - 1e-12 ||
                        (std::abs(cost - best_cost) <= 1e-12 && unwound[i].a > best->a);
    if (better) {
      best = &unwound[i];
      best_cost = cost;
    }
  }
  if (!best) {
    std::ostringstream os;
    os << "tool axis unreachable: A candidates " << candidates[0].a << " and " << candidates[1].a
       << " deg both outside [" << m.a.lo << ", " << m.a.hi << "]";
    throw UnreachablePoseError(os.str());
  }
  return *best;
}

std::optional<RotaryAngles> singularity_guard(const Vec3& u, const std::optional<JointPose>& prev,
                                              const MachineModel& m) {
  const Vec3 w = m.part_setup.rotation * u;
  const double angle = std::atan2(std::hypot(w.x(), w.y()), w.z()) / kDeg;
  if (!(angle < m.singularity_threshold)) return std::nullopt;
  RotaryAngles r;
  r.c = prev ? prev->c : 0.0;
  const Vec3 in_cradle = rot_z(r.c) * w;
  r.a = std::atan2(in_cradle.y(), in_cradle.z()) / kDeg;
  return r;
}

Vec3 machine_position(const Vec3& p, const RotaryAngles& r, const MachineModel& m) {
  return rot_x(r.a) * (rot_z(r.c) * m.part_setup.apply(p) + m.o_ca) + m.o_am;
}

InverseResult inverse(const PartPose& pose, const MachineModel& m, const std::optional<JointPose>& prev) {
  InverseResult out;
  RotaryAngles angles;
  if (auto held = singularity_guard(pose.u, prev, m); held && m.a.contains(held->a)) {
    angles = *held;
    out.singular = true;
  } else {
    angles = select_branch(orientation_candidates(pose.u, m), prev, m);
    if (!prev) angles.c = unwind(angles.c, 0.0);
  }
  const Vec3 t = machine_position(pose.p, angles, m);
  out.pose = JointPose{t.x(), t.y(), t.z(), angles.a, angles.c};
  return out;
}

bool within_ranges(const JointPose& q, const MachineModel& m) {
  return m.x.contains(q.x) && m.y.contains(q.y) && m.z.contains(q.z) && m.a.contains(q.a) &&
         (!m.c || m.c->contains(q.c));
}

double relative_path_length(const JointPose& q0, const JointPose& q1, const MachineModel& m, int n_sub) {
  if (n_sub < 1) throw DomainError("n_sub must be >= 1");
  auto at = [&](double s) {
    return JointPose{q0.x + s * (q1.x - q0.x), q0.y + s * (q1.y - q0.y), q0.z + s * (q1.z - q0.z),
                     q0.a + s * (q1.a - q0.a), q0.c + s * (q1.c - q0.c)};
  };
  double length = 0.0;
  Vec3 prev = forward(q0, m).p;
  for (int k = 1; k <= n_sub; ++k) {
    const Vec3 cur = forward(at(static_cast<double>(k) / n_sub), m).p;
    length += (cur - prev).norm();
    prev = cur;
  }
  return length;
}

double relative_path_length(const JointPose& q0, const JointPose& q1, const MachineModel& m) {
  if (q0.a == q1.a && q0.c == q1.c) return relative_path_length(q0, q1, m, 1);
  const double coarse = relative_path_length(q0, q1, m, 16);
  const double fine = relative_path_length(q0, q1, m, 32);
  return fine + (fine - coarse) / 3.0;
}

}  // namespace hsm5
