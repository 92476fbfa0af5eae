#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hsm5/simulator.hpp"

using namespace hsm5;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Independent chain for the oracle: part point of the machine tool point.
Vec3 part_point(double x, double y, double z, double a, double c, const Vec3& o_ca, const Vec3& o_am) {
  const Eigen::Matrix3d ra = Eigen::AngleAxisd(-a * kDeg, Vec3::UnitX()).toRotationMatrix();
  const Eigen::Matrix3d rc = Eigen::AngleAxisd(-c * kDeg, Vec3::UnitZ()).toRotationMatrix();
  return rc * (ra * (Vec3(x, y, z) - o_am) - o_ca);
}

struct Trajectory {
  Vec3 o_ca{20, -15, 40};
  Vec3 o_am{0, 50, -120};
  JointPose at(double s) const {
    return JointPose{-30 + 60 * s, 10 - 20 * s, 5 + 8 * s, 20 + 10 * std::sin(3 * s), 40 * std::sin(2 * s + 0.3)};
  }
  JointPose rate(double s) const {  // d/ds
    return JointPose{60, -20, 8, 30 * std::cos(3 * s), 80 * std::cos(2 * s + 0.3)};
  }
  double speed(double s) const {  // |dp/ds| by a 5-point stencil on the oracle chain
    const double h = 1e-4;
    auto p = [&](double t) {
      const JointPose q = at(t);
      return part_point(q.x, q.y, q.z, q.a, q.c, o_ca, o_am);
    };
    return ((p(s - 2 * h) - 8 * p(s - h) + 8 * p(s + h) - p(s + 2 * h)) / (12 * h)).norm();
  }
};

PathProfile uniform_path(int n, const AxisValues& v) {
  PathProfile p;
  p.blocks.resize(n);
  for (int i = 0; i < n; ++i) {
    p.blocks[i].length = i ? 1.0 : 0.0;
    p.blocks[i].dt = i ? 1.0 / 5000 * 60 : 0.0;
    p.blocks[i].velocity = v;
  }
  return p;
}

}  // namespace

TEST_CASE("velocities on straight equal blocks") {
  const MachineModel m;
  AxisValues v{};
  REQUIRE(joint_velocities(JointPose{0, 0, 0, 3, 7}, JointPose{3, 4, 0, 3, 7}, JointPose{6, 8, 0, 3, 7}, m, 5000, v));
  CHECK(at(v, Axis::X) == doctest::Approx(3000.0));
  CHECK(at(v, Axis::Y) == doctest::Approx(4000.0));
  CHECK(at(v, Axis::A) == 0.0);
  CHECK(at(v, Axis::C) == 0.0);

  CHECK_FALSE(joint_velocities(JointPose{}, JointPose{}, JointPose{}, m, 5000, v));
}

TEST_CASE("rotary velocity units") {
  // dC = 1.2 deg over a total of 0.01 s is 7200 deg/min = 20 rev/min.
  const MachineModel m;
  const double radius = 50.0;
  // Pick the block length so the two blocks take 0.005 s each at 5000 mm/min.
  const double half = 0.6;  // deg per block
  const JointPose q0{radius, 0, 0, 30, 0}, q1{radius, 0, 0, 30, half}, q2{radius, 0, 0, 30, 2 * half};
  const double length = relative_path_length(q0, q1, m);
  const double feed = length / (0.005 / 60.0);
  AxisValues v{};
  REQUIRE(joint_velocities(q0, q1, q2, m, feed, v));
  CHECK(at(v, Axis::C) == doctest::Approx(20.0).epsilon(1e-9));

  // Slightly slower than the limit: no saturation, full feed.
  const KinematicProfile prof = profile_joints({{q0, q1, q2}}, m, feed * 0.999);
  CHECK_FALSE(prof.paths[0].blocks[1].saturated[static_cast<int>(Axis::C)]);
  CHECK(prof.paths[0].blocks[1].f_eff == feed * 0.999);
}

TEST_CASE("central differences converge at second order") {
  const Trajectory traj;
  MachineModel m;
  m.o_ca = traj.o_ca;
  m.o_am = traj.o_am;
  const double feed = 5000.0;
  const double s_eval = 0.5;
  std::vector<double> err_a, err_c;
  for (int n : {16, 32, 64, 128, 256}) {
    std::vector<JointPose> q;
    for (int i = 0; i <= n; ++i) q.push_back(traj.at(static_cast<double>(i) / n));
    const KinematicProfile prof = profile_joints({q}, m, feed);
    const AxisValues& v = prof.paths[0].blocks[n / 2].velocity;
    const double to_minutes = feed / traj.speed(s_eval);  // ds/dt in 1/min
    err_a.push_back(std::abs(at(v, Axis::A) - traj.rate(s_eval).a * to_minutes / 360.0));
    err_c.push_back(std::abs(at(v, Axis::C) - traj.rate(s_eval).c * to_minutes / 360.0));
  }
  for (std::size_t k = 0; k + 1 < err_a.size(); ++k) {
    CHECK(std::log2(err_a[k] / err_a[k + 1]) >= 1.9);
    CHECK(std::log2(err_c[k] / err_c[k + 1]) >= 1.9);
  }
}

TEST_CASE("saturation regions") {
  MachineModel m;
  KinematicProfile prof;
  prof.feedrate = 5000;
  AxisValues calm{};
  at(calm, Axis::A) = 7.5;
  at(calm, Axis::C) = 10;
  at(calm, Axis::X) = 15000;
  for (int k = 0; k < 13; ++k) prof.paths.push_back(uniform_path(100, calm));
  effective_feedrate(prof, m);
  SaturationReport r = saturation(prof, m);
  CHECK(r.saturated_blocks == 0);
  for (Axis a : kAllAxes) CHECK(r[a].regions.empty());

  for (int i = 40; i <= 55; ++i) at(prof.paths[12].blocks[i].velocity, Axis::C) = 25;
  at(prof.paths[3].blocks[10].velocity, Axis::A) = 15;  // at the limit: not saturated
  effective_feedrate(prof, m);
  r = saturation(prof, m);
  REQUIRE(r[Axis::C].regions.size() == 1);
  CHECK(r[Axis::C].regions[0] == SaturatedRegion{12, 40, 55, 16});
  CHECK(r[Axis::A].blocks == 0);
  CHECK(r[Axis::C].max_abs == 25.0);
  CHECK(r.saturated_fraction == doctest::Approx(16.0 / 1300));

  // Runs two records apart merge, three apart do not.
  at(prof.paths[12].blocks[58].velocity, Axis::C) = 25;
  at(prof.paths[12].blocks[62].velocity, Axis::C) = 25;
  effective_feedrate(prof, m);
  r = saturation(prof, m);
  REQUIRE(r[Axis::C].regions.size() == 2);
  CHECK(r[Axis::C].regions[0] == SaturatedRegion{12, 40, 58, 17});
  CHECK(r[Axis::C].regions[1] == SaturatedRegion{12, 62, 62, 1});
}

TEST_CASE("effective feedrate") {
  MachineModel m;
  KinematicProfile prof;
  prof.feedrate = 5000;
  AxisValues v{};
  prof.paths.push_back(uniform_path(5, v));
  at(prof.paths[0].blocks[2].velocity, Axis::C) = 40;
  at(prof.paths[0].blocks[3].velocity, Axis::C) = 25;
  at(prof.paths[0].blocks[3].velocity, Axis::A) = 30;
  effective_feedrate(prof, m);
  CHECK(prof.paths[0].blocks[1].f_eff == 5000.0);
  CHECK(prof.paths[0].blocks[2].f_eff == doctest::Approx(2500.0));
  CHECK(prof.paths[0].blocks[3].f_eff == doctest::Approx(2500.0));  // min(0.8, 0.5)
  for (const BlockRecord& b : prof.paths[0].blocks) CHECK(b.f_eff <= prof.feedrate);
  CHECK(prof.time_effective > prof.time_programmed);
}

TEST_CASE("inverse time") {
  const MachineModel m;
  const std::vector<JointPose> q{{0, 0, 0, 0, 0}, {1, 0, 0, 0, 0}, {1.5, 0, 0, 0, 0}, {2.5, 0, 0, 0, 0}};
  const KinematicProfile prof = profile_joints({q}, m, 5000);
  const auto frn = inverse_time(prof);
  CHECK(frn[0][0] == 0.0);
  CHECK(prof.paths[0].blocks[1].dt / 60.0 == doctest::Approx(2e-4));
  CHECK(frn[0][1] == doctest::Approx(5000.0));
  CHECK(frn[0][2] == doctest::Approx(10000.0));
  CHECK(frn[0][3] == doctest::Approx(5000.0));
  double length = 0, time = 0;
  for (const BlockRecord& b : prof.paths[0].blocks) {
    length += b.length;
    time += b.dt;
    if (b.length > 0) CHECK(b.frn == doctest::Approx(1.0 / (b.dt / 60.0)));
  }
  CHECK(std::abs(time * 5000 / 60.0 - length) <= 1e-9 * length);
  CHECK(prof.time_programmed == doctest::Approx(time));
}
