#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hsm5/errors.hpp"
#include "hsm5/io.hpp"

using namespace hsm5;

namespace {

double angle_between(const Vec3& a, const Vec3& b) { return std::atan2(a.cross(b).norm(), a.dot(b)); }

ToolPath saddle_toolpath() {
  const auto s = ParametricSurface::saddle(50, 50, 20);
  MachiningStrategy st;
  st.stepover = 10;
  return generate(s, st, CutterGeometry{}, initial_field(s, st));
}

}  // namespace

TEST_CASE("fixed formatting") {
  CHECK(fixed(1.23456, 4) == "1.2346");
  CHECK(fixed(-0.00001, 4) == "0.0000");
  CHECK(fixed(-2.5, 1) == "-2.5");
}

TEST_CASE("two-block translation program") {
  JointBlockPath path;
  path.poses = {JointPose{0, 0, 0, 0, 0}, JointPose{10, 0, 0, 0, 0}, JointPose{15, 0, 0, 0, 0}};
  path.lengths = {0, 10, 5};
  const std::string nc = emit_gcode({path}, 5000);
  CHECK(nc ==
        "%\n"
        "(hsm5 five-axis program, inverse-time feed)\n"
        "N1 G21 G90 G17\n"
        "N2 G93\n"
        "N3 G00 X0.0000 Y0.0000 Z0.0000 A0.0000 C0.0000\n"
        "N4 G01 X10.0000 Y0.0000 Z0.0000 A0.0000 C0.0000 F500.0000\n"
        "N5 G01 X15.0000 Y0.0000 Z0.0000 A0.0000 C0.0000 F1000.0000\n"
        "N6 G94\n"
        "N7 M30\n"
        "%\n");
  CHECK(emit_gcode({path}, 5000) == nc);
}

TEST_CASE("empty program") {
  CHECK(emit_gcode({}, 5000) ==
        "%\n(hsm5 five-axis program, inverse-time feed)\nN1 G21 G90 G17\nN2 G93\nN3 G94\nN4 M30\n%\n");
}

TEST_CASE("zero-length records merge into a neighbour") {
  JointBlockPath path;
  path.poses = {JointPose{0, 0, 0, 0, 0}, JointPose{0, 0, 0, 0, 0}, JointPose{4, 0, 0, 0, 0},
                JointPose{4, 0, 0, 0, 0}};
  path.lengths = {0, 0, 4, 0};
  const std::string nc = emit_gcode({path}, 1000);
  CHECK(nc.find("N4 G01 X4.0000 Y0.0000 Z0.0000 A0.0000 C0.0000 F250.0000\nN5 G94") != std::string::npos);
}

TEST_CASE("NC program reads back") {
  JointBlockPath a, b;
  a.poses = {JointPose{1, 2, 3, 4, 5}, JointPose{2, 2, 3, 4.5, 365.25}};
  a.lengths = {0, 1.5};
  b.poses = {JointPose{-1, 0, 0, 0, 0}, JointPose{-2, 0, 0, 0, 0}, JointPose{-3, 0, 0, 0, 0}};
  b.lengths = {0, 1, 1};
  std::istringstream in(emit_gcode({a, b}, 5000));
  const auto paths = read_nc(in);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].size() == 2);
  CHECK(paths[0][1].c == 365.25);
  CHECK(paths[1].size() == 3);
  CHECK(paths[1][2].x == -3.0);

  std::istringstream bad("N1 G01 X1 Y2\n");
  CHECK_THROWS_AS(read_nc(bad), Error);
}

TEST_CASE("CL file round trip") {
  const ToolPath tp = saddle_toolpath();
  std::ostringstream os;
  write_cl(os, tp);
  CHECK(os.str().rfind("$$ hsm5 cutter location file\n$$ TOOL R=9.000000 r=1.000000\n", 0) == 0);
  std::istringstream in(os.str());
  const ClFile cl = read_cl(in);
  REQUIRE(cl.tool);
  CHECK(cl.tool->R == 9.0);
  REQUIRE(cl.paths.size() == tp.paths.size());
  for (std::size_t p = 0; p < tp.paths.size(); ++p) {
    REQUIRE(cl.paths[p].size() == tp.paths[p].postures.size());
    for (std::size_t i = 0; i < cl.paths[p].size(); ++i) {
      CHECK((cl.paths[p][i].p - tp.paths[p].postures[i].cl).norm() <= 1e-6);
      CHECK(angle_between(cl.paths[p][i].u, tp.paths[p].postures[i].axis) <= 1e-9);
    }
  }
  std::istringstream bad("GOTO/ 1,2,3\n");
  CHECK_THROWS_AS(read_cl(bad), Error);
}

TEST_CASE("CL postures survive the NC program") {
  const ToolPath tp = saddle_toolpath();
  MachineModel m;
  m.o_ca = Vec3(0, 0, 80);
  m.o_am = Vec3(0, 0, -200);
  const KinematicProfile prof = simulate(tp, m, 5000);
  // Solved joints reproduce every posture at full precision...
  for (std::size_t p = 0; p < tp.paths.size(); ++p) {
    for (std::size_t i = 0; i < tp.paths[p].postures.size(); ++i) {
      const PartPose back = forward(prof.paths[p].blocks[i].end, m);
      CHECK((back.p - tp.paths[p].postures[i].cl).norm() <= 1e-6);
      CHECK(angle_between(back.u, tp.paths[p].postures[i].axis) <= 1e-9);
    }
  }
  // ...and the 4-decimal program to within its quantisation.
  std::vector<JointBlockPath> blocks;
  for (const PathProfile& p : prof.paths) {
    JointBlockPath jb;
    for (const BlockRecord& b : p.blocks) {
      jb.poses.push_back(b.end);
      jb.lengths.push_back(b.length);
    }
    blocks.push_back(jb);
  }
  std::istringstream in(emit_gcode(blocks, 5000));
  const auto joints = read_nc(in);
  // Corner planes that only touch the surface emit no motion.
  std::vector<const Path*> cut;
  for (const Path& p : tp.paths) {
    if (!p.postures.empty()) cut.push_back(&p);
  }
  REQUIRE(cut.size() < tp.paths.size());
  REQUIRE(joints.size() == cut.size());
  const double step = 0.5e-4;
  const double rad = step * 3.14159265358979 / 180;
  for (std::size_t p = 0; p < cut.size(); ++p) {
    // Merged zero-length records aside, every posture has its own block.
    REQUIRE(joints[p].size() == cut[p]->postures.size());
    for (std::size_t i = 0; i < joints[p].size(); ++i) {
      const PartPose back = forward(joints[p][i], m);
      const Vec3& target = cut[p]->postures[i].cl;
      const double lever = (target - Vec3(0, 0, 0)).norm() + m.o_ca.norm() + m.o_am.norm();
      CHECK((back.p - target).norm() <= std::sqrt(3.0) * step + 2 * rad * lever);
      CHECK(angle_between(back.u, cut[p]->postures[i].axis) <= 2 * rad);
    }
  }
}
