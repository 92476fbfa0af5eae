#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hsm5/errors.hpp"
#include "hsm5/intersection.hpp"
#include "hsm5/toolpath.hpp"

using namespace hsm5;

namespace {

const ParametricSurface kSaddle = ParametricSurface::saddle(50, 50, 20);

ParametricSurface flat(double z = 0.0) {
  return ParametricSurface::patch(1, 1, {{-50, -50, z}, {-50, 50, z}, {50, -50, z}, {50, 50, z}});
}

ToolPath build(const ParametricSurface& s, const MachiningStrategy& st, const CutterGeometry& tool = {}) {
  return generate(s, st, tool, initial_field(s, st));
}

}  // namespace

TEST_CASE("plan_planes") {
  MachiningStrategy st;
  const auto planes = plan_planes(kSaddle, st);
  CHECK(planes.size() == 72);
  const Vec3 n(std::cos(135 * std::numbers::pi / 180), std::sin(135 * std::numbers::pi / 180), 0);
  for (std::size_t k = 0; k < planes.size(); ++k) {
    CHECK((planes[k].plane.normal - n).norm() < 1e-15);
    if (k > 0) CHECK(planes[k].offset - planes[k - 1].offset == doctest::Approx(2.0));
  }
  CHECK(planes.front().offset == doctest::Approx(-planes.back().offset));

  st.stepover = 500;
  CHECK(plan_planes(kSaddle, st).size() == 2);

  st.stepover = 2;
  st.plane_angle = 0;
  const auto horizontal = plan_planes(kSaddle, st);
  CHECK(horizontal.size() == 51);
  CHECK((horizontal.front().plane.normal - Vec3(0, 1, 0)).norm() < 1e-15);
}

TEST_CASE("strategy validation") {
  MachiningStrategy st;
  st.stepover = 0;
  CHECK_THROWS_AS(st.validate(), DomainError);
  st = MachiningStrategy{};
  st.chord_tol = -1;
  CHECK_THROWS_AS(st.validate(), DomainError);
  st = MachiningStrategy{};
  st.scallop_tol = 0;
  CHECK_THROWS_AS(st.validate(), DomainError);
}

TEST_CASE("flat patch, constant tilt") {
  MachiningStrategy st;
  st.plane_angle = 0;
  st.stepover = 5;
  const CutterGeometry tool{9, 1};
  const ToolPath tp = build(flat(), st, tool);
  REQUIRE(tp.paths.size() == 21);
  const double height = tool.r + tool.R * std::sin(std::numbers::pi / 180);
  for (const Path& p : tp.paths) {
    REQUIRE(p.postures.size() >= 100);
    for (const CutterLocation& c : p.postures) {
      CHECK(c.cl.z() == doctest::Approx(height).epsilon(1e-12));
      CHECK((c.axis - p.postures.front().axis).norm() < 1e-12);
      CHECK(c.axis.dot(c.frame.n) == doctest::Approx(std::cos(std::numbers::pi / 180)).epsilon(1e-12));
    }
  }
  // Zigzag: consecutive paths run in opposite directions.
  CHECK(tp.paths[0].postures.front().frame.f.dot(tp.paths[1].postures.front().frame.f) == doctest::Approx(-1.0));
  st.zigzag = false;
  const ToolPath oneway = build(flat(), st, tool);
  CHECK(oneway.paths[0].postures.front().frame.f.dot(oneway.paths[1].postures.front().frame.f) ==
        doctest::Approx(1.0));
}

TEST_CASE("default saddle toolpath") {
  MachiningStrategy st;
  const ToolPath tp = build(kSaddle, st);
  CHECK(tp.paths.size() == 72);
  CHECK(tp.field.rows() == 72);
  for (std::size_t k = 0; k < tp.paths.size(); ++k) {
    const Path& p = tp.paths[k];
    CHECK(p.row == static_cast<double>(k));
    for (std::size_t i = 0; i < p.postures.size(); ++i) {
      const CutterLocation& c = p.postures[i];
      CHECK(c.axis.dot(c.frame.n) == doctest::Approx(std::cos(std::numbers::pi / 180)).epsilon(1e-10));
      CHECK(std::abs((c.cl - c.k).dot(c.axis)) < 1e-10);
      if (i > 0) CHECK((c.cc - p.postures[i - 1].cc).norm() <= st.max_sample_spacing + 1e-9);
    }
  }
  // Samples along every plane stay within the chordal tolerance of the true
  // curve (10x denser projection oracle).
  const Vec3 n = plan_planes(kSaddle, st).front().plane.normal;
  for (std::size_t k = 4; k < tp.paths.size(); k += 9) {
    const Path& p = tp.paths[k];
    const Plane plane{p.offset * n, n};
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < p.postures.size(); ++i) {
      const CutterLocation& a = p.postures[i];
      const CutterLocation& b = p.postures[i + 1];
      const Vec3 d = b.cc - a.cc;
      for (int j = 1; j < 10; ++j) {
        double u = a.u + (b.u - a.u) * j / 10.0, v = a.v + (b.v - a.v) * j / 10.0;
        REQUIRE(project_to_curve(kSaddle, plane, u, v));
        const Vec3 q = kSaddle.evaluate(u, v).p;
        const double t = std::clamp((q - a.cc).dot(d) / d.squaredNorm(), 0.0, 1.0);
        worst = std::max(worst, (q - (a.cc + t * d)).norm());
      }
    }
    CHECK(worst <= st.chord_tol);
  }
}

TEST_CASE("generate is deterministic and worker-independent") {
  MachiningStrategy st;
  const ToolPath a = build(kSaddle, st);
  const ToolPath b = generate(kSaddle, st, CutterGeometry{}, initial_field(kSaddle, st), 4);
  REQUIRE(a.paths.size() == b.paths.size());
  for (std::size_t k = 0; k < a.paths.size(); ++k) {
    REQUIRE(a.paths[k].postures.size() == b.paths[k].postures.size());
    for (std::size_t i = 0; i < a.paths[k].postures.size(); ++i) {
      CHECK(a.paths[k].postures[i].cl == b.paths[k].postures[i].cl);
      CHECK(a.paths[k].postures[i].axis == b.paths[k].postures[i].axis);
    }
  }
}

TEST_CASE("field size must match the planes") {
  MachiningStrategy st;
  CHECK_THROWS_AS(generate(kSaddle, st, CutterGeometry{}, OrientationField(10, 10, 1.0)), DomainError);
}

TEST_CASE("geometry errors carry the posture location") {
  // Zero tilt on a torus with R > 0 has no axis point.
  MachiningStrategy st;
  st.tilt_min = 0;
  st.base_tilt = 0;
  st.plane_angle = 0;
  st.stepover = 25;
  try {
    build(flat(), st);
    FAIL("expected an axis singularity");
  } catch (const GeometryError& e) {
    CHECK(e.kind() == ErrorKind::AxisSingularity);
    CHECK(std::string(e.what()).find("path 0, sample 0") != std::string::npos);
  }
}

TEST_CASE("regenerate follows a deformed field") {
  MachiningStrategy st;
  ToolPath tp = build(kSaddle, st);
  const FieldRegion region{30, 30, 20, 50};
  tp.field = deform_field(tp.field, std::span(&region, 1), 5.0, BlendHalfwidth(1, 4));
  regenerate_paths(kSaddle, tp, {29, 30, 31});
  double max_tilt = 0.0;
  for (const CutterLocation& c : tp.paths[30].postures) max_tilt = std::max(max_tilt, c.tilt);
  // Plateau value, up to the spline's overshoot next to the ramp.
  CHECK(max_tilt >= 5.0 - 1e-9);
  CHECK(max_tilt <= 5.0 * 1.01);
  for (const CutterLocation& c : tp.paths[32].postures) CHECK(c.tilt == doctest::Approx(1.0));
}
