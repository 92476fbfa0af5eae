#include <doctest.h>

#include <cmath>

#include "hsm5/intersection.hpp"

using namespace hsm5;

namespace {

const ParametricSurface kSaddle = ParametricSurface::saddle(50, 50, 20);

Plane plane_through(const Vec3& p, const Vec3& n) { return Plane{p, n.normalized()}; }

// Largest gap between a polyline and the true curve, sampled 10x denser than
// the polyline by projecting interpolated parameters back onto the curve.
double dense_deviation(const ParametricSurface& s, const PlaneCurve& c) {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < c.samples.size(); ++i) {
    const CurveSample& a = c.samples[i];
    const CurveSample& b = c.samples[i + 1];
    const Vec3 d = b.p - a.p;
    for (int k = 1; k < 10; ++k) {
      double u = a.u + (b.u - a.u) * k / 10.0, v = a.v + (b.v - a.v) * k / 10.0;
      if (!project_to_curve(s, c.plane, u, v)) continue;
      const Vec3 q = s.evaluate(u, v).p;
      const double t = std::clamp((q - a.p).dot(d) / d.squaredNorm(), 0.0, 1.0);
      worst = std::max(worst, (q - (a.p + t * d)).norm());
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("diagonal plane through the saddle centre") {
  // Plane x = y: curve z = x^2 / 125 through the origin.
  const Plane plane = plane_through(Vec3::Zero(), Vec3(1, -1, 0));
  const IntersectionResult r = plane_intersection(kSaddle, plane, 0.005);
  REQUIRE(r.branches.size() == 1);
  const PlaneCurve& c = r.branches.front();
  bool through_origin = false;
  for (const CurveSample& s : c.samples) {
    CHECK(std::abs(s.p.x() - s.p.y()) < 1e-9);
    CHECK(std::abs(s.p.z() - s.p.x() * s.p.y() / 125.0) < 1e-9);
    through_origin |= s.p.norm() < 1.0;
  }
  CHECK(through_origin);
  // Endpoints on the domain boundary.
  const auto on_boundary = [](const CurveSample& s) {
    return std::abs(std::abs(s.u) - 1) < 1e-9 || std::abs(std::abs(s.v) - 1) < 1e-9;
  };
  CHECK(on_boundary(c.samples.front()));
  CHECK(on_boundary(c.samples.back()));
}

TEST_CASE("plane x = 0 gives the straight ruling z = 0") {
  const IntersectionResult r = plane_intersection(kSaddle, plane_through(Vec3::Zero(), Vec3(1, 0, 0)), 0.005);
  REQUIRE(r.branches.size() == 1);
  for (const CurveSample& s : r.branches.front().samples) {
    CHECK(std::abs(s.p.x()) < 1e-9);
    CHECK(std::abs(s.p.z()) < 1e-9);
  }
  CHECK(r.branches.front().length() == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("plane outside the patch") {
  const IntersectionResult r = plane_intersection(kSaddle, plane_through(Vec3(200, 0, 0), Vec3(1, 0, 0)), 0.005);
  CHECK(r.empty());
}

TEST_CASE("horizontal plane through the saddle centre is degenerate") {
  // z = 0 meets the saddle in two crossing rulings.
  const IntersectionResult r = plane_intersection(kSaddle, plane_through(Vec3::Zero(), Vec3(0, 0, 1)), 0.005);
  CHECK(r.degenerate);
  for (const PlaneCurve& c : r.branches) {
    for (const CurveSample& s : c.samples) CHECK(std::abs(s.p.z()) < 1e-9);
  }
}

TEST_CASE("residual and chordal tolerance on the drive planes") {
  const Vec3 n = Vec3(-1, 1, 0).normalized();
  for (double offset = -68; offset <= 68; offset += 8.5) {
    const Plane plane{offset * n, n};
    MarchOptions opt;
    opt.chord_tol = 0.005;
    opt.max_step = 1.0;
    const IntersectionResult r = plane_intersection(kSaddle, plane, opt);
    REQUIRE(r.branches.size() == 1);
    const PlaneCurve& c = r.branches.front();
    double worst_residual = 0.0;
    for (std::size_t i = 0; i < c.samples.size(); ++i) {
      worst_residual = std::max(worst_residual, std::abs(plane.signed_distance(c.samples[i].p)));
      if (i > 0) {
        CHECK((c.samples[i].p - c.samples[i - 1].p).norm() <= 1.0 + 1e-9);
        CHECK((c.samples[i].p - c.samples[i - 1].p).norm() > 0.0);
      }
    }
    CHECK(worst_residual <= 1e-9);
    CHECK(dense_deviation(kSaddle, c) <= 0.005);
  }
}

TEST_CASE("coarse tolerance is still honoured on a curved patch") {
  const auto bowl = ParametricSurface::patch(2, 2, {{-50, -50, 30}, {-50, 0, 0}, {-50, 50, 30},
                                                    {0, -50, 0}, {0, 0, -30}, {0, 50, 0},
                                                    {50, -50, 30}, {50, 0, 0}, {50, 50, 30}});
  MarchOptions opt;
  opt.chord_tol = 0.05;
  opt.max_step = 20.0;
  const Plane plane = plane_through(Vec3(0, 10, 0), Vec3(0, 1, 0));
  const IntersectionResult r = plane_intersection(bowl, plane, opt);
  REQUIRE(r.branches.size() == 1);
  CHECK(dense_deviation(bowl, r.branches.front()) <= 0.05);
  CHECK(r.branches.front().samples.size() > 5);
}
