#include "hsm5/machining_surface.hpp"

#include <cmath>
#include <numbers>

namespace hsm5 {

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;
}

void CutterGeometry::validate() const {
  if (!(R > 0.0)) throw DomainError("tool R must be > 0");
  if (!(r >= 0.0)) throw DomainError("tool r must be >= 0");
}

Vec3 tool_axis(const LocalFrame& frame, double tilt_deg, double yaw_deg) {
  const double tilt = tilt_deg * kDeg;
  const double yaw = yaw_deg * kDeg;
  const Vec3 lean = std::cos(yaw) * frame.f + std::sin(yaw) * frame.t;
  return std::cos(tilt) * frame.n + std::sin(tilt) * lean;
}

Vec3 guide_point(const Vec3& cc, const Vec3& n, double r) { return cc + r * n; }

Vec3 axis_point(const Vec3& cc, const Vec3& n, const Vec3& axis, const CutterGeometry& tool) {
  const Vec3 k = guide_point(cc, n, tool.r);
  if (tool.R == 0.0) return k;
  const Vec3 radial = n - n.dot(axis) * axis;
  const double len = radial.norm();
  if (!(len > 1e-12)) {
    throw GeometryError(ErrorKind::AxisSingularity, "tool axis parallel to the surface normal (flat-bottom contact)");
  }
  return k + tool.R * (radial / len);
}

CutterLocation make_cutter_location(const Vec3& cc, const LocalFrame& frame, double tilt_deg, double yaw_deg,
                                    const CutterGeometry& tool, double u, double v) {
  CutterLocation loc;
  loc.cc = cc;
  loc.frame = frame;
  loc.tilt = tilt_deg;
  loc.yaw = yaw_deg;
  loc.axis = tool_axis(frame, tilt_deg, yaw_deg);
  loc.k = guide_point(cc, frame.n, tool.r);
  loc.cl = axis_point(cc, frame.n, loc.axis, tool);
  loc.u = u;
  loc.v = v;
  return loc;
}

}  // namespace hsm5
