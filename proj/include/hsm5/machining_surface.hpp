#pragma once

#include "hsm5/surface.hpp"

namespace hsm5 {

/// Filleted end mill. R is the distance from the axis to the centre circle of
/// the corner torus, r the corner radius; the shank radius is R + r.
struct CutterGeometry {
  double R = 9.0;
  double r = 1.0;

  double shank_radius() const { return R + r; }
  void validate() const;
};

// One tool posture of the machining surface. k lies on the guiding surface
// (offset of the part by r) and cl on the orientation surface (the tool-axis
// point in the plane of the torus centre circle).
struct CutterLocation {
  Vec3 cc;
  LocalFrame frame;
  double tilt = 0.0;  // deg, lean from n toward f
  double yaw = 0.0;   // deg, azimuth about n
  Vec3 axis;
  Vec3 k;
  Vec3 cl;
  double u = 0.0;
  double v = 0.0;
};

/// u = cos(tilt) n + sin(tilt) (cos(yaw) f + sin(yaw) t).
Vec3 tool_axis(const LocalFrame& frame, double tilt_deg, double yaw_deg);

Vec3 guide_point(const Vec3& cc, const Vec3& n, double r);

/// Tool-axis point C_L = cc + r n + R v, with v the unit direction from the
/// contact-side tube centre toward the axis: v = normalize(n - (n.u) u).
/// Throws GeometryError(AxisSingularity) when n is parallel to the axis and R > 0.
Vec3 axis_point(const Vec3& cc, const Vec3& n, const Vec3& axis, const CutterGeometry& tool);

CutterLocation make_cutter_location(const Vec3& cc, const LocalFrame& frame, double tilt_deg, double yaw_deg,
                                    const CutterGeometry& tool, double u = 0.0, double v = 0.0);

}  // namespace hsm5
