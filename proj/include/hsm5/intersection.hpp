#pragma once

#include <vector>

#include "hsm5/surface.hpp"

namespace hsm5 {

struct Plane {
  Vec3 point;
  Vec3 normal;  // unit

  double signed_distance(const Vec3& p) const { return (p - point).dot(normal); }
};

struct CurveSample {
  double u = 0.0;
  double v = 0.0;
  Vec3 p;
};

// One connected branch of a plane/surface intersection, ordered from one
// domain-boundary end to the other.
struct PlaneCurve {
  Plane plane;
  std::vector<CurveSample> samples;

  double length() const;
};

struct IntersectionResult {
  std::vector<PlaneCurve> branches;
  // Set when a branch crosses or stalls at a point where the plane is
  // tangent to the surface (grazing contact, crossing rulings).
  bool degenerate = false;

  bool empty() const { return branches.empty(); }
};

struct MarchOptions {
  double chord_tol = 0.005;   // mm
  double max_step = 0.0;      // mm; 0 selects bounds diagonal / 50
  int boundary_scan = 200;    // seeds per domain edge
};

/// Marches every boundary-to-boundary branch of surface ∩ plane. Each sample is
/// Newton-projected onto the plane to |residual| <= 1e-10 mm and the chordal
/// deviation of every polyline segment stays within chord_tol. Closed interior
/// loops that never reach the boundary are not traced.
IntersectionResult plane_intersection(const ParametricSurface& surface, const Plane& plane,
                                      const MarchOptions& options);
IntersectionResult plane_intersection(const ParametricSurface& surface, const Plane& plane, double chord_tol);

/// Projects (u,v) onto the intersection curve along the gradient of the plane
/// residual. Returns false if Newton fails to converge inside the domain.
bool project_to_curve(const ParametricSurface& surface, const Plane& plane, double& u, double& v);

/// Deviation of the true curve between two samples from their chord, measured at
/// the projected parametric midpoint.
double chord_deviation(const ParametricSurface& surface, const Plane& plane, const CurveSample& a,
                       const CurveSample& b);

}  // namespace hsm5
