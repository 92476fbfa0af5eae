#pragma once

#include <limits>
#include <vector>

#include "hsm5/toolpath.hpp"

namespace hsm5 {

/// Large radius of the elliptical effective cutter profile in the plane normal
/// to the feed direction:
///   R_eq = r (R + r sin t) / (r sin t cos^2 y + (R + r sin t) sin^2 y)
/// which at zero yaw reduces to (R + r sin t) / sin t. Returns +infinity when
/// the denominator vanishes (zero tilt and zero yaw: flat-bottom contact).
double effective_radius(const CutterGeometry& tool, double tilt_deg, double yaw_deg);

/// Yaw-free closed form, kept separate as an algebraic cross-check.
double effective_radius_zero_yaw(const CutterGeometry& tool, double tilt_deg);

inline bool is_infinite_radius(double r_eq) { return r_eq == std::numeric_limits<double>::infinity(); }

/// Cusp height left between two circular profiles of radii r_left and r_right
/// resting on a flat surface with centres `stepover` apart. Infinite radii
/// (flat bottom) leave no cusp. Throws Error(NoOverlap) when the profiles do
/// not intersect.
double scallop_height(double r_left, double r_right, double stepover);

struct SampleRef {
  int path = 0;
  int sample = 0;

  bool operator==(const SampleRef&) const = default;
};

/// Scallop at one posture against the next path (by offset) that covers it.
struct ScallopSample {
  SampleRef at;
  int neighbour = -1;
  double gap = 0.0;     // mm
  double height = 0.0;  // mm, +inf when the profiles do not overlap
  double column = 0.0;
};

std::vector<ScallopSample> scallop_map(const ToolPath& toolpath);
double max_scallop(const ToolPath& toolpath);

struct TightenResult {
  ToolPath toolpath;
  int levels = 0;         // refinement levels that inserted planes
  int inserted = 0;       // inserted partial paths
  bool limit_reached = false;
  double residual = 0.0;  // max scallop after refinement, mm
};

/// Inserts mid planes, restricted to the offending span, between adjacent paths
/// whose scallop exceeds `scallop_tol`; up to `max_levels` bisection levels.
TightenResult tighten(const ParametricSurface& surface, const ToolPath& toolpath, double scallop_tol,
                      int max_levels = 3, std::size_t workers = 1);

/// Postures whose effective radius exceeds the local concave radius of the
/// surface across the feed direction.
std::vector<SampleRef> gouge_check(const ToolPath& toolpath, const ParametricSurface& surface);

}  // namespace hsm5
