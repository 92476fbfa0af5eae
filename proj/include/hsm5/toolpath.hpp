#pragma once

#include <cstddef>
#include <vector>

#include "hsm5/intersection.hpp"
#include "hsm5/machining_surface.hpp"
#include "hsm5/orientation_field.hpp"

namespace hsm5 {

struct MachiningStrategy {
  double plane_angle = 45.0;        // deg, drive-plane direction in XY
  double stepover = 2.0;            // mm between guiding planes
  double chord_tol = 0.005;         // mm
  double max_sample_spacing = 1.0;  // mm
  double base_tilt = 1.0;           // deg
  double base_yaw = 0.0;            // deg
  double scallop_tol = 0.002;       // mm
  double tilt_min = 0.5;            // deg
  double tilt_max = 15.0;           // deg
  bool zigzag = true;
  int field_columns = 0;  // 0: one column per drive plane

  void validate() const;
};

struct DrivePlane {
  Plane plane;
  double offset = 0.0;  // signed distance of the plane from the origin
};

/// Maps part-frame points to the field's sample coordinate by their position
/// along the drive direction, so neighbouring paths share columns spatially.
struct FieldMapping {
  Vec3 along = Vec3::UnitX();
  double s_min = 0.0;
  double s_max = 1.0;
  int columns = 1;

  double column(const Vec3& p) const;
  double spacing() const { return columns > 1 ? (s_max - s_min) / (columns - 1) : s_max - s_min; }
};

struct Path {
  double offset = 0.0;  // drive-plane offset
  double row = 0.0;     // field row coordinate (fractional for inserted paths)
  int level = 0;        // 0 for planned planes, refinement level otherwise
  bool reversed = false;
  std::vector<CutterLocation> postures;
  std::vector<double> columns;  // field column of each posture
};

struct ToolPath {
  std::vector<Path> paths;
  MachiningStrategy strategy;
  CutterGeometry tool;
  OrientationField field;
  FieldMapping mapping;

  std::size_t posture_count() const;
};

/// Parallel planes with normal (cos(angle+90), sin(angle+90), 0), `stepover`
/// apart and centred on the XY bounds; count = ceil(extent/stepover) + 1.
std::vector<DrivePlane> plan_planes(const ParametricSurface& surface, const MachiningStrategy& strategy);

FieldMapping field_mapping(const ParametricSurface& surface, const MachiningStrategy& strategy);

/// Uniform base-tilt field sized for the planned planes and mapping.
OrientationField initial_field(const ParametricSurface& surface, const MachiningStrategy& strategy);

/// Builds every posture of every drive plane. Geometry errors are rethrown
/// with the (path, sample) location prefixed to the message.
ToolPath generate(const ParametricSurface& surface, const MachiningStrategy& strategy, const CutterGeometry& tool,
                  const OrientationField& field, std::size_t workers = 1);

/// One path on the plane at `offset`, tilts taken from field row `row`.
/// Postures outside [column_lo, column_hi] are dropped.
Path generate_path(const ParametricSurface& surface, const ToolPath& context, double offset, double row,
                   bool reversed, int level = 0, double column_lo = -1e300, double column_hi = 1e300,
                   int path_index = -1);

/// Rebuilds the postures of the listed paths from the (possibly deformed)
/// field stored in `toolpath`.
void regenerate_paths(const ParametricSurface& surface, ToolPath& toolpath, const std::vector<std::size_t>& indices,
                      std::size_t workers = 1);

}  // namespace hsm5
