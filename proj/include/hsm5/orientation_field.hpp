#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace hsm5 {

// Tilt angle field over the (path, sample) grid. Its image through the
// posture construction is the orientation surface; deforming the field is how
// tool-axis changes propagate smoothly to neighbouring paths.
//
// Queries use Catmull-Rom bicubic interpolation in grid coordinates: node
// values are reproduced exactly and the interpolant is C1.
class OrientationField {
 public:
  OrientationField() = default;
  OrientationField(int rows, int columns, double base_tilt, double tilt_min = 0.5, double tilt_max = 15.0,
                   double yaw = 0.0);

  int rows() const { return rows_; }
  int columns() const { return cols_; }
  double base_tilt() const { return base_tilt_; }
  double tilt_min() const { return tilt_min_; }
  double tilt_max() const { return tilt_max_; }
  double yaw() const { return yaw_; }

  double node(int row, int column) const { return values_[index(row, column)]; }
  const std::vector<double>& nodes() const { return values_; }

  /// Interpolated tilt in degrees; throws DomainError outside [0,rows-1]x[0,cols-1].
  double tilt(double path, double sample) const;

  bool operator==(const OrientationField&) const = default;

 private:
  friend OrientationField with_node_values(const OrientationField&, std::vector<double>);
  std::size_t index(int row, int column) const;

  int rows_ = 0;
  int cols_ = 0;
  double base_tilt_ = 1.0;
  double tilt_min_ = 0.5;
  double tilt_max_ = 15.0;
  double yaw_ = 0.0;
  std::vector<double> values_;
};

/// Rectangle of grid nodes, inclusive on both ends.
struct FieldRegion {
  int path_first = 0;
  int path_last = 0;
  int sample_first = 0;
  int sample_last = 0;
};

/// Blend widths in grid cells along the path index and along the samples.
struct BlendHalfwidth {
  int paths = 1;
  int samples = 1;

  BlendHalfwidth() = default;
  BlendHalfwidth(int both) : paths(both), samples(both) {}
  BlendHalfwidth(int p, int s) : paths(p), samples(s) {}
};

/// Copy of `field` with node values replaced; values must match the grid size.
OrientationField with_node_values(const OrientationField& field, std::vector<double> values);

/// Sets nodes inside the regions to target_tilt and raised-cosine blends the
/// nodes within the halfwidth toward it. Nodes farther away are untouched.
/// An empty region list returns the field unchanged.
OrientationField deform_field(const OrientationField& field, std::span<const FieldRegion> regions,
                              double target_tilt, BlendHalfwidth halfwidth);

/// `path_index,sample_index,tilt_deg` for every node.
void write_field_csv(std::ostream& os, const OrientationField& field);

}  // namespace hsm5
