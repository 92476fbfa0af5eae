#include "hsm5/orientation_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "hsm5/errors.hpp"

namespace hsm5 {
namespace {

// Cubic Hermite on a uniform grid with Catmull-Rom slopes (one-sided at the ends).
template <typename Value>
double catmull_rom(const Value& value, int n, double x) {
  if (n == 1) return value(0);
  const int i0 = std::clamp(static_cast<int>(std::floor(x)), 0, n - 2);
  const double t = x - i0;
  auto slope = [&](int i) {
    if (i == 0) return value(1) - value(0);
    if (i == n - 1) return value(n - 1) - value(n - 2);
    return 0.5 * (value(i + 1) - value(i - 1));
  };
  const double p0 = value(i0), p1 = value(i0 + 1);
  const double m0 = slope(i0), m1 = slope(i0 + 1);
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1;
}

double raised_cosine(double x) { return x >= 1.0 ? 0.0 : 0.5 * (1.0 + std::cos(std::numbers::pi * x)); }

int gap(int i, int first, int last) {
  if (i < first) return first - i;
  if (i > last) return i - last;
  return 0;
}

}  // namespace

OrientationField::OrientationField(int rows, int columns, double base_tilt, double tilt_min, double tilt_max,
                                   double yaw)
    : rows_(rows), cols_(columns), base_tilt_(base_tilt), tilt_min_(tilt_min), tilt_max_(tilt_max), yaw_(yaw) {
  if (rows < 1 || columns < 1) throw DomainError("orientation field needs at least one node");
  if (!(tilt_min <= tilt_max)) throw DomainError("tilt_min must not exceed tilt_max");
  if (base_tilt < tilt_min || base_tilt > tilt_max) throw DomainError("base tilt outside [tilt_min, tilt_max]");
  values_.assign(static_cast<std::size_t>(rows) * columns, base_tilt);
}

std::size_t OrientationField::index(int row, int column) const {
  if (row < 0 || row >= rows_ || column < 0 || column >= cols_) throw DomainError("field node outside the grid");
  return static_cast<std::size_t>(row) * cols_ + column;
}

double OrientationField::tilt(double path, double sample) const {
  const double eps = 1e-9;
  if (!(path >= -eps && path <= rows_ - 1 + eps && sample >= -eps && sample <= cols_ - 1 + eps)) {
    std::ostringstream os;
    os << "field query (" << path << ", " << sample << ") outside the grid";
    throw DomainError(os.str());
  }
  path = std::clamp(path, 0.0, static_cast<double>(rows_ - 1));
  sample = std::clamp(sample, 0.0, static_cast<double>(cols_ - 1));
  auto row_value = [&](int row) {
    const double* base = values_.data() + static_cast<std::size_t>(row) * cols_;
    return catmull_rom([base](int j) { return base[j]; }, cols_, sample);
  };
  return catmull_rom(row_value, rows_, path);
}

OrientationField with_node_values(const OrientationField& field, std::vector<double> values) {
  if (values.size() != field.values_.size()) throw DomainError("node value count does not match the grid");
  OrientationField out = field;
  out.values_ = std::move(values);
  return out;
}

OrientationField deform_field(const OrientationField& field, std::span<const FieldRegion> regions,
                              double target_tilt, BlendHalfwidth halfwidth) {
  if (regions.empty()) return field;
  if (target_tilt < field.tilt_min() || target_tilt > field.tilt_max()) {
    throw DomainError("target tilt outside [tilt_min, tilt_max]");
  }
  if (halfwidth.paths < 0 || halfwidth.samples < 0) throw DomainError("blend halfwidth must be >= 0");
  for (const FieldRegion& r : regions) {
    if (r.path_first > r.path_last || r.sample_first > r.sample_last || r.path_first < 0 ||
        r.sample_first < 0 || r.path_last >= field.rows() || r.sample_last >= field.columns()) {
      throw DomainError("deformation region outside the field grid");
    }
  }
  std::vector<double> values = field.nodes();
  for (int i = 0; i < field.rows(); ++i) {
    for (int j = 0; j < field.columns(); ++j) {
      double w = 0.0;
      for (const FieldRegion& r : regions) {
        const double wp = raised_cosine(gap(i, r.path_first, r.path_last) / (halfwidth.paths + 1.0));
        const double ws = raised_cosine(gap(j, r.sample_first, r.sample_last) / (halfwidth.samples + 1.0));
        w = std::max(w, wp * ws);
      }
      if (w == 0.0) continue;
      double& value = values[static_cast<std::size_t>(i) * field.columns() + j];
      value = (w == 1.0) ? target_tilt : value + w * (target_tilt - value);
    }
  }
  return with_node_values(field, std::move(values));
}

void write_field_csv(std::ostream& os, const OrientationField& field) {
  os << "path_index,sample_index,tilt_deg\n";
  char buf[96];
  for (int i = 0; i < field.rows(); ++i) {
    for (int j = 0; j < field.columns(); ++j) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.6f\n", i, j, field.node(i, j));
      os << buf;
    }
  }
}

}  // namespace hsm5
