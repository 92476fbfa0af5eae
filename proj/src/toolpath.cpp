#include "hsm5/toolpath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hsm5/parallel.hpp"

namespace hsm5 {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Vec3 plane_normal(const MachiningStrategy& s) {
  const double a = (s.plane_angle + 90.0) * kDeg;
  return Vec3(std::cos(a), std::sin(a), 0.0);
}

Vec3 drive_direction(const MachiningStrategy& s) {
  const double a = s.plane_angle * kDeg;
  return Vec3(std::cos(a), std::sin(a), 0.0);
}

std::pair<double, double> projected_extent(const Box3& box, const Vec3& dir) {
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < 4; ++i) {
    const Vec3 corner((i & 1) ? box.hi.x() : box.lo.x(), (i & 2) ? box.hi.y() : box.lo.y(), 0.0);
    const double d = corner.dot(dir);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

[[noreturn]] void rethrow_located(const Error& e, int path, int sample) {
  std::ostringstream os;
  os << "path " << path << ", sample " << sample << ": " << e.what();
  if (dynamic_cast<const GeometryError*>(&e)) throw GeometryError(e.kind(), os.str());
  if (dynamic_cast<const DomainError*>(&e)) throw DomainError(os.str());
  if (dynamic_cast<const UnreachablePoseError*>(&e)) throw UnreachablePoseError(os.str());
  throw Error(e.kind(), os.str());
}

}  // namespace

void MachiningStrategy::validate() const {
  if (!(stepover > 0.0)) throw DomainError("strategy.stepover must be > 0");
  if (!(chord_tol > 0.0)) throw DomainError("strategy.chord_tol must be > 0");
  if (!(max_sample_spacing > 0.0)) throw DomainError("strategy.max_sample_spacing must be > 0");
  if (!(scallop_tol > 0.0)) throw DomainError("strategy.scallop_tol must be > 0");
  if (field_columns < 0 || field_columns == 1) throw DomainError("strategy.field_columns must be 0 or >= 2");
}

double FieldMapping::column(const Vec3& p) const {
  if (columns <= 1 || s_max <= s_min) return 0.0;
  const double c = (p.dot(along) - s_min) / (s_max - s_min) * (columns - 1);
  return std::clamp(c, 0.0, static_cast<double>(columns - 1));
}

std::size_t ToolPath::posture_count() const {
  std::size_t n = 0;
  for (const Path& p : paths) n += p.postures.size();
  return n;
}

std::vector<DrivePlane> plan_planes(const ParametricSurface& surface, const MachiningStrategy& strategy) {
  strategy.validate();
  const Vec3 normal = plane_normal(strategy);
  const auto [lo, hi] = projected_extent(surface.bounds(), normal);
  const int count = static_cast<int>(std::ceil((hi - lo) / strategy.stepover - 1e-12)) + 1;
  const double centre = 0.5 * (lo + hi);
  std::vector<DrivePlane> planes;
  planes.reserve(count);
  for (int k = 0; k < count; ++k) {
    const double offset = centre + (k - 0.5 * (count - 1)) * strategy.stepover;
    planes.push_back(DrivePlane{Plane{offset * normal, normal}, offset});
  }
  return planes;
}

FieldMapping field_mapping(const ParametricSurface& surface, const MachiningStrategy& strategy) {
  FieldMapping m;
  m.along = drive_direction(strategy);
  const auto [lo, hi] = projected_extent(surface.bounds(), m.along);
  m.s_min = lo;
  m.s_max = hi;
  m.columns = strategy.field_columns > 0 ? strategy.field_columns
                                         : std::max(2, static_cast<int>(plan_planes(surface, strategy).size()));
  return m;
}

OrientationField initial_field(const ParametricSurface& surface, const MachiningStrategy& strategy) {
  const int rows = static_cast<int>(plan_planes(surface, strategy).size());
  return OrientationField(rows, field_mapping(surface, strategy).columns, strategy.base_tilt, strategy.tilt_min,
                          strategy.tilt_max, strategy.base_yaw);
}

Path generate_path(const ParametricSurface& surface, const ToolPath& context, double offset, double row,
                   bool reversed, int level, double column_lo, double column_hi, int path_index) {
  const MachiningStrategy& strategy = context.strategy;
  const Vec3 normal = plane_normal(strategy);
  Path path;
  path.offset = offset;
  path.row = row;
  path.level = level;
  path.reversed = reversed;

  MarchOptions opt;
  opt.chord_tol = strategy.chord_tol;
  opt.max_step = strategy.max_sample_spacing;
  const IntersectionResult hit = plane_intersection(surface, Plane{offset * normal, normal}, opt);
  if (hit.empty()) return path;
  const PlaneCurve* curve = &hit.branches.front();
  for (const PlaneCurve& b : hit.branches) {
    if (b.length() > curve->length()) curve = &b;
  }
  std::vector<CurveSample> samples = curve->samples;
  const Vec3& along = context.mapping.along;
  if (samples.front().p.dot(along) > samples.back().p.dot(along)) std::reverse(samples.begin(), samples.end());
  if (reversed) std::reverse(samples.begin(), samples.end());

  std::vector<CurveSample> kept;
  for (const CurveSample& s : samples) {
    const double c = context.mapping.column(s.p);
    if (c >= column_lo && c <= column_hi) kept.push_back(s);
  }
  if (kept.size() < 2) return path;

  const int label = path_index >= 0 ? path_index : static_cast<int>(std::lround(row));
  path.postures.reserve(kept.size());
  path.columns.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const CurveSample& s = kept[i];
    try {
      const SurfacePoint sp = surface.evaluate(s.u, s.v);
      const Vec3 n = surface.normal(sp);
      Vec3 tangent = n.cross(normal);
      const Vec3 chord = (i + 1 < kept.size()) ? kept[i + 1].p - s.p : s.p - kept[i - 1].p;
      if (tangent.dot(chord) < 0.0) tangent = -tangent;
      const LocalFrame frame = local_frame(n, tangent);
      const double column = context.mapping.column(s.p);
      const double tilt = context.field.tilt(row, column);
      path.postures.push_back(make_cutter_location(s.p, frame, tilt, context.field.yaw(), context.tool, s.u, s.v));
      path.columns.push_back(column);
    } catch (const Error& e) {
      rethrow_located(e, label, static_cast<int>(i));
    }
  }
  return path;
}

ToolPath generate(const ParametricSurface& surface, const MachiningStrategy& strategy, const CutterGeometry& tool,
                  const OrientationField& field, std::size_t workers) {
  strategy.validate();
  tool.validate();
  const std::vector<DrivePlane> planes = plan_planes(surface, strategy);
  ToolPath tp;
  tp.strategy = strategy;
  tp.tool = tool;
  tp.field = field;
  tp.mapping = field_mapping(surface, strategy);
  if (field.rows() != static_cast<int>(planes.size()) || field.columns() != tp.mapping.columns) {
    std::ostringstream os;
    os << "orientation field is " << field.rows() << "x" << field.columns() << ", expected " << planes.size()
       << "x" << tp.mapping.columns;
    throw DomainError(os.str());
  }
  tp.paths.resize(planes.size());
  parallel_for(planes.size(), workers, [&](std::size_t k) {
    const bool reversed = strategy.zigzag && (k % 2 == 1);
    tp.paths[k] = generate_path(surface, tp, planes[k].offset, static_cast<double>(k), reversed, 0, -1e300, 1e300,
                                static_cast<int>(k));
  });
  return tp;
}

void regenerate_paths(const ParametricSurface& surface, ToolPath& toolpath, const std::vector<std::size_t>& indices,
                      std::size_t workers) {
  std::vector<Path> fresh(indices.size());
  parallel_for(indices.size(), workers, [&](std::size_t i) {
    const Path& old = toolpath.paths[indices[i]];
    double lo = -1e300, hi = 1e300;
    if (old.level > 0 && !old.columns.empty()) {
      const auto [mn, mx] = std::minmax_element(old.columns.begin(), old.columns.end());
      lo = *mn - 1e-9;
      hi = *mx + 1e-9;
    }
    fresh[i] = generate_path(surface, toolpath, old.offset, old.row, old.reversed, old.level, lo, hi,
                             static_cast<int>(indices[i]));
  });
  for (std::size_t i = 0; i < indices.size(); ++i) toolpath.paths[indices[i]] = std::move(fresh[i]);
}

}  // namespace hsm5
