#include "hsm5/scallop.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "hsm5/parallel.hpp"

namespace hsm5 {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

double polyline_distance(const Vec3& p, const std::vector<CutterLocation>& line) {
  double best = kInf;
  for (std::size_t i = 1; i < line.size(); ++i) {
    const Vec3& a = line[i - 1].cc;
    const Vec3 ab = line[i].cc - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, (p - (a + t * ab)).norm());
  }
  return best;
}

std::vector<std::size_t> offset_order(const ToolPath& tp) {
  std::vector<std::size_t> order(tp.paths.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return tp.paths[a].offset < tp.paths[b].offset; });
  return order;
}

}  // namespace

double effective_radius(const CutterGeometry& tool, double tilt_deg, double yaw_deg) {
  const double st = std::sin(tilt_deg * kDeg);
  const double cy = std::cos(yaw_deg * kDeg);
  const double sy = std::sin(yaw_deg * kDeg);
  const double lever = tool.R + tool.r * st;
  const double denom = tool.r * st * cy * cy + lever * sy * sy;
  if (denom == 0.0) return kInf;
  return tool.r * lever / denom;
}

double effective_radius_zero_yaw(const CutterGeometry& tool, double tilt_deg) {
  const double st = std::sin(tilt_deg * kDeg);
  if (st == 0.0) return kInf;
  return (tool.R + tool.r * st) / st;
}

double scallop_height(double r_left, double r_right, double stepover) {
  if (!(stepover >= 0.0)) throw DomainError("stepover must be >= 0");
  if (stepover == 0.0 || is_infinite_radius(r_left) || is_infinite_radius(r_right)) return 0.0;
  // Circles centred at (0, r1) and (s, r2) tangent to the surface line y = 0.
  // The cusp height y is the smaller root of
  //   (1 + k^2) y^2 - (r1 + r2) y + s^2/4 = 0,  k = (r1 - r2)/s,
  // evaluated in the cancellation-free form c / q.
  const double k = (r_left - r_right) / stepover;
  const double a = 1.0 + k * k;
  const double b = r_left + r_right;
  const double c = 0.25 * stepover * stepover;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) throw Error(ErrorKind::NoOverlap, "stepover too large: effective profiles do not overlap");
  return 2.0 * c / (b + std::sqrt(disc));
}

std::vector<ScallopSample> scallop_map(const ToolPath& tp) {
  std::vector<ScallopSample> out;
  const std::vector<std::size_t> order = offset_order(tp);
  const double yaw = tp.field.yaw();
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Path& lower = tp.paths[order[k]];
    for (std::size_t s = 0; s < lower.postures.size(); ++s) {
      const double col = lower.columns[s];
      for (std::size_t m = k + 1; m < order.size(); ++m) {
        const Path& upper = tp.paths[order[m]];
        if (upper.postures.size() < 2) continue;
        const auto [mn, mx] = std::minmax_element(upper.columns.begin(), upper.columns.end());
        const double slack = 1e-6 * std::max(1.0, *mx - *mn);
        if (col < *mn - slack || col > *mx + slack) continue;
        ScallopSample sample;
        sample.at = SampleRef{static_cast<int>(order[k]), static_cast<int>(s)};
        sample.neighbour = static_cast<int>(order[m]);
        sample.column = col;
        sample.gap = polyline_distance(lower.postures[s].cc, upper.postures);
        const double r_low = effective_radius(tp.tool, lower.postures[s].tilt, yaw);
        const double r_up = effective_radius(tp.tool, tp.field.tilt(upper.row, col), yaw);
        try {
          sample.height = scallop_height(r_low, r_up, sample.gap);
        } catch (const Error&) {
          sample.height = kInf;
        }
        out.push_back(sample);
        break;
      }
    }
  }
  return out;
}

double max_scallop(const ToolPath& tp) {
  double h = 0.0;
  for (const ScallopSample& s : scallop_map(tp)) h = std::max(h, s.height);
  return h;
}

TightenResult tighten(const ParametricSurface& surface, const ToolPath& toolpath, double scallop_tol,
                      int max_levels, std::size_t workers) {
  if (!(scallop_tol > 0.0)) throw DomainError("scallop_tol must be > 0");
  TightenResult res{toolpath};
  const double margin = std::max(1.0, 2.0 / std::max(res.toolpath.mapping.spacing(), 1e-9));

  for (int level = 1; level <= max_levels; ++level) {
    // Offending column span per adjacent pair.
    std::map<std::pair<int, int>, std::pair<double, double>> spans;
    for (const ScallopSample& s : scallop_map(res.toolpath)) {
      if (!(s.height > scallop_tol)) continue;
      auto key = std::make_pair(s.at.path, s.neighbour);
      auto it = spans.find(key);
      if (it == spans.end()) spans.emplace(key, std::make_pair(s.column, s.column));
      else {
        it->second.first = std::min(it->second.first, s.column);
        it->second.second = std::max(it->second.second, s.column);
      }
    }
    if (spans.empty()) break;

    std::vector<std::pair<std::pair<int, int>, std::pair<double, double>>> jobs(spans.begin(), spans.end());
    std::vector<Path> fresh(jobs.size());
    parallel_for(jobs.size(), workers, [&](std::size_t i) {
      const Path& a = res.toolpath.paths[jobs[i].first.first];
      const Path& b = res.toolpath.paths[jobs[i].first.second];
      fresh[i] = generate_path(surface, res.toolpath, 0.5 * (a.offset + b.offset), 0.5 * (a.row + b.row),
                               !a.reversed, level, jobs[i].second.first - margin, jobs[i].second.second + margin);
    });
    int added = 0;
    for (Path& p : fresh) {
      if (p.postures.size() < 2) continue;
      res.toolpath.paths.push_back(std::move(p));
      ++added;
    }
    if (added == 0) break;
    res.levels = level;
    res.inserted += added;
    std::stable_sort(res.toolpath.paths.begin(), res.toolpath.paths.end(),
                     [](const Path& a, const Path& b) { return a.offset < b.offset; });
  }
  res.residual = max_scallop(res.toolpath);
  res.limit_reached = res.residual > scallop_tol;
  return res;
}

std::vector<SampleRef> gouge_check(const ToolPath& toolpath, const ParametricSurface& surface) {
  std::vector<SampleRef> flags;
  for (std::size_t p = 0; p < toolpath.paths.size(); ++p) {
    const auto& postures = toolpath.paths[p].postures;
    for (std::size_t s = 0; s < postures.size(); ++s) {
      const CutterLocation& loc = postures[s];
      const double kappa = normal_curvature(surface, loc.u, loc.v, loc.frame.t);
      if (!(kappa < 0.0)) continue;
      const double r_eq = effective_radius(toolpath.tool, loc.tilt, loc.yaw);
      if (r_eq > 1.0 / std::abs(kappa)) flags.push_back(SampleRef{static_cast<int>(p), static_cast<int>(s)});
    }
  }
  return flags;
}

}  // namespace hsm5
