#include "hsm5/intersection.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace hsm5 {
namespace {

constexpr double kResidualTol = 1e-11;

struct Residual {
  double g;
  Eigen::Vector2d grad;
  SurfacePoint sp;
};

Residual residual(const ParametricSurface& s, const Plane& plane, double u, double v) {
  Residual r;
  r.sp = s.evaluate(u, v);
  r.g = plane.signed_distance(r.sp.p);
  r.grad = Eigen::Vector2d(plane.normal.dot(r.sp.su), plane.normal.dot(r.sp.sv));
  return r;
}

void clamp_to(const Domain& d, double& u, double& v) {
  u = std::clamp(u, d.u_min, d.u_max);
  v = std::clamp(v, d.v_min, d.v_max);
}

// Unit-speed (in 3D) parametric tangent of the level curve, or nullopt at a
// point where the plane is tangent to the surface.
std::optional<Eigen::Vector2d> curve_tangent(const Residual& r) {
  const Eigen::Vector2d tau(-r.grad.y(), r.grad.x());
  const Vec3 t3 = r.sp.su * tau.x() + r.sp.sv * tau.y();
  const double len = t3.norm();
  const double scale = r.sp.su.norm() + r.sp.sv.norm();
  if (!(len > 1e-9 * scale * scale)) return std::nullopt;
  return tau / len;
}

Vec3 tangent3(const SurfacePoint& sp, const Eigen::Vector2d& tau) { return sp.su * tau.x() + sp.sv * tau.y(); }

double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

enum class Edge { UMin, UMax, VMin, VMax };

// Root of the plane residual along a domain edge, bracketed on [lo, hi] in the
// free edge coordinate.
std::optional<CurveSample> edge_root(const ParametricSurface& s, const Plane& plane, Edge edge, double lo,
                                     double hi) {
  const Domain& d = s.domain();
  auto at = [&](double w) -> std::pair<double, double> {
    switch (edge) {
      case Edge::UMin: return {d.u_min, w};
      case Edge::UMax: return {d.u_max, w};
      case Edge::VMin: return {w, d.v_min};
      case Edge::VMax: return {w, d.v_max};
    }
    return {w, w};
  };
  auto g = [&](double w) {
    auto [u, v] = at(w);
    return plane.signed_distance(s.evaluate(u, v).p);
  };
  double glo = g(lo), ghi = g(hi);
  if (glo == 0.0) hi = lo;
  else if (ghi == 0.0) lo = hi;
  else if (glo * ghi > 0.0) return std::nullopt;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  auto [u, v] = at(0.5 * (lo + hi));
  return CurveSample{u, v, s.evaluate(u, v).p};
}

std::vector<CurveSample> boundary_seeds(const ParametricSurface& s, const Plane& plane, int n) {
  const Domain& d = s.domain();
  std::vector<CurveSample> seeds;
  auto scan = [&](Edge edge, double a, double b) {
    for (int k = 0; k < n; ++k) {
      const double lo = a + (b - a) * k / n;
      const double hi = a + (b - a) * (k + 1) / n;
      if (auto root = edge_root(s, plane, edge, lo, hi)) seeds.push_back(*root);
    }
  };
  scan(Edge::VMin, d.u_min, d.u_max);
  scan(Edge::UMax, d.v_min, d.v_max);
  scan(Edge::VMax, d.u_min, d.u_max);
  scan(Edge::UMin, d.v_min, d.v_max);
  // Roots at bracket ends and corners show up twice.
  std::vector<CurveSample> unique;
  for (const CurveSample& c : seeds) {
    const bool dup = std::any_of(unique.begin(), unique.end(), [&](const CurveSample& o) {
      return std::abs(o.u - c.u) < 1e-9 && std::abs(o.v - c.v) < 1e-9;
    });
    if (!dup) unique.push_back(c);
  }
  return unique;
}

// Where the parametric segment a->b leaves the domain, and through which edge.
std::pair<double, Edge> exit_point(const Domain& d, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  double best = 1.0;
  Edge edge = Edge::UMax;
  const Eigen::Vector2d dir = b - a;
  auto test = [&](double coord_a, double delta, double bound, Edge e) {
    if (delta == 0.0) return;
    const double lam = (bound - coord_a) / delta;
    if (lam >= 0.0 && lam < best) {
      best = lam;
      edge = e;
    }
  };
  if (b.x() < d.u_min) test(a.x(), dir.x(), d.u_min, Edge::UMin);
  if (b.x() > d.u_max) test(a.x(), dir.x(), d.u_max, Edge::UMax);
  if (b.y() < d.v_min) test(a.y(), dir.y(), d.v_min, Edge::VMin);
  if (b.y() > d.v_max) test(a.y(), dir.y(), d.v_max, Edge::VMax);
  return {best, edge};
}

struct BranchResult {
  PlaneCurve curve;
  bool degenerate = false;
};

// Marches from seed into the domain. flip starts against the preferred
// direction, which traces the other half of a curve seeded mid-edge.
BranchResult march(const ParametricSurface& s, const Plane& plane, const CurveSample& seed,
                   const MarchOptions& opt, double max_step, bool flip = false) {
  const Domain& d = s.domain();
  BranchResult out;
  out.curve.plane = plane;
  out.curve.samples.push_back(seed);

  Residual r0 = residual(s, plane, seed.u, seed.v);
  auto tau0 = curve_tangent(r0);
  if (!tau0) {
    out.degenerate = true;
    return out;
  }
  Eigen::Vector2d tau = *tau0;
  const double probe = 1e-7 * std::max(d.u_max - d.u_min, d.v_max - d.v_min);
  auto inside = [&](const Eigen::Vector2d& q) { return d.contains(q.x(), q.y(), 1e-5 * probe); };
  const Eigen::Vector2d s0(seed.u, seed.v);
  if (!inside(s0 + probe * tau)) {
    tau = -tau;
    if (!inside(s0 + probe * tau)) {
      // Curve runs along the boundary or only touches it.
      out.degenerate = true;
      return out;
    }
  }
  if (flip) {
    tau = -tau;
    if (!inside(s0 + probe * tau)) return out;
  }
  Vec3 prev_dir = tangent3(r0.sp, tau);

  double h = max_step;
  const double min_step = 1e-9 * max_step;
  const int max_samples = 1000000;

  while (static_cast<int>(out.curve.samples.size()) < max_samples) {
    const CurveSample& P = out.curve.samples.back();
    const Eigen::Vector2d pp(P.u, P.v);
    const Eigen::Vector2d q = pp + h * tau;

    if (!inside(q)) {
      auto [lam, edge] = exit_point(d, pp, q);
      const double span = (q - pp).norm() + 1e-12;
      double lo = 0, hi = 0;
      const Eigen::Vector2d b = pp + lam * (q - pp);
      const bool along_u = edge == Edge::VMin || edge == Edge::VMax;
      const double w = along_u ? b.x() : b.y();
      const double wmin = along_u ? d.u_min : d.v_min;
      const double wmax = along_u ? d.u_max : d.v_max;
      lo = std::max(wmin, w - span);
      hi = std::min(wmax, w + span);
      auto end = edge_root(s, plane, edge, lo, hi);
      if (!end) {
        if (h <= min_step) {
          out.degenerate = true;
          break;
        }
        h *= 0.5;
        continue;
      }
      if ((end->p - P.p).norm() > max_step) {
        // Boundary lies beyond the spacing limit: march on instead of jumping.
        h *= 0.98 * max_step / (end->p - P.p).norm();
        continue;
      }
      if (chord_deviation(s, plane, P, *end) > opt.chord_tol) {
        h *= 0.5;
        if (h < min_step) {
          out.degenerate = true;
          break;
        }
        continue;
      }
      // Fold a sliver final segment into the previous one when the chord allows.
      auto& samples = out.curve.samples;
      if (samples.size() >= 2 && (end->p - P.p).norm() < 0.2 * max_step &&
          chord_deviation(s, plane, samples[samples.size() - 2], *end) <= opt.chord_tol &&
          (end->p - samples[samples.size() - 2].p).norm() <= max_step) {
        samples.back() = *end;
      } else {
        samples.push_back(*end);
      }
      break;
    }

    double u = q.x(), v = q.y();
    if (!project_to_curve(s, plane, u, v) || (Eigen::Vector2d(u, v) - pp).norm() == 0.0) {
      h *= 0.5;
      if (h < min_step) {
        out.degenerate = true;
        break;
      }
      continue;
    }
    CurveSample Q{u, v, s.evaluate(u, v).p};
    const double gap = (Q.p - P.p).norm();
    if (gap > max_step) {
      h *= 0.98 * max_step / gap;
      continue;
    }
    if ((Q.p - P.p).dot(prev_dir) <= 0.0 || chord_deviation(s, plane, P, Q) > opt.chord_tol) {
      h *= 0.5;
      if (h < min_step) {
        out.degenerate = true;
        break;
      }
      continue;
    }
    const double dev = chord_deviation(s, plane, P, Q);
    out.curve.samples.push_back(Q);

    const Residual rq = residual(s, plane, u, v);
    auto tq = curve_tangent(rq);
    if (!tq) {
      out.degenerate = true;
      break;
    }
    Eigen::Vector2d next_tau = *tq;
    Vec3 dir = tangent3(rq.sp, next_tau);
    if (dir.dot(prev_dir) < 0.0) {
      // Passed through a point where the plane touches the surface.
      next_tau = -next_tau;
      dir = -dir;
      out.degenerate = true;
    }
    tau = next_tau;
    prev_dir = dir;
    if (dev < 0.25 * opt.chord_tol) h = std::min(1.5 * h, max_step);
  }
  return out;
}

}  // namespace

double PlaneCurve::length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) len += (samples[i].p - samples[i - 1].p).norm();
  return len;
}

bool project_to_curve(const ParametricSurface& s, const Plane& plane, double& u, double& v) {
  const Domain& d = s.domain();
  clamp_to(d, u, v);
  for (int it = 0; it < 60; ++it) {
    const Residual r = residual(s, plane, u, v);
    if (std::abs(r.g) < kResidualTol) return true;
    const double g2 = r.grad.squaredNorm();
    if (!(g2 > 0.0)) return false;
    u -= r.g * r.grad.x() / g2;
    v -= r.g * r.grad.y() / g2;
    clamp_to(d, u, v);
  }
  return std::abs(residual(s, plane, u, v).g) < 1e-9;
}

double chord_deviation(const ParametricSurface& s, const Plane& plane, const CurveSample& a,
                       const CurveSample& b) {
  double u = 0.5 * (a.u + b.u), v = 0.5 * (a.v + b.v);
  if (!project_to_curve(s, plane, u, v)) return std::numeric_limits<double>::infinity();
  return segment_distance(s.evaluate(u, v).p, a.p, b.p);
}

IntersectionResult plane_intersection(const ParametricSurface& surface, const Plane& plane,
                                      const MarchOptions& options) {
  IntersectionResult result;
  const Box3 box = surface.bounds();
  const double max_step = options.max_step > 0.0 ? options.max_step : (box.hi - box.lo).norm() / 50.0;

  std::vector<CurveSample> seeds = boundary_seeds(surface, plane, options.boundary_scan);
  std::vector<bool> used(seeds.size(), false);
  const double match = 1e-6 * std::max(surface.domain().u_max - surface.domain().u_min,
                                       surface.domain().v_max - surface.domain().v_min);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    BranchResult branch = march(surface, plane, seeds[i], options, max_step);
    if (branch.curve.samples.size() >= 2) {
      // A seed with the domain on both sides (a curve lying along an edge)
      // needs the opposite half too.
      BranchResult back = march(surface, plane, seeds[i], options, max_step, true);
      if (back.curve.samples.size() >= 2) {
        auto& fwd = branch.curve.samples;
        std::vector<CurveSample> joined(back.curve.samples.rbegin(), back.curve.samples.rend());
        joined.insert(joined.end(), fwd.begin() + 1, fwd.end());
        fwd = std::move(joined);
        branch.degenerate = branch.degenerate || back.degenerate;
      }
    }
    result.degenerate = result.degenerate || branch.degenerate;
    // Seeds on the traced branch (its far end, or every seed when the branch
    // runs along an edge) start nothing new.
    const auto& traced = branch.curve.samples;
    for (std::size_t j = 0; j < seeds.size(); ++j) {
      if (used[j]) continue;
      const Eigen::Vector2d q(seeds[j].u, seeds[j].v);
      for (std::size_t k = 0; k < traced.size() && !used[j]; ++k) {
        const Eigen::Vector2d a(traced[k].u, traced[k].v);
        if (k + 1 == traced.size()) {
          used[j] = (q - a).lpNorm<Eigen::Infinity>() < match;
          break;
        }
        const Eigen::Vector2d b(traced[k + 1].u, traced[k + 1].v);
        const Eigen::Vector2d ab = b - a;
        const double t = std::clamp((q - a).dot(ab) / std::max(ab.squaredNorm(), 1e-300), 0.0, 1.0);
        used[j] = (q - (a + t * ab)).lpNorm<Eigen::Infinity>() < match &&
                  std::abs(residual(surface, plane, q.x(), q.y()).g) < 1e-9;
      }
    }
    if (branch.curve.samples.size() >= 2) result.branches.push_back(std::move(branch.curve));
  }
  return result;
}

IntersectionResult plane_intersection(const ParametricSurface& surface, const Plane& plane, double chord_tol) {
  MarchOptions opt;
  opt.chord_tol = chord_tol;
  return plane_intersection(surface, plane, opt);
}

}  // namespace hsm5
