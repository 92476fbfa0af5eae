#include "hsm5/surface.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace hsm5 {
namespace {

struct Basis {
  std::vector<double> b, d1, d2;
};

// Bernstein polynomials of degree n at t with first and second derivatives.
Basis bernstein(int n, double t) {
  Basis out;
  out.b.assign(n + 1, 0.0);
  out.d1.assign(n + 1, 0.0);
  out.d2.assign(n + 1, 0.0);
  auto eval = [t](int deg, std::vector<double>& row) {
    row.assign(deg + 1, 0.0);
    if (deg < 0) return;
    row[0] = 1.0;
    const double s = 1.0 - t;
    for (int k = 1; k <= deg; ++k) {
      double prev = 0.0;
      for (int i = 0; i < k; ++i) {
        const double cur = row[i];
        row[i] = prev + s * cur;
        prev = t * cur;
      }
      row[k] = prev;
    }
  };
  eval(n, out.b);
  if (n >= 1) {
    std::vector<double> lower;
    eval(n - 1, lower);
    for (int i = 0; i <= n; ++i) {
      const double left = i >= 1 ? lower[i - 1] : 0.0;
      const double right = i <= n - 1 ? lower[i] : 0.0;
      out.d1[i] = n * (left - right);
    }
  }
  if (n >= 2) {
    std::vector<double> lower;
    eval(n - 2, lower);
    for (int i = 0; i <= n; ++i) {
      const double a = (i >= 2) ? lower[i - 2] : 0.0;
      const double b = (i >= 1 && i - 1 <= n - 2) ? lower[i - 1] : 0.0;
      const double c = (i <= n - 2) ? lower[i] : 0.0;
      out.d2[i] = n * (n - 1) * (a - 2.0 * b + c);
    }
  }
  return out;
}

}  // namespace

ParametricSurface ParametricSurface::saddle(double a, double b, double c) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("saddle half-extents must be positive");
  ParametricSurface s;
  s.kind_ = SurfaceKind::AnalyticSaddle;
  s.domain_ = Domain{-1.0, 1.0, -1.0, 1.0};
  s.a_ = a;
  s.b_ = b;
  s.c_ = c;
  s.fix_orientation();
  return s;
}

ParametricSurface ParametricSurface::patch(int degree_u, int degree_v, std::vector<Vec3> control_net) {
  if (degree_u < 1 || degree_v < 1) throw DomainError("patch degrees must be >= 1");
  const auto expected = static_cast<std::size_t>((degree_u + 1) * (degree_v + 1));
  if (control_net.size() != expected) {
    std::ostringstream os;
    os << "control net must hold " << expected << " points for degrees (" << degree_u << "," << degree_v
       << "), got " << control_net.size();
    throw DomainError(os.str());
  }
  ParametricSurface s;
  s.kind_ = SurfaceKind::TensorPolynomialPatch;
  s.domain_ = Domain{0.0, 1.0, 0.0, 1.0};
  s.p_ = degree_u;
  s.q_ = degree_v;
  s.net_ = std::move(control_net);
  s.fix_orientation();
  return s;
}

void ParametricSurface::fix_orientation() {
  const SurfacePoint c = evaluate_unchecked(domain_.u_mid(), domain_.v_mid());
  const Vec3 raw = c.su.cross(c.sv);
  orientation_ = raw.z() < 0.0 ? -1.0 : 1.0;
}

SurfacePoint ParametricSurface::evaluate(double u, double v) const {
  if (!domain_.contains(u, v)) {
    std::ostringstream os;
    os << "parameters (" << u << ", " << v << ") outside the surface domain";
    throw DomainError(os.str());
  }
  return evaluate_unchecked(u, v);
}

SurfacePoint ParametricSurface::evaluate_unchecked(double u, double v) const {
  SurfacePoint sp;
  if (kind_ == SurfaceKind::AnalyticSaddle) {
    sp.p = Vec3(a_ * u, b_ * v, c_ * u * v);
    sp.su = Vec3(a_, 0.0, c_ * v);
    sp.sv = Vec3(0.0, b_, c_ * u);
    sp.suv = Vec3(0.0, 0.0, c_);
    return sp;
  }
  const Basis bu = bernstein(p_, u);
  const Basis bv = bernstein(q_, v);
  for (int i = 0; i <= p_; ++i) {
    for (int j = 0; j <= q_; ++j) {
      const Vec3& P = net_[static_cast<std::size_t>(i * (q_ + 1) + j)];
      sp.p += bu.b[i] * bv.b[j] * P;
      sp.su += bu.d1[i] * bv.b[j] * P;
      sp.sv += bu.b[i] * bv.d1[j] * P;
      sp.suu += bu.d2[i] * bv.b[j] * P;
      sp.suv += bu.d1[i] * bv.d1[j] * P;
      sp.svv += bu.b[i] * bv.d2[j] * P;
    }
  }
  return sp;
}

Vec3 ParametricSurface::normal(const SurfacePoint& sp) const {
  const Vec3 raw = sp.su.cross(sp.sv);
  const double len = raw.norm();
  const double scale = sp.su.norm() * sp.sv.norm();
  if (!(len > 1e-12 * scale) || scale == 0.0) {
    throw GeometryError(ErrorKind::SingularGeometry, "degenerate tangent plane");
  }
  return orientation_ * raw / len;
}

Vec3 ParametricSurface::normal(double u, double v) const { return normal(evaluate(u, v)); }

Box3 ParametricSurface::bounds() const {
  if (kind_ == SurfaceKind::AnalyticSaddle) {
    const double zmax = std::abs(c_);
    return Box3{Vec3(-a_, -b_, -zmax), Vec3(a_, b_, zmax)};
  }
  Box3 box{net_.front(), net_.front()};
  for (const Vec3& P : net_) {
    box.lo = box.lo.cwiseMin(P);
    box.hi = box.hi.cwiseMax(P);
  }
  return box;
}

LocalFrame local_frame(const Vec3& n, const Vec3& feed_dir) {
  const Vec3 tangential = feed_dir - feed_dir.dot(n) * n;
  const double len = tangential.norm();
  if (!(len > 1e-9 * std::max(1.0, feed_dir.norm()))) {
    throw GeometryError(ErrorKind::FrameUndefined, "feed direction parallel to the surface normal");
  }
  LocalFrame frame;
  frame.n = n;
  frame.f = tangential / len;
  frame.t = frame.f.cross(frame.n);
  return frame;
}

LocalFrame local_frame(const ParametricSurface& surface, double u, double v, const Vec3& feed_dir) {
  return local_frame(surface.normal(u, v), feed_dir);
}

double normal_curvature(const SurfacePoint& sp, const Vec3& n, const Vec3& tangent_dir) {
  // Express the 3D direction in parameter space by least squares on [Su Sv].
  Eigen::Matrix<double, 3, 2> J;
  J.col(0) = sp.su;
  J.col(1) = sp.sv;
  const Eigen::Matrix2d gram = J.transpose() * J;
  if (std::abs(gram.determinant()) < 1e-20 * gram.squaredNorm()) {
    throw GeometryError(ErrorKind::SingularGeometry, "degenerate first fundamental form");
  }
  const Eigen::Vector2d d = gram.ldlt().solve(J.transpose() * tangent_dir);
  const double first = d.dot(gram * d);
  if (!(first > 0.0)) throw GeometryError(ErrorKind::SingularGeometry, "zero tangent direction");
  const double second = sp.suu.dot(n) * d.x() * d.x() + 2.0 * sp.suv.dot(n) * d.x() * d.y() +
                        sp.svv.dot(n) * d.y() * d.y();
  return -second / first;
}

double normal_curvature(const ParametricSurface& surface, double u, double v, const Vec3& tangent_dir) {
  const SurfacePoint sp = surface.evaluate(u, v);
  return normal_curvature(sp, surface.normal(sp), tangent_dir);
}

}  // namespace hsm5
