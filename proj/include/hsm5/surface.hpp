#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <vector>

#include "hsm5/errors.hpp"

namespace hsm5 {

using Vec3 = Eigen::Vector3d;

enum class SurfaceKind { AnalyticSaddle, TensorPolynomialPatch };

struct Domain {
  double u_min = 0.0;
  double u_max = 1.0;
  double v_min = 0.0;
  double v_max = 1.0;

  bool contains(double u, double v, double eps = 1e-12) const {
    return u >= u_min - eps && u <= u_max + eps && v >= v_min - eps && v <= v_max + eps;
  }
  double u_mid() const { return 0.5 * (u_min + u_max); }
  double v_mid() const { return 0.5 * (v_min + v_max); }
};

/// Point and partial derivatives up to second order.
struct SurfacePoint {
  Vec3 p = Vec3::Zero();
  Vec3 su = Vec3::Zero();
  Vec3 sv = Vec3::Zero();
  Vec3 suu = Vec3::Zero();
  Vec3 suv = Vec3::Zero();
  Vec3 svv = Vec3::Zero();
};

struct Box3 {
  Vec3 lo;
  Vec3 hi;
};

// Immutable bi-parametric surface: either the analytic hyperbolic paraboloid
// z = (x/a)(y/b)c with x = a*u, y = b*v on [-1,1]^2, or a Bezier tensor patch
// on [0,1]^2 whose control net is stored u-major: net[i*(q+1)+j], i<=p, j<=q.
class ParametricSurface {
 public:
  static ParametricSurface saddle(double a, double b, double c);
  static ParametricSurface patch(int degree_u, int degree_v, std::vector<Vec3> control_net);

  SurfaceKind kind() const { return kind_; }
  const Domain& domain() const { return domain_; }

  double saddle_a() const { return a_; }
  double saddle_b() const { return b_; }
  double saddle_c() const { return c_; }
  int degree_u() const { return p_; }
  int degree_v() const { return q_; }
  const std::vector<Vec3>& control_net() const { return net_; }

  /// Throws DomainError outside the parameter domain.
  SurfacePoint evaluate(double u, double v) const;

  /// Unit normal, oriented so the normal at the domain centre has z >= 0.
  /// Throws GeometryError(SingularGeometry) on a degenerate tangent plane.
  Vec3 normal(double u, double v) const;
  Vec3 normal(const SurfacePoint& sp) const;

  /// Conservative axis-aligned bounds of the surface image.
  Box3 bounds() const;

 private:
  ParametricSurface() = default;
  SurfacePoint evaluate_unchecked(double u, double v) const;
  void fix_orientation();

  SurfaceKind kind_ = SurfaceKind::AnalyticSaddle;
  Domain domain_;
  double a_ = 0.0, b_ = 0.0, c_ = 0.0;
  int p_ = 0, q_ = 0;
  std::vector<Vec3> net_;
  double orientation_ = 1.0;
};

// Orthonormal machining frame at a contact point: t = f x n.
struct LocalFrame {
  Vec3 f;
  Vec3 n;
  Vec3 t;
};

/// Frame with f the tangential projection of feed_dir. Throws
/// GeometryError(FrameUndefined) when feed_dir is (nearly) parallel to n.
LocalFrame local_frame(const ParametricSurface& surface, double u, double v, const Vec3& feed_dir);
LocalFrame local_frame(const Vec3& n, const Vec3& feed_dir);

/// Signed normal curvature along a 3D tangent direction, in 1/mm. Sign
/// convention: negative when the surface bends toward the normal side
/// (a valley seen from the tool), positive on convex bumps.
double normal_curvature(const ParametricSurface& surface, double u, double v, const Vec3& tangent_dir);
double normal_curvature(const SurfacePoint& sp, const Vec3& n, const Vec3& tangent_dir);

}  // namespace hsm5
