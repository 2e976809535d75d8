// SPDX-License-Identifier: Apache-2.0

#ifndef BELTRAMI_CONVEX_BODY_HPP
#define BELTRAMI_CONVEX_BODY_HPP

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "beltrami/common.hpp"
#include "beltrami/grid_spec.hpp"
#include "beltrami/jet.hpp"

namespace beltrami
{

// Equal-weight direction set on the unit sphere. Directions come in antipodal pairs:
// antipode(i) is the index of -directions[i].
struct SphereQuadrature
{
  std::vector<Vec3> directions;
  std::vector<double> weights;

  std::size_t size() const { return directions.size(); }
  std::size_t antipode(std::size_t i) const
  {
    const std::size_t half = size() / 2;
    return i < half ? i + half : i - half;
  }

  // n/2 Fibonacci points on the upper hemisphere followed by their antipodes. n is
  // rounded up to an even number.
  static SphereQuadrature fibonacci(int n);
};

// Shared 2048-point quadrature used when callers do not pass one.
const SphereQuadrature &default_quadrature();

// Convex body given by its support function h(nu) = sum_lm c_lm Y_lm(nu).
class SupportBody
{
public:
  SupportBody() : SupportBody(0, false) {}
  SupportBody(int lmax, bool axisymmetric);
  SupportBody(int lmax, bool axisymmetric, Eigen::VectorXd coeffs);

  int lmax() const { return lmax_; }
  bool axisymmetric() const { return axisymmetric_; }
  const Eigen::VectorXd &coeffs() const { return coeffs_; }

  double coeff(int l, int m) const;
  void set_coeff(int l, int m, double value);

  SupportBody scaled(double factor) const;
  // Point reflection x -> -x.
  SupportBody reflected() const;
  // Same body with a different truncation degree (higher degrees dropped or zero-padded).
  SupportBody with_lmax(int lmax) const;

  static SupportBody ball(double radius, int lmax = 0);
  static SupportBody translated_ball(double radius, const Vec3 &shift, int lmax = 1);
  // Ellipsoid with semi-axes (a, b, c) along x, y, z, least-squares encoded to lmax and
  // projected to convexity. Axisymmetric (zonal) when a == b.
  static SupportBody spheroid(double a, double b, double c, int lmax,
                              const SphereQuadrature &quad = default_quadrature());
  // Least-squares fit of sampled support values at the quadrature directions.
  static SupportBody fit(const std::vector<double> &values, int lmax, bool axisymmetric,
                         const SphereQuadrature &quad = default_quadrature());
  static SupportBody fit(const std::function<double(const Vec3 &)> &h, int lmax,
                         bool axisymmetric, const SphereQuadrature &quad = default_quadrature());

private:
  int lmax_;
  bool axisymmetric_;
  Eigen::VectorXd coeffs_;
};

double eval_support(const SupportBody &body, const Vec3 &direction);
std::vector<double> support_values(const SupportBody &body, const SphereQuadrature &quad);

// Jet of the 1-homogeneous extension |x| h(x/|x|) at a unit direction. Its gradient is the
// boundary point with outer normal `direction`; its Hessian restricted to the tangent
// plane is Hess_S h + h I (the radii-of-curvature matrix).
Jet2 support_jet(const SupportBody &body, const Vec3 &direction);
Vec3 contact_point(const SupportBody &body, const Vec3 &direction);

// Membership in the polytope {x : x.nu <= h(nu)} over the quadrature directions and the
// six coordinate directions (which bound the body's box exactly).
class SupportPolytope
{
public:
  SupportPolytope(const SupportBody &body, const SphereQuadrature &quad);

  bool contains(const Vec3 &x) const;
  // Parameter interval {t : x0 + t u in polytope}; nullopt if the line misses it.
  std::optional<std::pair<double, double>> chord(const Vec3 &x0, const Vec3 &u) const;
  Vec3 lower() const { return lo_; }
  Vec3 upper() const { return hi_; }

private:
  std::vector<Vec3> normals_;
  std::vector<double> offsets_;
  Vec3 lo_, hi_;
};

struct ConvexityReport
{
  bool valid = false;
  double min_eigen = 0.0;
};

inline constexpr double kDefaultConvexityMargin = 1e-6;

ConvexityReport is_convex_valid(const SupportBody &body,
                                const SphereQuadrature &quad = default_quadrature(),
                                double margin = kDefaultConvexityMargin);

// Shrinks all degree >= 1 coefficients by a common factor found by bisection until the
// body passes is_convex_valid at `margin`. Valid bodies are returned unchanged.
SupportBody project_to_convex(const SupportBody &body, double margin = kDefaultConvexityMargin,
                              const SphereQuadrature &quad = default_quadrature());

// Grid for voxelizing `body` at `resolution` cells across its largest box extent.
GridSpec body_grid(const SupportBody &body, int resolution);

double volume(const SupportBody &body, int resolution,
              const SphereQuadrature &quad = default_quadrature());
// (1/3) int h det(Hess_S h + h I) d nu over the quadrature; smooth in the coefficients,
// unlike the voxel count.
double support_volume(const SupportBody &body,
                      const SphereQuadrature &quad = default_quadrature());
double diameter(const SupportBody &body, const SphereQuadrature &quad = default_quadrature());
double hausdorff_distance(const SupportBody &a, const SupportBody &b,
                          const SphereQuadrature &quad = default_quadrature());

struct Segment
{
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double length() const { return (b - a).norm(); }
  Vec3 direction() const { return (b - a).normalized(); }
};

struct CylinderSpec
{
  double radius = 1.0;
  double half_height = 1.0;
  Vec3 axis = Vec3::UnitZ();
  Vec3 center = Vec3::Zero();

  bool contains(const Vec3 &x, double tol = 0.0) const;
};

// Segments of the trapping construction: L3 realizes the diameter, L2 the largest
// section diameter among planes orthogonal to L3, L2_perp the longest chord of that
// section orthogonal to L2, and L1 the longest chord orthogonal to both L2 and L3.
struct TrapSegments
{
  Segment L1, L2, L3, L2_perp;

  // |L1|^2 |L3|; the quantity the trapping argument keeps bounded.
  double trap_product() const
  {
    return L1.length() * L1.length() * L3.length();
  }
  // |L2| |L2_perp| |L3|; bounded by 6 V through the inscribed pyramid.
  double pyramid_product() const
  {
    return L2.length() * L2_perp.length() * L3.length();
  }
};

struct EnclosingCylinder
{
  CylinderSpec cylinder;
  TrapSegments segments;
};

class ContainmentError : public std::runtime_error
{
public:
  ContainmentError(const std::string &what, const Vec3 &point)
    : std::runtime_error(what), point_(point)
  {
  }
  const Vec3 &point() const { return point_; }

private:
  Vec3 point_;
};

// Cylinder of radius 2|L3| and half-height |L1| with axis along L1 containing the body.
// Containment is certified on the boundary contact points of all quadrature directions;
// throws ContainmentError naming a violating point otherwise.
EnclosingCylinder enclosing_cylinder(const SupportBody &body, int resolution,
                                     const SphereQuadrature &quad = default_quadrature());

// SUPPORTBODY v1 text format.
void write_support_body(std::ostream &os, const SupportBody &body);
SupportBody read_support_body(std::istream &is);
void save_support_body(const std::string &path, const SupportBody &body);
SupportBody load_support_body(const std::string &path);

}  // namespace beltrami

#endif  // BELTRAMI_CONVEX_BODY_HPP
