// SPDX-License-Identifier: Apache-2.0

#include "beltrami/convex_body.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "beltrami/io.hpp"
#include "beltrami/spherical_harmonics.hpp"

namespace beltrami
{

SphereQuadrature SphereQuadrature::fibonacci(int n)
{
  if (n < 2)
  {
    throw DomainError("sphere quadrature needs at least 2 directions");
  }
  const int half = (n + 1) / 2;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  SphereQuadrature q;
  q.directions.resize(2 * half);
  for (int i = 0; i < half; ++i)
  {
    const double z = 1.0 - (i + 0.5) / half;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    Vec3 d(r * std::cos(phi), r * std::sin(phi), z);
    d.normalize();
    q.directions[i] = d;
    q.directions[i + half] = -d;
  }
  q.weights.assign(2 * half, 4.0 * kPi / (2 * half));
  return q;
}

const SphereQuadrature &default_quadrature()
{
  static const SphereQuadrature quad = SphereQuadrature::fibonacci(2048);
  return quad;
}

// --- SupportBody ----------------------------------------------------------------------

SupportBody::SupportBody(int lmax, bool axisymmetric)
  : SupportBody(lmax, axisymmetric, Eigen::VectorXd::Zero(sh_count(std::max(lmax, 0))))
{
}

SupportBody::SupportBody(int lmax, bool axisymmetric, Eigen::VectorXd coeffs)
  : lmax_(lmax), axisymmetric_(axisymmetric), coeffs_(std::move(coeffs))
{
  if (lmax < 0)
  {
    throw DomainError("lmax must be nonnegative");
  }
  if (coeffs_.size() != sh_count(lmax))
  {
    throw DomainError("coefficient vector does not match lmax");
  }
  if (axisymmetric_)
  {
    for (int i = 0; i < coeffs_.size(); ++i)
    {
      if (sh_order(i) != 0)
      {
        coeffs_[i] = 0.0;
      }
    }
  }
}

double SupportBody::coeff(int l, int m) const
{
  if (l < 0 || l > lmax_ || std::abs(m) > l)
  {
    return 0.0;
  }
  return coeffs_[sh_index(l, m)];
}

void SupportBody::set_coeff(int l, int m, double value)
{
  if (l < 0 || l > lmax_ || std::abs(m) > l)
  {
    throw DomainError("harmonic index out of range");
  }
  if (axisymmetric_ && m != 0 && value != 0.0)
  {
    throw DomainError("axisymmetric body cannot carry m != 0 coefficients");
  }
  coeffs_[sh_index(l, m)] = value;
}

SupportBody SupportBody::scaled(double factor) const
{
  return SupportBody(lmax_, axisymmetric_, coeffs_ * factor);
}

SupportBody SupportBody::reflected() const
{
  Eigen::VectorXd c = coeffs_;
  for (int i = 0; i < c.size(); ++i)
  {
    if (sh_degree(i) % 2 == 1)
    {
      c[i] = -c[i];
    }
  }
  return SupportBody(lmax_, axisymmetric_, std::move(c));
}

SupportBody SupportBody::with_lmax(int lmax) const
{
  Eigen::VectorXd c = Eigen::VectorXd::Zero(sh_count(lmax));
  const int n = std::min(c.size(), coeffs_.size());
  c.head(n) = coeffs_.head(n);
  return SupportBody(lmax, axisymmetric_, std::move(c));
}

SupportBody SupportBody::ball(double radius, int lmax)
{
  if (!(radius > 0.0))
  {
    throw DomainError("ball radius must be positive");
  }
  SupportBody b(lmax, false);
  b.coeffs_[0] = radius * std::sqrt(4.0 * kPi);
  return b;
}

SupportBody SupportBody::translated_ball(double radius, const Vec3 &shift, int lmax)
{
  SupportBody b(std::max(lmax, 1), false);
  b.coeffs_[0] = radius * std::sqrt(4.0 * kPi);
  // t . nu = sqrt(4 pi / 3) (t_y Y_1,-1 + t_z Y_1,0 + t_x Y_1,1)
  const double s = std::sqrt(4.0 * kPi / 3.0);
  b.coeffs_[sh_index(1, -1)] = s * shift.y();
  b.coeffs_[sh_index(1, 0)] = s * shift.z();
  b.coeffs_[sh_index(1, 1)] = s * shift.x();
  return b;
}

SupportBody SupportBody::fit(const std::vector<double> &values, int lmax, bool axisymmetric,
                             const SphereQuadrature &quad)
{
  if (values.size() != quad.size())
  {
    throw DomainError("support samples do not match the quadrature");
  }
  std::vector<int> columns;
  for (int i = 0; i < sh_count(lmax); ++i)
  {
    if (!axisymmetric || sh_order(i) == 0)
    {
      columns.push_back(i);
    }
  }
  Eigen::MatrixXd A(quad.size(), columns.size());
  Eigen::VectorXd rhs(quad.size());
  std::vector<double> y(sh_count(lmax));
  for (std::size_t q = 0; q < quad.size(); ++q)
  {
    const Vec3 &d = quad.directions[q];
    solid_harmonics<double>(d.x(), d.y(), d.z(), lmax, y);
    for (std::size_t c = 0; c < columns.size(); ++c)
    {
      A(q, c) = y[columns[c]];
    }
    rhs[q] = values[q];
  }
  Eigen::VectorXd sol = A.colPivHouseholderQr().solve(rhs);
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(sh_count(lmax));
  for (std::size_t c = 0; c < columns.size(); ++c)
  {
    coeffs[columns[c]] = sol[c];
  }
  return SupportBody(lmax, axisymmetric, std::move(coeffs));
}

SupportBody SupportBody::fit(const std::function<double(const Vec3 &)> &h, int lmax,
                             bool axisymmetric, const SphereQuadrature &quad)
{
  std::vector<double> values(quad.size());
  for (std::size_t q = 0; q < quad.size(); ++q)
  {
    values[q] = h(quad.directions[q]);
  }
  return fit(values, lmax, axisymmetric, quad);
}

SupportBody SupportBody::spheroid(double a, double b, double c, int lmax,
                                  const SphereQuadrature &quad)
{
  if (!(a > 0.0 && b > 0.0 && c > 0.0))
  {
    throw DomainError("spheroid semi-axes must be positive");
  }
  auto h = [a, b, c](const Vec3 &n)
  {
    return std::sqrt(a * a * n.x() * n.x() + b * b * n.y() * n.y() + c * c * n.z() * n.z());
  };
  return project_to_convex(fit(h, lmax, a == b, quad), kDefaultConvexityMargin, quad);
}

// --- evaluation -----------------------------------------------------------------------

double eval_support(const SupportBody &body, const Vec3 &direction)
{
  std::vector<double> y(sh_count(body.lmax()));
  solid_harmonics<double>(direction.x(), direction.y(), direction.z(), body.lmax(), y);
  double h = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
  {
    h += body.coeffs()[static_cast<Eigen::Index>(i)] * y[i];
  }
  return h;
}

std::vector<double> support_values(const SupportBody &body, const SphereQuadrature &quad)
{
  std::vector<double> out(quad.size());
  for (std::size_t q = 0; q < quad.size(); ++q)
  {
    out[q] = eval_support(body, quad.directions[q]);
  }
  return out;
}

namespace
{

// Per-degree jets of the 1-homogeneous extension, sum over m of c_lm S_lm(x) |x|^(1-l).
std::vector<Jet2> degree_jets(const SupportBody &body, const Vec3 &direction)
{
  const int lmax = body.lmax();
  const Jet2 x = Jet2::variable(direction.x(), 0);
  const Jet2 y = Jet2::variable(direction.y(), 1);
  const Jet2 z = Jet2::variable(direction.z(), 2);
  std::vector<Jet2> s(sh_count(lmax));
  solid_harmonics<Jet2>(x, y, z, lmax, s);
  const Jet2 r = sqrt(x * x + y * y + z * z);
  const Jet2 inv_r = reciprocal(r);

  std::vector<Jet2> out(lmax + 1);
  Jet2 radial = r;  // |x|^(1-l)
  for (int l = 0; l <= lmax; ++l)
  {
    Jet2 poly;
    for (int m = -l; m <= l; ++m)
    {
      const double c = body.coeffs()[sh_index(l, m)];
      if (c != 0.0)
      {
        poly += s[sh_index(l, m)] * c;
      }
    }
    out[l] = poly * radial;
    radial = radial * inv_r;
  }
  return out;
}

double min_tangent_eigen(const Mat3 &H, const Vec3 &n)
{
  const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 t1 = n.cross(helper).normalized();
  const Vec3 t2 = n.cross(t1);
  const double a = t1.dot(H * t1);
  const double b = t1.dot(H * t2);
  const double c = t2.dot(H * t2);
  return 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
}

}  // namespace

Jet2 support_jet(const SupportBody &body, const Vec3 &direction)
{
  Jet2 total;
  for (const Jet2 &j : degree_jets(body, direction))
  {
    total += j;
  }
  return total;
}

Vec3 contact_point(const SupportBody &body, const Vec3 &direction)
{
  return support_jet(body, direction).g;
}

// --- polytope -------------------------------------------------------------------------

SupportPolytope::SupportPolytope(const SupportBody &body, const SphereQuadrature &quad)
{
  normals_.reserve(quad.size() + 6);
  offsets_.reserve(quad.size() + 6);
  for (int axis = 0; axis < 3; ++axis)
  {
    const Vec3 e = Vec3::Unit(axis);
    hi_[axis] = eval_support(body, e);
    lo_[axis] = -eval_support(body, -e);
    normals_.push_back(e);
    offsets_.push_back(hi_[axis]);
    normals_.push_back(-e);
    offsets_.push_back(-lo_[axis]);
  }
  const std::vector<double> h = support_values(body, quad);
  for (std::size_t q = 0; q < quad.size(); ++q)
  {
    normals_.push_back(quad.directions[q]);
    offsets_.push_back(h[q]);
  }
}

bool SupportPolytope::contains(const Vec3 &x) const
{
  for (std::size_t i = 0; i < normals_.size(); ++i)
  {
    if (normals_[i].dot(x) > offsets_[i])
    {
      return false;
    }
  }
  return true;
}

std::optional<std::pair<double, double>> SupportPolytope::chord(const Vec3 &x0,
                                                                const Vec3 &u) const
{
  double tlo = -std::numeric_limits<double>::infinity();
  double thi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < normals_.size(); ++i)
  {
    const double a = normals_[i].dot(u);
    const double b = offsets_[i] - normals_[i].dot(x0);
    if (std::abs(a) < 1e-14)
    {
      if (b < 0.0)
      {
        return std::nullopt;
      }
      continue;
    }
    const double t = b / a;
    if (a > 0.0)
    {
      thi = std::min(thi, t);
    }
    else
    {
      tlo = std::max(tlo, t);
    }
    if (tlo > thi)
    {
      return std::nullopt;
    }
  }
  return std::make_pair(tlo, thi);
}

// --- convexity ------------------------------------------------------------------------

namespace
{

// Tangential Hessians split into the degree-0 part and the rest, so the coefficient
// scaling used by project_to_convex reduces to H0 + gamma * H1 per direction.
struct SplitHessians
{
  std::vector<Mat3> base, rest;
};

SplitHessians split_hessians(const SupportBody &body, const SphereQuadrature &quad)
{
  SplitHessians s;
  s.base.resize(quad.size());
  s.rest.resize(quad.size());
  for (std::size_t q = 0; q < quad.size(); ++q)
  {
    const std::vector<Jet2> jets = degree_jets(body, quad.directions[q]);
    s.base[q] = jets[0].H;
    Mat3 rest = Mat3::Zero();
    for (std::size_t l = 1; l < jets.size(); ++l)
    {
      rest += jets[l].H;
    }
    s.rest[q] = rest;
  }
  return s;
}

double min_eigen_scaled(const SplitHessians &s, const SphereQuadrature &quad, double gamma)
{
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < quad.size(); ++q)
  {
    lo = std::min(lo, min_tangent_eigen(s.base[q] + gamma * s.rest[q], quad.directions[q]));
  }
  return lo;
}

}  // namespace

ConvexityReport is_convex_valid(const SupportBody &body, const SphereQuadrature &quad,
                                double margin)
{
  ConvexityReport r;
  r.min_eigen = std::numeric_limits<double>::infinity();
  bool positive = true;
  for (std::size_t q = 0; q < quad.size(); ++q)
  {
    const Jet2 j = support_jet(body, quad.directions[q]);
    positive = positive && j.v > 0.0;
    r.min_eigen = std::min(r.min_eigen, min_tangent_eigen(j.H, quad.directions[q]));
  }
  r.valid = positive && r.min_eigen >= margin;
  return r;
}

SupportBody project_to_convex(const SupportBody &body, double margin,
                              const SphereQuadrature &quad)
{
  if (is_convex_valid(body, quad, margin).valid)
  {
    return body;
  }
  if (!(body.coeffs()[0] > 0.0))
  {
    throw DomainError("cannot restore convexity: degree-0 coefficient is not positive");
  }
  const SplitHessians split = split_hessians(body, quad);
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 40; ++it)
  {
    const double mid = 0.5 * (lo + hi);
    if (min_eigen_scaled(split, quad, mid) >= margin)
    {
      lo = mid;
    }
    else
    {
      hi = mid;
    }
  }
  Eigen::VectorXd c = body.coeffs() * lo;
  c[0] = body.coeffs()[0];
  SupportBody out(body.lmax(), body.axisymmetric(), std::move(c));
  // The split evaluation and the direct one differ by rounding; step down if needed.
  for (int guard = 0; guard < 8 && !is_convex_valid(out, quad, margin).valid; ++guard)
  {
    lo *= 0.999;
    Eigen::VectorXd d = body.coeffs() * lo;
    d[0] = body.coeffs()[0];
    out = SupportBody(body.lmax(), body.axisymmetric(), std::move(d));
  }
  return out;
}

// --- metric quantities ----------------------------------------------------------------

GridSpec body_grid(const SupportBody &body, int resolution)
{
  Vec3 lo, hi;
  for (int axis = 0; axis < 3; ++axis)
  {
    hi[axis] = eval_support(body, Vec3::Unit(axis));
    lo[axis] = -eval_support(body, -Vec3::Unit(axis));
  }
  return make_grid(lo, hi, resolution);
}

double volume(const SupportBody &body, int resolution, const SphereQuadrature &quad)
{
  if (resolution < 8)
  {
    throw DomainError("volume resolution must be at least 8");
  }
  const GridSpec grid = body_grid(body, resolution);
  const SupportPolytope poly(body, quad);
  std::size_t count = 0;
  for (int k = 0; k < grid.dims[2]; ++k)
  {
    for (int j = 0; j < grid.dims[1]; ++j)
    {
      for (int i = 0; i < grid.dims[0]; ++i)
      {
        count += poly.contains(grid.cell_center(i, j, k)) ? 1 : 0;
      }
    }
  }
  return static_cast<double>(count) * grid.cell_volume();
}

double support_volume(const SupportBody &body, const SphereQuadrature &quad)
{
  double v = 0.0;
  for (std::size_t q = 0; q < quad.size(); ++q)
  {
    // The Hessian of the homogeneous extension is zero along the normal, so the product of
    // its tangent eigenvalues is the second elementary symmetric function.
    const Jet2 j = support_jet(body, quad.directions[q]);
    const double tr = j.H.trace();
    const double det2 = 0.5 * (tr * tr - (j.H * j.H).trace());
    v += quad.weights[q] * j.v * det2;
  }
  return v / 3.0;
}

double diameter(const SupportBody &body, const SphereQuadrature &quad)
{
  const std::vector<double> h = support_values(body, quad);
  double d = 0.0;
  for (std::size_t q = 0; q < quad.size(); ++q)
  {
    d = std::max(d, h[q] + h[quad.antipode(q)]);
  }
  return d;
}

double hausdorff_distance(const SupportBody &a, const SupportBody &b,
                          const SphereQuadrature &quad)
{
  const std::vector<double> ha = support_values(a, quad);
  const std::vector<double> hb = support_values(b, quad);
  double d = 0.0;
  for (std::size_t q = 0; q < quad.size(); ++q)
  {
    d = std::max(d, std::abs(ha[q] - hb[q]));
  }
  return d;
}

// --- trapping cylinder ----------------------------------------------------------------

bool CylinderSpec::contains(const Vec3 &x, double tol) const
{
  const Vec3 d = x - center;
  const double along = d.dot(axis);
  const double radial = (d - along * axis).norm();
  return std::abs(along) <= half_height * (1.0 + tol) && radial <= radius * (1.0 + tol);
}

namespace
{

struct Chord
{
  double length = 0.0;
  Segment segment;
};

Chord chord_at(const SupportPolytope &poly, const Vec3 &x0, const Vec3 &u)
{
  Chord c;
  if (auto t = poly.chord(x0, u))
  {
    c.length = t->second - t->first;
    c.segment = {x0 + t->first * u, x0 + t->second * u};
  }
  return c;
}

// Longest chord with direction u through base + s * offset_dir, s in [lo, hi]. Chord
// length is concave in s on its support; a coarse scan locates the support and a
// golden-section search refines the maximum.
Chord longest_parallel_chord(const SupportPolytope &poly, const Vec3 &base, const Vec3 &offset_dir,
                             const Vec3 &u, double lo, double hi, int samples)
{
  Chord best;
  double best_s = lo;
  const double step = (hi - lo) / samples;
  for (int i = 0; i <= samples; ++i)
  {
    const double s = lo + i * step;
    Chord c = chord_at(poly, base + s * offset_dir, u);
    if (c.length > best.length)
    {
      best = c;
      best_s = s;
    }
  }
  double a = best_s - step, b = best_s + step;
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 40; ++it)
  {
    const double s1 = b - ratio * (b - a);
    const double s2 = a + ratio * (b - a);
    Chord c1 = chord_at(poly, base + s1 * offset_dir, u);
    Chord c2 = chord_at(poly, base + s2 * offset_dir, u);
    if (c1.length > best.length)
    {
      best = c1;
    }
    if (c2.length > best.length)
    {
      best = c2;
    }
    if (c1.length >= c2.length)
    {
      b = s2;
    }
    else
    {
      a = s1;
    }
  }
  return best;
}

// Orthonormal completion of a unit vector.
std::pair<Vec3, Vec3> tangent_frame(const Vec3 &n)
{
  const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 t1 = n.cross(helper).normalized();
  return {t1, n.cross(t1)};
}

}  // namespace

EnclosingCylinder enclosing_cylinder(const SupportBody &body, int resolution,
                                     const SphereQuadrature &quad)
{
  if (resolution < 8)
  {
    throw DomainError("enclosing_cylinder resolution must be at least 8");
  }
  const std::vector<double> h = support_values(body, quad);
  const SupportPolytope poly(body, quad);

  // L3: the sampled diameter, realized between the contact points of the widest
  // antipodal pair. Ties go to the first index.
  std::size_t widest = 0;
  double width = -1.0;
  for (std::size_t q = 0; q < quad.size(); ++q)
  {
    const double w = h[q] + h[quad.antipode(q)];
    if (w > width)
    {
      width = w;
      widest = q;
    }
  }
  const Vec3 nu3 = quad.directions[widest];
  EnclosingCylinder out;
  TrapSegments &seg = out.segments;
  seg.L3 = {contact_point(body, -nu3), contact_point(body, nu3)};
  const Vec3 a3 = seg.L3.direction();

  // L2: over planes orthogonal to L3, the largest section diameter. Inside one plane the
  // diameter is the longest chord over all in-plane directions.
  const auto [e1, e2] = tangent_frame(a3);
  const double t_lo = -eval_support(body, -a3);
  const double t_hi = eval_support(body, a3);
  const int n_angles = std::max(16, 2 * resolution);
  Chord best_l2;
  double best_t = 0.0;
  for (int k = 1; k < resolution; ++k)
  {
    const double t = t_lo + (t_hi - t_lo) * k / resolution;
    for (int j = 0; j < n_angles; ++j)
    {
      const double theta = kPi * j / n_angles;
      const Vec3 u = std::cos(theta) * e1 + std::sin(theta) * e2;
      const Vec3 w = a3.cross(u);
      const double o_lo = -eval_support(body, -w);
      const double o_hi = eval_support(body, w);
      Chord c = longest_parallel_chord(poly, t * a3, w, u, o_lo, o_hi, resolution);
      if (c.length > best_l2.length)
      {
        best_l2 = c;
        best_t = t;
      }
    }
  }
  if (best_l2.length <= 0.0)
  {
    throw ContainmentError("no section of the body was found", seg.L3.a);
  }
  seg.L2 = best_l2.segment;
  const Vec3 u2 = seg.L2.direction();
  const Vec3 n1 = a3.cross(u2).normalized();

  // L2_perp: longest chord of the same section orthogonal to L2.
  {
    const Vec3 base = best_t * a3;
    seg.L2_perp = longest_parallel_chord(poly, base, u2, n1, -eval_support(body, -u2),
                                         eval_support(body, u2), resolution)
                      .segment;
  }

  // L1: longest chord orthogonal to span(L2, L3), over the two-parameter family of
  // parallel lines; coarse scan over the a3 offset, refined search along u2 per offset.
  {
    Chord best;
    double best_ta = t_lo;
    const double u_lo = -eval_support(body, -u2), u_hi = eval_support(body, u2);
    const double step = (t_hi - t_lo) / resolution;
    for (int k = 0; k <= resolution; ++k)
    {
      const double ta = t_lo + step * k;
      Chord c = longest_parallel_chord(poly, ta * a3, u2, n1, u_lo, u_hi, resolution);
      if (c.length > best.length)
      {
        best = c;
        best_ta = ta;
      }
    }
    double a = best_ta - step, b = best_ta + step;
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 30; ++it)
    {
      const double s1 = b - ratio * (b - a), s2 = a + ratio * (b - a);
      Chord c1 = longest_parallel_chord(poly, s1 * a3, u2, n1, u_lo, u_hi, resolution);
      Chord c2 = longest_parallel_chord(poly, s2 * a3, u2, n1, u_lo, u_hi, resolution);
      if (c1.length > best.length)
      {
        best = c1;
      }
      if (c2.length > best.length)
      {
        best = c2;
      }
      if (c1.length >= c2.length)
      {
        b = s2;
      }
      else
      {
        a = s1;
      }
    }
    seg.L1 = best.segment;
  }

  // Cylinder D_{2|L3|} x (-|L1|, |L1|) along n1, centered at the middle of L3 and at the
  // middle of the body's extent along n1.
  CylinderSpec &cyl = out.cylinder;
  cyl.axis = n1;
  cyl.radius = 2.0 * seg.L3.length();
  cyl.half_height = seg.L1.length();
  const Vec3 mid = 0.5 * (seg.L3.a + seg.L3.b);
  const double n1_mid = 0.5 * (eval_support(body, n1) - eval_support(body, -n1));
  cyl.center = mid + (n1_mid - mid.dot(n1)) * n1;

  for (std::size_t q = 0; q < quad.size(); ++q)
  {
    const Vec3 x = contact_point(body, quad.directions[q]);
    if (!cyl.contains(x, 1e-9))
    {
      std::ostringstream msg;
      msg << std::setprecision(17) << "enclosing cylinder misses boundary point (" << x.x()
          << ", " << x.y() << ", " << x.z() << "); increase resolution";
      throw ContainmentError(msg.str(), x);
    }
  }
  return out;
}

// --- serialization --------------------------------------------------------------------

void write_support_body(std::ostream &os, const SupportBody &body)
{
  os << "SUPPORTBODY v1 lmax=" << body.lmax() << " axisym=" << (body.axisymmetric() ? 1 : 0)
     << '\n';
  os << std::setprecision(17);
  for (int l = 0; l <= body.lmax(); ++l)
  {
    for (int m = -l; m <= l; ++m)
    {
      if (body.axisymmetric() && m != 0)
      {
        continue;
      }
      os << l << ' ' << m << ' ' << body.coeff(l, m) << '\n';
    }
  }
}

SupportBody read_support_body(std::istream &is)
{
  std::string header;
  if (!std::getline(is, header))
  {
    throw DomainError("empty SUPPORTBODY stream");
  }
  int lmax = -1, axisym = -1;
  {
    std::istringstream hs(header);
    std::string magic, version, lmax_tok, axisym_tok;
    hs >> magic >> version >> lmax_tok >> axisym_tok;
    if (magic != "SUPPORTBODY" || version != "v1" || lmax_tok.rfind("lmax=", 0) != 0 ||
        axisym_tok.rfind("axisym=", 0) != 0)
    {
      throw DomainError("bad SUPPORTBODY header: " + header);
    }
    try
    {
      lmax = std::stoi(lmax_tok.substr(5));
      axisym = std::stoi(axisym_tok.substr(7));
    }
    catch (const std::exception &)
    {
      throw DomainError("bad SUPPORTBODY header: " + header);
    }
  }
  if (lmax < 0 || (axisym != 0 && axisym != 1))
  {
    throw DomainError("bad SUPPORTBODY header: " + header);
  }
  SupportBody body(lmax, axisym == 1);
  std::string line;
  while (std::getline(is, line))
  {
    if (line.empty() || line[0] == '#')
    {
      continue;
    }
    std::istringstream ls(line);
    int l = 0, m = 0;
    double value = 0.0;
    if (!(ls >> l >> m >> value))
    {
      throw DomainError("bad SUPPORTBODY coefficient line: " + line);
    }
    body.set_coeff(l, m, value);
  }
  return body;
}

void save_support_body(const std::string &path, const SupportBody &body)
{
  std::ostringstream os;
  write_support_body(os, body);
  write_file_atomic(path, os.str());
}

SupportBody load_support_body(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw DomainError("cannot open body file: " + path);
  }
  return read_support_body(in);
}

}  // namespace beltrami
