// SPDX-License-Identifier: Apache-2.0

#ifndef BELTRAMI_BOUNDS_HPP
#define BELTRAMI_BOUNDS_HPP

namespace beltrami
{

struct CylinderBound
{
  double M = 0.0;         // sup_x int_C |x - y|^-2 dy, attained at the center
  double mu_lower = 0.0;  // 4 pi / M
};

// M = 2 pi h ln(1 + R^2/h^2) + 4 pi R arctan(h/R) for the cylinder D_R x (-h, h).
double cylinder_M(double R, double h);
double cylinder_mu_lower(double R, double h);
CylinderBound cylinder_bound(double R, double h);

// (4 pi / (3 V))^(1/3), the volume-only lower bound for mu_1 and -mu_{-1}.
double faber_krahn_bound(double V);

// mu_1 of the ball of radius r: x*/r with x* the root of tan x = x in (pi, 3 pi / 2).
double ball_mu_reference(double r = 1.0);

// Independent value of int_C |y|^-2 dy by adaptive cubature over (rho, z) in cylindrical
// coordinates, used to cross-check cylinder_M. The integrand's singularity at the origin
// is confined to the corner cell, which is integrated in spherical coordinates.
double cylinder_M_quadrature(double R, double h, double rel_tol = 1e-6);

}  // namespace beltrami

#endif  // BELTRAMI_BOUNDS_HPP
