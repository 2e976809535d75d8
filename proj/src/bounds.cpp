// SPDX-License-Identifier: Apache-2.0

#include "beltrami/bounds.hpp"

#include <array>
#include <cmath>

#include "beltrami/common.hpp"

namespace beltrami
{

double cylinder_M(double R, double h)
{
  if (!(R > 0.0 && h > 0.0))
  {
    throw DomainError("cylinder_M needs R > 0 and h > 0");
  }
  return 2.0 * kPi * h * std::log1p(R * R / (h * h)) + 4.0 * kPi * R * std::atan(h / R);
}

double cylinder_mu_lower(double R, double h)
{
  return 4.0 * kPi / cylinder_M(R, h);
}

CylinderBound cylinder_bound(double R, double h)
{
  CylinderBound b;
  b.M = cylinder_M(R, h);
  b.mu_lower = 4.0 * kPi / b.M;
  return b;
}

double faber_krahn_bound(double V)
{
  if (!(V > 0.0))
  {
    throw DomainError("faber_krahn_bound needs V > 0");
  }
  return std::cbrt(4.0 * kPi / (3.0 * V));
}

double ball_mu_reference(double r)
{
  if (!(r > 0.0))
  {
    throw DomainError("ball radius must be positive");
  }
  // tan x = x  <=>  sin x - x cos x = 0, which has no poles on [pi, 3 pi / 2].
  auto f = [](double x) { return std::sin(x) - x * std::cos(x); };
  double lo = kPi, hi = 1.5 * kPi;
  while (hi - lo > 1e-13)
  {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) > 0.0) == (f(lo) > 0.0))
    {
      lo = mid;
    }
    else
    {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi) / r;
}

namespace
{

constexpr std::array<double, 5> kGaussNodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                            0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights{0.2369268850561891, 0.4786286704993665,
                                              0.5688888888888889, 0.4786286704993665,
                                              0.2369268850561891};

// rho / (rho^2 + z^2): the cylinder integrand after integrating out the angle
// (up to the factor 4 pi from the angle and the z-symmetry).
double integrand(double rho, double z)
{
  return rho / (rho * rho + z * z);
}

double gauss_rect(double a, double b, double c, double d)
{
  double s = 0.0;
  for (int i = 0; i < 5; ++i)
  {
    const double rho = 0.5 * (a + b) + 0.5 * (b - a) * kGaussNodes[i];
    for (int j = 0; j < 5; ++j)
    {
      const double z = 0.5 * (c + d) + 0.5 * (d - c) * kGaussNodes[j];
      s += kGaussWeights[i] * kGaussWeights[j] * integrand(rho, z);
    }
  }
  return s * 0.25 * (b - a) * (d - c);
}

double gauss_1d(double a, double b, int panels, auto &&f)
{
  double s = 0.0;
  const double w = (b - a) / panels;
  for (int p = 0; p < panels; ++p)
  {
    const double lo = a + p * w;
    for (int i = 0; i < 5; ++i)
    {
      s += kGaussWeights[i] * f(lo + 0.5 * w * (1.0 + kGaussNodes[i]));
    }
  }
  return s * 0.5 * w;
}

// Corner cell [0, b] x [0, d] in polar coordinates rho = r cos t, z = r sin t, where the
// integrand times the Jacobian is cos t and the radial integral is the exit distance.
double polar_corner(double b, double d)
{
  const double split = std::atan2(d, b);
  auto lower = [b](double t) { return std::cos(t) * b / std::cos(t); };
  auto upper = [d](double t) { return std::cos(t) * d / std::sin(t); };
  return gauss_1d(0.0, split, 16, lower) + gauss_1d(split, 0.5 * kPi, 16, upper);
}

double adaptive(double a, double b, double c, double d, double whole, double tol, int depth)
{
  const double mr = 0.5 * (a + b), mz = 0.5 * (c + d);
  const double parts = gauss_rect(a, mr, c, mz) + gauss_rect(mr, b, c, mz) +
                       gauss_rect(a, mr, mz, d) + gauss_rect(mr, b, mz, d);
  if (depth > 24 || std::abs(parts - whole) <= tol)
  {
    return parts;
  }
  return adaptive(a, mr, c, mz, gauss_rect(a, mr, c, mz), 0.25 * tol, depth + 1) +
         adaptive(mr, b, c, mz, gauss_rect(mr, b, c, mz), 0.25 * tol, depth + 1) +
         adaptive(a, mr, mz, d, gauss_rect(a, mr, mz, d), 0.25 * tol, depth + 1) +
         adaptive(mr, b, mz, d, gauss_rect(mr, b, mz, d), 0.25 * tol, depth + 1);
}

}  // namespace

double cylinder_M_quadrature(double R, double h, double rel_tol)
{
  if (!(R > 0.0 && h > 0.0))
  {
    throw DomainError("cylinder_M_quadrature needs R > 0 and h > 0");
  }
  // Quarter section [0, R] x [0, h] of the (rho, z) half-plane, split into an n x n grid
  // whose corner cell holds the singularity.
  constexpr int n = 8;
  const double dr = R / n, dz = h / n;
  const double scale = std::max(R, h);
  double total = 0.0;
  for (int i = 0; i < n; ++i)
  {
    for (int j = 0; j < n; ++j)
    {
      if (i == 0 && j == 0)
      {
        total += polar_corner(dr, dz);
        continue;
      }
      const double a = i * dr, b = a + dr, c = j * dz, d = c + dz;
      total += adaptive(a, b, c, d, gauss_rect(a, b, c, d), rel_tol * scale / (n * n), 0);
    }
  }
  return 4.0 * kPi * total;
}

}  // namespace beltrami
