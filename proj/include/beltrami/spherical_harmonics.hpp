// SPDX-License-Identifier: Apache-2.0

#ifndef BELTRAMI_SPHERICAL_HARMONICS_HPP
#define BELTRAMI_SPHERICAL_HARMONICS_HPP

#include <cmath>
#include <span>
#include <vector>

#include "beltrami/common.hpp"

namespace beltrami
{

// Real orthonormal spherical harmonics, flattened as index = l*l + l + m with
// m in [-l, l]. m > 0 carries cos(m phi), m < 0 carries sin(|m| phi); no Condon-Shortley
// phase. The degree-0 harmonic is 1/sqrt(4 pi).
constexpr int sh_index(int l, int m) { return l * l + l + m; }
constexpr int sh_count(int lmax) { return (lmax + 1) * (lmax + 1); }

inline int sh_degree(int index)
{
  int l = static_cast<int>(std::sqrt(static_cast<double>(index)));
  while (l * l > index)
  {
    --l;
  }
  while ((l + 1) * (l + 1) <= index)
  {
    ++l;
  }
  return l;
}

inline int sh_order(int index)
{
  const int l = sh_degree(index);
  return index - l * l - l;
}

namespace detail
{

inline double sh_norm(int l, int m)
{
  // sqrt((2l+1)/(4pi) * (l-m)!/(l+m)!), times sqrt(2) for m != 0.
  double ratio = 1.0;
  for (int k = l - m + 1; k <= l + m; ++k)
  {
    ratio /= static_cast<double>(k);
  }
  double n = std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) * ratio);
  return m == 0 ? n : n * std::sqrt(2.0);
}

}  // namespace detail

// Regular solid harmonics r^l Y_lm(x/r) as polynomials in (x, y, z). T may be double or
// any type closed under +, -, * and scalar multiplication (e.g. Jet2).
template <typename T>
void solid_harmonics(const T &x, const T &y, const T &z, int lmax, std::span<T> out)
{
  const T r2 = x * x + y * y + z * z;

  // (x + i y)^m split into real and imaginary parts.
  std::vector<T> cm(lmax + 1), sm(lmax + 1);
  cm[0] = T(1.0);
  sm[0] = T(0.0);
  for (int m = 1; m <= lmax; ++m)
  {
    cm[m] = x * cm[m - 1] - y * sm[m - 1];
    sm[m] = x * sm[m - 1] + y * cm[m - 1];
  }

  std::vector<T> q(lmax + 1);
  for (int m = 0; m <= lmax; ++m)
  {
    // q[l] = r^(l-m) P_l^m(z/r) / sin^m(theta), polynomial in z and r^2.
    double dfact = 1.0;
    for (int k = 2 * m - 1; k > 1; k -= 2)
    {
      dfact *= k;
    }
    q[m] = T(dfact);
    if (m + 1 <= lmax)
    {
      q[m + 1] = z * q[m] * static_cast<double>(2 * m + 1);
    }
    for (int l = m + 2; l <= lmax; ++l)
    {
      q[l] = (z * q[l - 1] * static_cast<double>(2 * l - 1) -
              r2 * q[l - 2] * static_cast<double>(l + m - 1)) *
             (1.0 / static_cast<double>(l - m));
    }
    for (int l = m; l <= lmax; ++l)
    {
      const double n = detail::sh_norm(l, m);
      if (m == 0)
      {
        out[sh_index(l, 0)] = q[l] * n;
      }
      else
      {
        out[sh_index(l, m)] = q[l] * cm[m] * n;
        out[sh_index(l, -m)] = q[l] * sm[m] * n;
      }
    }
  }
}

// Y_lm at a unit direction, all (l, m) up to lmax.
inline std::vector<double> spherical_harmonics(const Vec3 &dir, int lmax)
{
  std::vector<double> out(sh_count(lmax));
  solid_harmonics<double>(dir.x(), dir.y(), dir.z(), lmax, out);
  return out;
}

}  // namespace beltrami

#endif  // BELTRAMI_SPHERICAL_HARMONICS_HPP
