// SPDX-License-Identifier: Apache-2.0

#ifndef BELTRAMI_JET_HPP
#define BELTRAMI_JET_HPP

#include <cmath>

#include "beltrami/common.hpp"

namespace beltrami
{

// Second-order forward-mode jet of a scalar function of three variables: value, gradient
// and Hessian propagated through arithmetic.
struct Jet2
{
  double v = 0.0;
  Vec3 g = Vec3::Zero();
  Mat3 H = Mat3::Zero();

  Jet2() = default;
  Jet2(double value) : v(value) {}  // NOLINT: implicit constants are intended

  static Jet2 variable(double value, int axis)
  {
    Jet2 j(value);
    j.g[axis] = 1.0;
    return j;
  }

  Jet2 &operator+=(const Jet2 &o)
  {
    v += o.v;
    g += o.g;
    H += o.H;
    return *this;
  }
  Jet2 &operator-=(const Jet2 &o)
  {
    v -= o.v;
    g -= o.g;
    H -= o.H;
    return *this;
  }
  Jet2 &operator*=(double s)
  {
    v *= s;
    g *= s;
    H *= s;
    return *this;
  }
};

inline Jet2 operator+(Jet2 a, const Jet2 &b) { return a += b; }
inline Jet2 operator-(Jet2 a, const Jet2 &b) { return a -= b; }
inline Jet2 operator-(Jet2 a)
{
  a *= -1.0;
  return a;
}
inline Jet2 operator*(Jet2 a, double s) { return a *= s; }
inline Jet2 operator*(double s, Jet2 a) { return a *= s; }

inline Jet2 operator*(const Jet2 &a, const Jet2 &b)
{
  Jet2 r;
  r.v = a.v * b.v;
  r.g = a.g * b.v + b.g * a.v;
  r.H = a.H * b.v + b.H * a.v + a.g * b.g.transpose() + b.g * a.g.transpose();
  return r;
}

inline Jet2 reciprocal(const Jet2 &b)
{
  const double inv = 1.0 / b.v;
  Jet2 r;
  r.v = inv;
  r.g = -b.g * (inv * inv);
  r.H = -b.H * (inv * inv) + (b.g * b.g.transpose()) * (2.0 * inv * inv * inv);
  return r;
}

inline Jet2 operator/(const Jet2 &a, const Jet2 &b) { return a * reciprocal(b); }
inline Jet2 operator/(Jet2 a, double s) { return a *= 1.0 / s; }

inline Jet2 sqrt(const Jet2 &a)
{
  const double s = std::sqrt(a.v);
  Jet2 r;
  r.v = s;
  r.g = a.g / (2.0 * s);
  r.H = a.H / (2.0 * s) - (a.g * a.g.transpose()) / (4.0 * s * s * s);
  return r;
}

}  // namespace beltrami

#endif  // BELTRAMI_JET_HPP
