// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "beltrami/bounds.hpp"
#include "beltrami/common.hpp"
#include "oracles.hpp"

using namespace beltrami;

TEST(CylinderM, UnitCylinderMatchesClosedForm)
{
  const double expected = 2.0 * oracle::pi * std::log(2.0) + oracle::pi * oracle::pi;
  EXPECT_NEAR(cylinder_M(1.0, 1.0), expected, 1e-12);
  EXPECT_NEAR(expected, 14.22478, 1e-5);
  EXPECT_NEAR(cylinder_mu_lower(1.0, 1.0), 4.0 * oracle::pi / expected, 1e-12);
  EXPECT_NEAR(cylinder_mu_lower(1.0, 1.0), 0.88342, 1e-5);
}

TEST(CylinderM, QuadratureAgreesOnParameterGrid)
{
  const double grid[5][2] = {{1, 1}, {0.5, 2}, {2, 0.5}, {3, 0.2}, {0.1, 1}};
  for (const auto &rh : grid)
  {
    const double closed = oracle::cylinder_M(rh[0], rh[1]);
    EXPECT_NEAR(cylinder_M_quadrature(rh[0], rh[1]) / closed, 1.0, 1e-3)
        << "R=" << rh[0] << " h=" << rh[1];
  }
}

TEST(CylinderM, HomogeneousAndVanishingForFlatCylinders)
{
  for (double lambda : {0.3, 2.0, 7.0})
  {
    EXPECT_NEAR(cylinder_M(lambda * 1.3, lambda * 0.7), lambda * cylinder_M(1.3, 0.7), 1e-10);
  }
  EXPECT_LT(cylinder_M(1.0, 1e-8), 1e-5);
  EXPECT_LT(cylinder_M(1.0, 1e-12), 1e-9);
}

TEST(CylinderM, LowerBoundDivergesAlongFlatteningSequence)
{
  // R = n, h = 1/sqrt(n): the bound dips until n = 4 and increases from there on.
  const auto at = [](double n) { return cylinder_mu_lower(n, 1.0 / std::sqrt(n)); };
  EXPECT_LT(at(3.0), at(2.0));
  double prev = at(4.0);
  for (int n = 5; n <= 2000; ++n)
  {
    const double cur = at(n);
    EXPECT_GT(cur, prev) << n;
    prev = cur;
  }
  EXPECT_NEAR(at(1e6), 4.0 * oracle::pi / oracle::cylinder_M(1e6, 1e-3), 1e-9);
  EXPECT_GT(at(1e6), 40.0);
}

TEST(CylinderM, RejectsNonpositiveInput)
{
  EXPECT_THROW(cylinder_M(0.0, 1.0), DomainError);
  EXPECT_THROW(cylinder_M(1.0, -1.0), DomainError);
  EXPECT_THROW(cylinder_mu_lower(-1.0, 1.0), DomainError);
  EXPECT_THROW(cylinder_M_quadrature(1.0, 0.0), DomainError);
}

TEST(FaberKrahn, KnownValuesAndMonotonicity)
{
  EXPECT_NEAR(faber_krahn_bound(4.0 * oracle::pi / 3.0), 1.0, 1e-14);
  EXPECT_NEAR(faber_krahn_bound(8.0 * 4.0 * oracle::pi / 3.0), 0.5, 1e-14);
  double prev = faber_krahn_bound(0.01);
  for (double v = 0.02; v < 100.0; v *= 1.3)
  {
    const double cur = faber_krahn_bound(v);
    EXPECT_LT(cur, prev);
    prev = cur;
  }
  EXPECT_THROW(faber_krahn_bound(0.0), DomainError);
}

TEST(BallReference, MatchesNewtonRootAndScales)
{
  const double root = oracle::tan_root();
  EXPECT_NEAR(root, 4.493409457909064, 1e-12);
  EXPECT_NEAR(ball_mu_reference(1.0), root, 1e-9);
  EXPECT_NEAR(ball_mu_reference(2.0), root / 2.0, 1e-9);
  const double x = ball_mu_reference(1.0);
  EXPECT_LT((std::tan(x - 1e-8) - (x - 1e-8)) * (std::tan(x + 1e-8) - (x + 1e-8)), 0.0);
  EXPECT_THROW(ball_mu_reference(0.0), DomainError);
}
