// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "beltrami/gamma_metric.hpp"
#include "oracles.hpp"

using namespace beltrami;

namespace
{

const BoxDomain &box16()
{
  static const BoxDomain box(Vec3::Constant(-1.0), Vec3::Constant(1.0), 16);
  return box;
}

}  // namespace

TEST(SubdomainOperator, WholeBoxIsTheProjectedOperator)
{
  const BoxDomain &box = box16();
  const SubdomainOperator whole(box, box.domain());
  const ProjectedBiotSavart direct(box.domain());
  std::mt19937_64 rng(41);
  const FaceField w = oracle::gaussian(box.domain().face_count(), rng);
  const FaceField a = whole.apply(w), b = direct.apply(w);
  EXPECT_LE((a - b).norm(), 1e-12 * b.norm());
}

TEST(SubdomainOperator, ExtendsByZeroAndIsLinear)
{
  const BoxDomain &box = box16();
  const SubdomainOperator sub(box, box.rasterize(SupportBody::ball(0.5)));
  std::mt19937_64 rng(42);
  const FaceField w = oracle::gaussian(box.domain().face_count(), rng);
  // Zero the faces belonging to the subdomain: what remains lives outside it.
  const FaceField outside = w - sub.extend(sub.restrict(w));
  EXPECT_EQ(sub.restrict(outside).norm(), 0.0);
  EXPECT_EQ(sub.apply(outside).norm(), 0.0);

  const FaceField aw = sub.apply(w);
  EXPECT_LE((aw - sub.extend(sub.restrict(aw))).norm(), 1e-14 * aw.norm());
  const FaceField v = oracle::gaussian(box.domain().face_count(), rng);
  const FaceField lin = sub.apply(2.0 * w - 3.0 * v) - (2.0 * aw - 3.0 * sub.apply(v));
  // Linear up to the Poisson solver tolerance inside the projection.
  EXPECT_LE(lin.norm(), 1e-8 * aw.norm());
  EXPECT_LE((bs_tilde_apply(box, sub, w) - aw).norm(), 1e-14 * aw.norm());
}

TEST(SubdomainOperator, RejectsForeignLattice)
{
  const BoxDomain &box = box16();
  EXPECT_ANY_THROW(SubdomainOperator(box, rasterize(SupportBody::ball(0.5), 16)));
}

TEST(GammaDistance, IdentitySymmetryAndNesting)
{
  const BoxDomain &box = box16();
  const SubdomainOperator b50(box, box.rasterize(SupportBody::ball(0.5)));
  const SubdomainOperator b55(box, box.rasterize(SupportBody::ball(0.55)));
  const SubdomainOperator b60(box, box.rasterize(SupportBody::ball(0.6)));
  EXPECT_EQ(gamma_distance(box, b50, b50, 1, 4).value, 0.0);
  const GammaEstimate d12 = gamma_distance(box, b50, b55, 1, 8);
  const GammaEstimate d21 = gamma_distance(box, b55, b50, 1, 8);
  const GammaEstimate d13 = gamma_distance(box, b50, b60, 1, 8);
  EXPECT_TRUE(d12.converged);
  EXPECT_EQ(d12.method, "power-iteration");
  EXPECT_GT(d12.value, 0.0);
  EXPECT_NEAR(d12.value, d21.value, 1e-6 * d12.value);
  EXPECT_LE(d12.sampling_lower, d12.value * (1.0 + 1e-8));
  EXPECT_GE(d13.value, d12.value);
  EXPECT_DOUBLE_EQ(d12.spacing, box.domain().spacing());
}

TEST(Lipschitz, EigenvalueGapBoundedByGammaDistance)
{
  const BoxDomain &box = box16();
  const SubdomainOperator a(box, box.rasterize(SupportBody::ball(0.5)));
  const SubdomainOperator b(box, box.rasterize(SupportBody::ball(0.55)));
  const GammaEstimate g = gamma_distance(box, a, b, 1, 8);
  std::vector<LipschitzReport> reports;
  for (int k : {1, 2})
  {
    const LipschitzReport r = lipschitz_check(a, b, k, g, 1);
    EXPECT_TRUE(r.holds) << "k=" << k << " gap=" << r.gap << " d=" << r.d_gamma;
    EXPECT_GT(r.sigma_b, r.sigma_a);
    EXPECT_NEAR(r.gap, std::abs(r.sigma_a - r.sigma_b), 1e-15);
    reports.push_back(r);
  }
  std::ostringstream os;
  write_gamma_report(os, g, reports);
  for (const char *key : {"d_gamma=", "method=", "lambda_1=", "gap_2=", "inequality_1="})
  {
    EXPECT_NE(os.str().find(key), std::string::npos) << key;
  }
}
