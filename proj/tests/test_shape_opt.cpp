// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "beltrami/shape_opt.hpp"
#include "beltrami/spherical_harmonics.hpp"
#include "oracles.hpp"

using namespace beltrami;

TEST(ShapeGradient, TraceMinusMeanSquareOverThreeV)
{
  const ObjectiveValue ov = objective(SupportBody::ball(1.0), 16, 1);
  const Eigen::VectorXd g = shape_gradient(ov.domain, ov.result);
  const CellField u = interpolate_to_cells(ov.domain, ov.result.eigenfield);
  const Eigen::VectorXd trace = boundary_trace_sq(ov.domain, u);
  double l2 = 0.0;
  for (Eigen::Index c = 0; c < u.cols(); ++c)
  {
    l2 += u.col(c).squaredNorm();
  }
  l2 *= std::pow(ov.domain.spacing(), 3);
  ASSERT_EQ(g.size(), static_cast<Eigen::Index>(ov.domain.boundary_faces().size()));
  EXPECT_LE((g - trace + Eigen::VectorXd::Constant(g.size(), l2 / (3.0 * ov.V))).norm(),
            1e-12 * trace.norm());
}

TEST(BoundaryGeometry, BallNormalsAndArea)
{
  const SupportBody ball = SupportBody::ball(1.0);
  const VoxelDomain d = rasterize(ball, 24);
  const BoundaryGeometry geo = boundary_geometry(d, ball);
  const auto &bf = d.boundary_faces();
  for (std::size_t i = 0; i < bf.size(); ++i)
  {
    const Vec3 x = d.face_centroid(bf[i]).normalized();
    EXPECT_GT(geo.normal[i].dot(x), 0.99);
  }
  EXPECT_NEAR(geo.weight.sum() / (4.0 * oracle::pi), 1.0, 0.05);
}

TEST(Diagnostic, ConstantTraceFlagsAndZeroDoesNot)
{
  NoiseFloor noise;
  noise.variance = 0.05;
  noise.min_trace = 0.01;
  const OptimalityDiagnostic c = diagnose_trace(Eigen::VectorXd::Constant(50, 2.0), noise);
  EXPECT_EQ(c.variance, 0.0);
  EXPECT_TRUE(c.ph_flag);
  const OptimalityDiagnostic z = diagnose_trace(Eigen::VectorXd::Zero(50), noise);
  EXPECT_FALSE(z.ph_flag);
  Eigen::VectorXd two(2);
  two << 1.0, 3.0;
  const OptimalityDiagnostic t = diagnose_trace(two, noise);
  EXPECT_DOUBLE_EQ(t.variance, 0.25);
  EXPECT_DOUBLE_EQ(t.min_trace, 1.0);
  EXPECT_FALSE(t.ph_flag);
}

TEST(StepBody, ZeroAndConstantSpeeds)
{
  const SupportBody s = SupportBody::spheroid(1.0, 1.0, 1.2, 4);
  const VoxelDomain ds = rasterize(s, 16);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(ds.boundary_faces().size());
  EXPECT_LE((step_body(s, ds, zero, 0.1).coeffs() - s.coeffs()).norm(), 1e-10);

  // A constant speed dilates the ball; the volume gauge undoes it.
  const SupportBody ball = SupportBody::ball(1.0, 4);
  const VoxelDomain db = rasterize(ball, 16);
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(db.boundary_faces().size(), 0.3);
  EXPECT_LE((step_body(ball, db, c, 0.5).coeffs() - ball.coeffs()).norm(), 1e-10);
}

TEST(StepBody, AxisymmetricBodiesStayZonalAndKeepVolume)
{
  const SupportBody s = SupportBody::spheroid(1.0, 1.0, 1.3, 6);
  ASSERT_TRUE(s.axisymmetric());
  const VoxelDomain d = rasterize(s, 16);
  std::mt19937_64 rng(31);
  Eigen::VectorXd g = oracle::gaussian(d.boundary_faces().size(), rng);
  const SupportBody m = step_body(s, d, g, 0.05);
  EXPECT_TRUE(m.axisymmetric());
  for (int i = 0; i < m.coeffs().size(); ++i)
  {
    if (sh_order(i) != 0)
    {
      EXPECT_EQ(m.coeffs()[i], 0.0);
    }
  }
  EXPECT_GT((m.coeffs() - s.coeffs()).norm(), 1e-4);
  EXPECT_NEAR(support_volume(m) / support_volume(s), 1.0, 1e-10);
  EXPECT_TRUE(is_convex_valid(m).valid);
}

TEST(Objective, ScaleInvariant)
{
  const SupportBody b = SupportBody::spheroid(1.0, 0.9, 1.2, 4);
  const double j = objective(b, 16, 1).J;
  for (double lambda : {0.5, 2.0})
  {
    EXPECT_NEAR(objective(b.scaled(lambda), 16, 1).J / j, 1.0, 1e-5) << lambda;
  }
}

TEST(Objective, SphereAndMildSpheroidAreClose)
{
  const double jb = objective(SupportBody::ball(1.0), 16, 1).J;
  const double js = objective(SupportBody::spheroid(1.0, 1.0, 1.5, 6), 16, 1).J;
  EXPECT_NEAR(js / jb, 1.0, 0.2);
}

TEST(Optimize, ZeroStepRecordsWithoutMoving)
{
  OptConfig cfg;
  cfg.resolution = 16;
  cfg.lmax = 4;
  cfg.step = 0.0;
  cfg.max_iterations = 2;
  const OptTrajectory t = optimize(cfg, SupportBody::ball(1.0));
  ASSERT_EQ(t.records.size(), 2u);
  EXPECT_EQ(t.records[0].J, t.records[1].J);
  EXPECT_FALSE(t.records[0].accepted);
  EXPECT_EQ(t.final_J, t.records[0].J);
  std::ostringstream os;
  write_trajectory_csv(os, t, "note");
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("# note\niter,J,mu1,V,variance,min_trace,step,accepted\n", 0), 0u);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 4);
}

TEST(Optimize, RejectsBadConfig)
{
  OptConfig cfg;
  cfg.resolution = 8;
  EXPECT_THROW(optimize(cfg, SupportBody::ball(1.0)), DomainError);
  cfg.resolution = 16;
  cfg.step = -1.0;
  EXPECT_THROW(optimize(cfg, SupportBody::ball(1.0)), DomainError);
}
