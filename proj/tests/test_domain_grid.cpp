// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "beltrami/domain_grid.hpp"
#include "oracles.hpp"

using namespace beltrami;

namespace
{

std::vector<SupportBody> random_bodies(int count, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<SupportBody> out;
  for (int i = 0; i < count; ++i)
  {
    SupportBody b = SupportBody::ball(1.0, 2);
    for (int l = 1; l <= 2; ++l)
    {
      for (int m = -l; m <= l; ++m)
      {
        b.set_coeff(l, m, 0.3 * u(rng));
      }
    }
    out.push_back(project_to_convex(b));
  }
  return out;
}

CellScalar cell_function(const VoxelDomain &d, double (*f)(const Vec3 &))
{
  CellScalar p(static_cast<Eigen::Index>(d.cell_count()));
  for (std::size_t c = 0; c < d.cell_count(); ++c)
  {
    p[static_cast<Eigen::Index>(c)] = f(d.cell_center(static_cast<int>(c)));
  }
  return p;
}

bool interior_cell(const VoxelDomain &d, int c)
{
  for (int f : d.cell_faces(c))
  {
    if (d.faces()[f].boundary())
    {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST(Rasterize, BallVolumeAndFaceStructure)
{
  const VoxelDomain d = rasterize(SupportBody::ball(1.0), 32);
  EXPECT_NEAR(d.volume() / (4.0 * oracle::pi / 3.0), 1.0, 0.03);
  EXPECT_NEAR(d.volume(), volume(SupportBody::ball(1.0), 32), 1e-12);
  std::size_t boundary = 0;
  for (const auto &f : d.faces())
  {
    EXPECT_TRUE(f.minus >= 0 || f.plus >= 0);
    boundary += f.boundary() ? 1 : 0;
  }
  EXPECT_EQ(boundary, d.boundary_faces().size());
  for (std::size_t c = 0; c < d.cell_count(); ++c)
  {
    const auto &cf = d.cell_faces(static_cast<int>(c));
    for (int axis = 0; axis < 3; ++axis)
    {
      EXPECT_EQ(d.faces()[cf[2 * axis]].plus, static_cast<int>(c));
      EXPECT_EQ(d.faces()[cf[2 * axis + 1]].minus, static_cast<int>(c));
    }
  }
}

TEST(Rasterize, ScaledBodyIsCongruent)
{
  const SupportBody b = random_bodies(1, 4).front();
  const VoxelDomain a = rasterize(b, 16);
  const VoxelDomain s = rasterize(b.scaled(3.0), 16);
  EXPECT_EQ(a.cells(), s.cells());
  EXPECT_NEAR(s.spacing(), 3.0 * a.spacing(), 1e-12);
}

TEST(Rasterize, SliverAndThinCylinderAreEmpty)
{
  // A small ball between the cell centers of a coarse lattice.
  const GridSpec coarse = make_grid(Vec3::Constant(-1.0), Vec3::Constant(1.0), 2);
  EXPECT_THROW(rasterize(SupportBody::ball(0.2), coarse), EmptyDomainError);
  CylinderSpec c;
  c.radius = 1.0;
  c.half_height = 0.01;
  EXPECT_THROW(rasterize_cylinder(c, 16), EmptyDomainError);
}

TEST(RasterizeCylinder, VolumeAndQuarterTurnSymmetry)
{
  CylinderSpec c;
  const VoxelDomain d = rasterize_cylinder(c, 32);
  EXPECT_NEAR(d.volume() / (2.0 * oracle::pi), 1.0, 0.03);
  const auto &g = d.grid();
  ASSERT_EQ(g.dims[0], g.dims[1]);
  for (const Index3 &cell : d.cells())
  {
    // (i, j) -> (n - 1 - j, i) is the quarter turn about the z axis through the center.
    const Index3 turned{g.dims[1] - 1 - cell[1], cell[0], cell[2]};
    EXPECT_TRUE(d.occupied(turned));
  }
}

TEST(Divergence, LinearAndQuadraticPotentials)
{
  const VoxelDomain d = rasterize(SupportBody::ball(1.0), 16);
  const CellScalar lin = cell_function(d, [](const Vec3 &x) { return x.x() - 2 * x.y(); });
  const CellScalar quad = cell_function(d, [](const Vec3 &x) { return 0.5 * x.squaredNorm(); });
  const CellScalar dl = discrete_divergence(d, discrete_gradient(d, lin));
  const CellScalar dq = discrete_divergence(d, discrete_gradient(d, quad));
  int interior = 0;
  for (std::size_t c = 0; c < d.cell_count(); ++c)
  {
    if (interior_cell(d, static_cast<int>(c)))
    {
      ++interior;
      EXPECT_NEAR(dl[static_cast<Eigen::Index>(c)], 0.0, 1e-9);
      EXPECT_NEAR(dq[static_cast<Eigen::Index>(c)], 3.0, 1e-9);
    }
  }
  EXPECT_GT(interior, 100);
  EXPECT_EQ(discrete_divergence(d, FaceField::Zero(d.face_count())).norm(), 0.0);
}

TEST(Divergence, IntegrationByParts)
{
  std::mt19937_64 rng(11);
  for (const SupportBody &b : random_bodies(3, 5))
  {
    const VoxelDomain d = rasterize(b, 12);
    const CellScalar p = oracle::gaussian(d.cell_count(), rng);
    FaceField f = oracle::gaussian(d.face_count(), rng);
    for (int id : d.boundary_faces())
    {
      f[id] = 0.0;
    }
    const double lhs = discrete_gradient(d, p).dot(f);
    const double rhs = p.dot(discrete_divergence(d, f));
    EXPECT_NEAR((lhs + rhs) / (p.norm() * f.norm()), 0.0, 1e-12);
  }
}

TEST(LerayProjector, FixedPointsGradientsIdempotence)
{
  std::mt19937_64 rng(12);
  std::uint64_t potential_seed = 100;
  for (const SupportBody &b : random_bodies(5, 6))
  {
    const VoxelDomain d = rasterize(b, 10);
    const LerayProjector proj(d);
    for (int k = 0; k < 20; ++k)
    {
      const FaceField f = oracle::gaussian(d.face_count(), rng);
      ProjectionStats stats;
      const FaceField pf = proj.project(f, stats);
      EXPECT_LE((proj.project(pf) - pf).norm(), 1e-9 * f.norm());
      EXPECT_LE(discrete_divergence(d, pf).cwiseAbs().maxCoeff(), 1e-9 * f.norm());
      for (int id : d.boundary_faces())
      {
        EXPECT_EQ(pf[id], 0.0);
      }
      EXPECT_NEAR((f - pf).dot(pf), 0.0, 1e-9 * f.squaredNorm());

      const FaceField g = discrete_gradient(d, oracle::gaussian(d.cell_count(), rng));
      EXPECT_LE(proj.project(g).norm(), 1e-9 * g.norm());

      const FaceField w = oracle::divergence_free_field(d, ++potential_seed);
      ASSERT_GT(w.norm(), 0.0);
      ASSERT_LE(discrete_divergence(d, w).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LE((proj.project(w) - w).norm(), 1e-9 * w.norm());
    }
  }
}

TEST(Transfers, InterpolationRestrictionAdjointAndExactness)
{
  const VoxelDomain d = rasterize(SupportBody::ball(1.0), 12);
  std::mt19937_64 rng(13);
  FaceField f = oracle::gaussian(d.face_count(), rng);
  for (int id : d.boundary_faces())
  {
    f[id] = 0.0;
  }
  CellField u(3, static_cast<Eigen::Index>(d.cell_count()));
  for (Eigen::Index c = 0; c < u.cols(); ++c)
  {
    u.col(c) = oracle::gaussian(3, rng);
  }
  EXPECT_NEAR(restrict_to_faces(d, u).dot(f), (u.array() * interpolate_to_cells(d, f).array()).sum(),
              1e-10);

  // Linear field a + B x sampled at face centroids interpolates exactly at interior cells.
  const Vec3 a(0.1, -0.2, 0.3);
  Mat3 B;
  B << 1, 2, 0, -1, 0.5, 0.3, 0.2, 0, -1.5;
  FaceField lin(static_cast<Eigen::Index>(d.face_count()));
  for (std::size_t id = 0; id < d.face_count(); ++id)
  {
    const Vec3 x = d.face_centroid(static_cast<int>(id));
    lin[static_cast<Eigen::Index>(id)] = (a + B * x)[d.faces()[id].axis];
  }
  const CellField ui = interpolate_to_cells(d, lin);
  for (std::size_t c = 0; c < d.cell_count(); ++c)
  {
    const Vec3 x = d.cell_center(static_cast<int>(c));
    EXPECT_NEAR((Vec3(ui.col(static_cast<Eigen::Index>(c))) - (a + B * x)).norm(), 0.0, 1e-12);
  }
  EXPECT_EQ(interpolate_to_cells(d, FaceField::Zero(d.face_count())).norm(), 0.0);
}

TEST(BoundaryTrace, PositionFieldConvergesToOne)
{
  double previous = 1e300;
  for (int res : {16, 32})
  {
    const VoxelDomain d = rasterize(SupportBody::ball(1.0), res);
    CellField x(3, static_cast<Eigen::Index>(d.cell_count()));
    for (std::size_t c = 0; c < d.cell_count(); ++c)
    {
      x.col(static_cast<Eigen::Index>(c)) = d.cell_center(static_cast<int>(c));
    }
    const Eigen::VectorXd tr = boundary_trace_sq(d, x);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < tr.size(); ++i)
    {
      const Vec3 fc = d.face_centroid(d.boundary_faces()[i]);
      worst = std::max(worst, std::abs(tr[i] - fc.squaredNorm()));
      EXPECT_NEAR(tr[i], 1.0, 3.0 * d.spacing());
    }
    EXPECT_LE(worst, 2.0 * d.spacing());
    EXPECT_LT(worst, previous);
    previous = worst;
  }
  const VoxelDomain d = rasterize(SupportBody::ball(1.0), 8);
  CellField ones = CellField::Zero(3, static_cast<Eigen::Index>(d.cell_count()));
  ones.row(1).setConstant(2.0);
  const Eigen::VectorXd tr = boundary_trace_sq(d, ones);
  EXPECT_EQ(tr.minCoeff(), 4.0);
  EXPECT_EQ(tr.maxCoeff(), 4.0);
}

TEST(Bfld, RoundTrip)
{
  const VoxelDomain d = rasterize(SupportBody::ball(1.0), 8);
  std::mt19937_64 rng(14);
  CellField u(3, static_cast<Eigen::Index>(d.cell_count()));
  for (Eigen::Index c = 0; c < u.cols(); ++c)
  {
    u.col(c) = oracle::gaussian(3, rng);
  }
  std::stringstream ss;
  write_bfld(ss, d, u);
  EXPECT_EQ(ss.str().substr(0, 4), "BFLD");
  const BfldData data = read_bfld(ss);
  EXPECT_EQ(data.grid.dims, d.grid().dims);
  EXPECT_EQ(data.grid.spacing, d.grid().spacing);
  ASSERT_EQ(data.values.size(), d.grid().cell_count());
  std::size_t nan_count = 0;
  for (const Vec3 &v : data.values)
  {
    nan_count += std::isnan(v.x()) ? 1 : 0;
  }
  EXPECT_EQ(nan_count, d.grid().cell_count() - d.cell_count());
  for (std::size_t c = 0; c < d.cell_count(); ++c)
  {
    const Index3 &i = d.cells()[c];
    EXPECT_EQ(data.values[d.grid().linear(i[0], i[1], i[2])], Vec3(u.col(static_cast<Eigen::Index>(c))));
  }
}
