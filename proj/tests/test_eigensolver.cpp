// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include <Eigen/Eigenvalues>

#include "beltrami/eigensolver.hpp"

using namespace beltrami;

namespace
{

LinearOperator dense(const Eigen::MatrixXd &A)
{
  LinearOperator op;
  op.dim = static_cast<std::size_t>(A.rows());
  op.apply = [A](const Eigen::VectorXd &x, Eigen::VectorXd &y) { y = A * x; };
  return op;
}

}  // namespace

TEST(ExtremeEigs, MatchesDenseSolverOnRandomSymmetricMatrix)
{
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  const int dim = 300;
  Eigen::MatrixXd G(dim, dim);
  for (int i = 0; i < dim; ++i)
  {
    for (int j = 0; j < dim; ++j)
    {
      G(i, j) = n(rng);
    }
  }
  // Spectrum with a clear gap at the top: G G^T scaled, plus a few planted extremes.
  Eigen::MatrixXd A = 0.001 * (G + G.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es0(A);
  const Eigen::MatrixXd Q = es0.eigenvectors();
  Eigen::VectorXd lam = es0.eigenvalues();
  lam[0] = -3.0;
  lam[dim - 1] = 2.5;
  lam[dim - 2] = 2.0;
  lam[1] = -1.5;
  A = Q * lam.asDiagonal() * Q.transpose();

  EigsOptions opt;
  opt.nev = 4;
  opt.tol = 1e-9;
  opt.seed = 7;
  const EigsResult r = extreme_eigs(dense(A), opt);
  ASSERT_TRUE(r.converged);
  ASSERT_GE(r.pairs.size(), 4u);
  std::vector<double> want = {-3.0, 2.5, 2.0, -1.5};
  for (int i = 0; i < 4; ++i)
  {
    EXPECT_NEAR(r.pairs[i].value, want[i], 1e-8);
    EXPECT_NEAR(r.pairs[i].vector.norm(), 1.0, 1e-10);
    const Eigen::VectorXd res = A * r.pairs[i].vector - r.pairs[i].value * r.pairs[i].vector;
    EXPECT_LE(res.norm(), 1e-8 * std::abs(want[i]));
  }
}

TEST(ExtremeEigs, DeterministicForSeed)
{
  Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(200, -1.0, 1.0);
  const Eigen::MatrixXd A = d.asDiagonal();
  EigsOptions opt;
  opt.seed = 3;
  const EigsResult a = extreme_eigs(dense(A), opt);
  const EigsResult b = extreme_eigs(dense(A), opt);
  ASSERT_EQ(a.pairs.size(), b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i)
  {
    EXPECT_EQ(a.pairs[i].value, b.pairs[i].value);
    EXPECT_EQ(a.pairs[i].vector, b.pairs[i].vector);
  }
}

TEST(ExtremeEigs, DegenerateClusterIsResolved)
{
  Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(150, -0.5, 0.5);
  d[10] = 1.0;
  d[20] = 1.0;
  d[30] = 1.0;
  d[40] = -1.0;
  d[50] = -1.0;
  d[60] = -1.0;
  EigsOptions opt;
  opt.nev = 8;
  opt.block_size = 8;
  opt.tol = 1e-10;
  const EigsResult r = extreme_eigs(dense(d.asDiagonal()), opt);
  ASSERT_TRUE(r.converged);
  // +1 and -1 tie in magnitude, so their relative order is decided by rounding.
  int plus = 0, minus = 0;
  for (int i = 0; i < 6; ++i)
  {
    EXPECT_NEAR(std::abs(r.pairs[i].value), 1.0, 1e-10);
    (r.pairs[i].value > 0.0 ? plus : minus) += 1;
  }
  EXPECT_EQ(plus, 3);
  EXPECT_EQ(minus, 3);
}

TEST(ExtremeEigs, BudgetExhaustionIsReported)
{
  Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(400, 0.0, 1.0);
  EigsOptions opt;
  opt.tol = 1e-14;
  opt.max_applies = 8;
  const EigsResult r = extreme_eigs(dense(d.asDiagonal()), opt);
  EXPECT_FALSE(r.converged);
  EXPECT_FALSE(r.pairs.empty());
}

TEST(MagnitudeOrder, PositiveFirstOnTies)
{
  std::vector<double> v = {0.5, -2.0, 2.0, -0.1, 1.0};
  std::sort(v.begin(), v.end(), magnitude_order);
  EXPECT_EQ(v, (std::vector<double>{2.0, -2.0, 1.0, 0.5, -0.1}));
}
