// SPDX-License-Identifier: Apache-2.0

#include "beltrami/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "beltrami/common.hpp"

namespace beltrami
{

bool magnitude_order(double a, double b)
{
  const double aa = std::abs(a), ab = std::abs(b);
  if (aa != ab)
  {
    return aa > ab;
  }
  return a > b;
}

namespace
{

Eigen::MatrixXd random_block(std::size_t n, int cols, std::mt19937_64 &rng)
{
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd X(n, cols);
  for (int j = 0; j < cols; ++j)
  {
    for (std::size_t i = 0; i < n; ++i)
    {
      X(static_cast<Eigen::Index>(i), j) = normal(rng);
    }
  }
  return X;
}

// Orthonormalizes W against the first m columns of V (two Gram-Schmidt passes) and
// within itself. Columns that collapse are replaced with fresh random directions.
Eigen::MatrixXd orthonormal_extension(const Eigen::MatrixXd &V, Eigen::Index m, Eigen::MatrixXd W,
                                      std::mt19937_64 &rng)
{
  const Eigen::Index n = W.rows();
  for (int attempt = 0; attempt < 4; ++attempt)
  {
    const Eigen::VectorXd before = W.colwise().norm();
    for (int pass = 0; pass < 2; ++pass)
    {
      if (m > 0)
      {
        W -= V.leftCols(m) * (V.leftCols(m).transpose() * W);
      }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(W);
    const Eigen::MatrixXd R = qr.matrixQR().topRows(W.cols()).triangularView<Eigen::Upper>();
    bool deficient = false;
    for (Eigen::Index j = 0; j < W.cols(); ++j)
    {
      if (std::abs(R(j, j)) <= 1e-10 * std::max(before[j], 1e-300))
      {
        deficient = true;
        W.col(j) = random_block(static_cast<std::size_t>(n), 1, rng);
      }
    }
    if (!deficient)
    {
      Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, W.cols());
      // Second pass against V guards against loss of orthogonality in the QR step.
      if (m > 0)
      {
        Q -= V.leftCols(m) * (V.leftCols(m).transpose() * Q);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr2(Q);
        Q = qr2.householderQ() * Eigen::MatrixXd::Identity(n, W.cols());
      }
      return Q;
    }
  }
  throw std::runtime_error("could not extend Krylov basis");
}

}  // namespace

EigsResult extreme_eigs(const LinearOperator &op, const EigsOptions &options)
{
  if (options.nev < 1)
  {
    throw DomainError("nev must be at least 1");
  }
  const auto n = static_cast<Eigen::Index>(op.dim);
  if (n < 1)
  {
    throw DomainError("operator has no degrees of freedom");
  }
  const int nev = static_cast<int>(std::min<Eigen::Index>(options.nev, n));
  const int block = static_cast<int>(std::min<Eigen::Index>(std::max(4, options.block_size), n));
  const Eigen::Index max_basis = std::min<Eigen::Index>(
      n, std::max<Eigen::Index>(options.max_basis, nev + 3 * block));
  const Eigen::Index keep = std::min<Eigen::Index>(max_basis - block, nev + 2 * block);

  std::mt19937_64 rng(options.seed);
  Eigen::MatrixXd V(n, max_basis), AV(n, max_basis);
  Eigen::Index m = 0;
  Eigen::MatrixXd next = orthonormal_extension(V, 0, random_block(op.dim, block, rng), rng);

  EigsResult result;
  Eigen::VectorXd x(n), y(n);
  while (true)
  {
    const Eigen::Index b = next.cols();
    V.middleCols(m, b) = next;
    for (Eigen::Index j = 0; j < b; ++j)
    {
      x = next.col(j);
      op.apply(x, y);
      AV.col(m + j) = y;
      ++result.applies;
    }
    m += b;

    // Rayleigh-Ritz on span(V).
    Eigen::MatrixXd T = V.leftCols(m).transpose() * AV.leftCols(m);
    T = 0.5 * (T + T.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    std::vector<Eigen::Index> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index c)
                     { return magnitude_order(es.eigenvalues()[a], es.eigenvalues()[c]); });

    const int wanted = static_cast<int>(std::min<Eigen::Index>(nev, m));
    Eigen::MatrixXd Yw(m, wanted);
    Eigen::VectorXd theta(wanted);
    for (int i = 0; i < wanted; ++i)
    {
      Yw.col(i) = es.eigenvectors().col(order[i]);
      theta[i] = es.eigenvalues()[order[i]];
    }
    Eigen::MatrixXd X = V.leftCols(m) * Yw;
    Eigen::MatrixXd R = AV.leftCols(m) * Yw - X * theta.asDiagonal();
    double worst = 0.0;
    std::vector<double> rel(wanted);
    for (int i = 0; i < wanted; ++i)
    {
      const double scale = std::abs(theta[i]) > 0.0 ? std::abs(theta[i]) : 1.0;
      rel[i] = R.col(i).norm() / scale;
      worst = std::max(worst, rel[i]);
    }

    const bool done = (wanted == nev && worst <= options.tol) || m >= n;
    if (done || result.applies >= options.max_applies)
    {
      result.converged = worst <= options.tol;
      result.max_residual = worst;
      for (int i = 0; i < wanted; ++i)
      {
        EigenPair p;
        p.value = theta[i];
        p.vector = X.col(i).normalized();
        p.residual = rel[i];
        result.pairs.push_back(std::move(p));
      }
      return result;
    }

    if (m + block > max_basis)
    {
      // Thick restart: keep the leading Ritz vectors (and their images) and continue
      // from the residuals of the wanted ones.
      Eigen::MatrixXd Yk(m, keep);
      for (Eigen::Index i = 0; i < keep; ++i)
      {
        Yk.col(i) = es.eigenvectors().col(order[i]);
      }
      Eigen::MatrixXd Vk = V.leftCols(m) * Yk;
      Eigen::MatrixXd AVk = AV.leftCols(m) * Yk;
      V.leftCols(keep) = Vk;
      AV.leftCols(keep) = AVk;
      m = keep;
      ++result.restarts;
      Eigen::MatrixXd W(n, block);
      for (int j = 0; j < block; ++j)
      {
        W.col(j) = j < wanted ? R.col(j) : random_block(op.dim, 1, rng).col(0);
      }
      next = orthonormal_extension(V, m, std::move(W), rng);
    }
    else
    {
      next = orthonormal_extension(V, m, AV.middleCols(m - b, b), rng);
    }
  }
}

}  // namespace beltrami
