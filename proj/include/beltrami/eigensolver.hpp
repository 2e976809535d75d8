// SPDX-License-Identifier: Apache-2.0

#ifndef BELTRAMI_EIGENSOLVER_HPP
#define BELTRAMI_EIGENSOLVER_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

namespace beltrami
{

// Symmetric linear map on R^dim given by its action.
struct LinearOperator
{
  std::size_t dim = 0;
  std::function<void(const Eigen::VectorXd &, Eigen::VectorXd &)> apply;
};

struct EigsOptions
{
  int nev = 4;
  double tol = 1e-6;       // relative residual |A x - theta x| / |theta|, |x| = 1
  int max_applies = 6000;  // operator applications before giving up
  int block_size = 4;      // at least 4
  int max_basis = 96;      // Krylov basis size before a thick restart
  std::uint64_t seed = 0;
};

struct EigenPair
{
  double value = 0.0;
  Eigen::VectorXd vector;  // unit Euclidean norm
  double residual = 0.0;   // relative, as in EigsOptions::tol
};

struct EigsResult
{
  std::vector<EigenPair> pairs;  // |value| descending, ties positive first
  int applies = 0;
  int restarts = 0;
  bool converged = false;
  double max_residual = 0.0;
};

// Block Krylov iteration with Rayleigh-Ritz extraction and thick restarts for the `nev`
// eigenpairs of largest magnitude. Deterministic for a given seed. When the budget runs
// out the best Ritz pairs are returned with converged = false.
EigsResult extreme_eigs(const LinearOperator &op, const EigsOptions &options);

// Orders eigenvalues by magnitude, descending, positive first on ties.
bool magnitude_order(double a, double b);

}  // namespace beltrami

#endif  // BELTRAMI_EIGENSOLVER_HPP
