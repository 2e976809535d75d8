// SPDX-License-Identifier: Apache-2.0

#ifndef BELTRAMI_SPECTRAL_HPP
#define BELTRAMI_SPECTRAL_HPP

#include <atomic>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "beltrami/domain_grid.hpp"
#include "beltrami/eigensolver.hpp"

namespace beltrami
{

// Midpoint-rule Biot-Savart sum over occupied cells,
//   BS(u)(x) = h^3/(4 pi) sum_{y != x} u(y) x (x - y) / |x - y|^3,
// evaluated as a zero-padded FFT convolution on the bounding box of the occupied cells.
// The self-cell term is zero.
class BiotSavartConvolver
{
public:
  explicit BiotSavartConvolver(const VoxelDomain &domain);
  ~BiotSavartConvolver();
  BiotSavartConvolver(const BiotSavartConvolver &) = delete;
  BiotSavartConvolver &operator=(const BiotSavartConvolver &) = delete;

  CellField apply(const CellField &u) const;

private:
  struct Plans;
  const VoxelDomain *domain_;
  Index3 lo_{0, 0, 0};
  Index3 extent_{0, 0, 0};
  Index3 padded_{0, 0, 0};
  std::unique_ptr<Plans> plans_;
};

// Same sum by direct O(N^2) evaluation; reference for the convolution path.
CellField biot_savart_direct(const VoxelDomain &domain, const CellField &u);
CellField biot_savart_apply(const VoxelDomain &domain, const CellField &u);

// pi o R o BS o I o pi on face fields: Leray projection, face-to-cell averaging, the
// Biot-Savart sum, cell-to-face averaging (zero on boundary faces), Leray projection.
// Symmetric in the Euclidean face inner product.
class ProjectedBiotSavart
{
public:
  explicit ProjectedBiotSavart(const VoxelDomain &domain, double poisson_tol = 1e-10);

  FaceField apply(const FaceField &w) const;
  const VoxelDomain &domain() const { return *domain_; }
  const LerayProjector &projector() const { return projector_; }
  const BiotSavartConvolver &convolver() const { return convolver_; }
  std::size_t apply_count() const { return applies_.load(); }
  LinearOperator as_operator() const;

  // Discrete L2 quantities on face fields (weight h^3 per face).
  double inner(const FaceField &a, const FaceField &b) const;
  double norm_sq(const FaceField &a) const { return inner(a, a); }

private:
  const VoxelDomain *domain_;
  LerayProjector projector_;
  BiotSavartConvolver convolver_;
  mutable std::atomic<std::size_t> applies_{0};
};

FaceField projected_bs_apply(const ProjectedBiotSavart &handle, const FaceField &w);

class NoPositiveEigenvalueError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct SpectralOptions
{
  std::uint64_t seed = 1;
  double tol = 1e-6;
  int max_applies = 6000;
};

struct SpectralResult
{
  double mu1 = 0.0;
  FaceField eigenfield;  // unit discrete L2 norm
  double lambda_max = 0.0;
  double residual = 0.0;  // |A u - u / mu1| / |u|
  int iterations = 0;     // operator applications
  bool converged = false;
  std::optional<double> mu_minus1;
  std::optional<FaceField> negative_field;
  std::vector<double> ritz_values;  // magnitude order
  double volume = 0.0;
};

// nev largest-magnitude eigenpairs of the projected operator.
std::vector<EigenPair> extreme_eigs(const ProjectedBiotSavart &handle, std::uint64_t seed,
                                    double tol, int maxit, int nev, bool *converged = nullptr);

// mu1 = 1 / (largest positive eigenvalue). Requests 4, 8, then 16 extreme pairs until a
// positive one is present; the most negative one supplies mu_{-1}.
SpectralResult first_positive_mu(const ProjectedBiotSavart &handle,
                                 const SpectralOptions &options = {});

// H(w) = <pi BS pi w, w> h^3.
double helicity(const ProjectedBiotSavart &handle, const FaceField &w);
// |w|^2 / H(w) when H(w) > 0.
std::optional<double> rayleigh_upper_bound(const ProjectedBiotSavart &handle, const FaceField &w);

// Plain-text key=value report.
void write_spectral_report(std::ostream &os, const SpectralResult &result,
                           const std::vector<std::pair<std::string, std::string>> &extra = {});

}  // namespace beltrami

#endif  // BELTRAMI_SPECTRAL_HPP
