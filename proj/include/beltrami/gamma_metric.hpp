// SPDX-License-Identifier: Apache-2.0

#ifndef BELTRAMI_GAMMA_METRIC_HPP
#define BELTRAMI_GAMMA_METRIC_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "beltrami/convex_body.hpp"
#include "beltrami/domain_grid.hpp"
#include "beltrami/spectral.hpp"

namespace beltrami
{

// Containing domain D. Subdomains are rasterized on D's lattice so their faces are a
// subset of D's faces.
class BoxDomain
{
public:
  BoxDomain(const Vec3 &lo, const Vec3 &hi, int resolution);
  explicit BoxDomain(VoxelDomain domain);

  const VoxelDomain &domain() const { return domain_; }
  const GridSpec &grid() const { return domain_.grid(); }

  VoxelDomain rasterize(const SupportBody &body) const;

private:
  VoxelDomain domain_;
};

// pi_Omega BS pi_Omega on a subdomain of the box, acting on box face fields: restriction,
// the subdomain's projected operator, extension by zero.
class SubdomainOperator
{
public:
  SubdomainOperator(const BoxDomain &box, VoxelDomain sub);

  FaceField apply(const FaceField &w_box) const;
  FaceField restrict(const FaceField &w_box) const;
  FaceField extend(const FaceField &w_sub) const;

  const VoxelDomain &domain() const { return *sub_; }
  const ProjectedBiotSavart &op() const { return *op_; }
  std::size_t box_face_count() const { return box_faces_; }

private:
  std::unique_ptr<VoxelDomain> sub_;
  std::unique_ptr<ProjectedBiotSavart> op_;
  std::vector<int> to_box_;  // box face id per subdomain face
  std::size_t box_faces_ = 0;
};

FaceField bs_tilde_apply(const BoxDomain &box, const SubdomainOperator &sub, const FaceField &w);

struct GammaEstimate
{
  double value = 0.0;
  std::string method;  // "power-iteration" or "random-sampling"
  int samples = 0;
  FaceField lower_witness;
  double residual = 0.0;         // of the extreme eigenpair, when method = power-iteration
  double sampling_lower = 0.0;   // max over the random unit fields
  bool converged = true;
  double spacing = 0.0;
};

// sup over unit w in K(D) of |~BS_1 w - ~BS_2 w|, from the extreme eigenvalue of the
// symmetric difference operator, with a random-sampling lower bound alongside.
GammaEstimate gamma_distance(const BoxDomain &box, const SubdomainOperator &a,
                             const SubdomainOperator &b, std::uint64_t seed, int nsamples = 20,
                             double tol = 1e-8);

struct LipschitzReport
{
  int k = 1;
  double sigma_a = 0.0;  // k-th largest |eigenvalue| of ~BS on each domain, i.e. 1/|mu_k|
  double sigma_b = 0.0;
  double gap = 0.0;
  double d_gamma = 0.0;
  double tolerance = 0.0;
  double slack = 0.0;  // d_gamma + tolerance - gap
  bool holds = false;
};

// k-th singular values of the two subdomain operators (magnitude order, positive first
// on ties) against an already computed d_gamma.
LipschitzReport lipschitz_check(const SubdomainOperator &a, const SubdomainOperator &b, int k,
                                const GammaEstimate &gamma, std::uint64_t seed,
                                double tol = 1e-8);

void write_gamma_report(std::ostream &os, const GammaEstimate &gamma,
                        const std::vector<LipschitzReport> &checks);

}  // namespace beltrami

#endif  // BELTRAMI_GAMMA_METRIC_HPP
