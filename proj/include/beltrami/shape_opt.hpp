// SPDX-License-Identifier: Apache-2.0

#ifndef BELTRAMI_SHAPE_OPT_HPP
#define BELTRAMI_SHAPE_OPT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "beltrami/convex_body.hpp"
#include "beltrami/domain_grid.hpp"
#include "beltrami/spectral.hpp"

namespace beltrami
{

struct ObjectiveValue
{
  double J = 0.0;  // V^(1/3) mu1
  double mu1 = 0.0;
  double V = 0.0;  // voxel volume of the rasterized domain
  SpectralResult result;
  VoxelDomain domain;
};

ObjectiveValue objective(const SupportBody &body, int resolution, std::uint64_t seed,
                         double tol = 1e-6);
// Same on a caller-supplied lattice, so that nearby bodies share one grid.
ObjectiveValue objective(const SupportBody &body, const GridSpec &grid, std::uint64_t seed,
                         double tol = 1e-6);

// Per boundary face (order of domain.boundary_faces()):
//   g = |u|^2 - |u|^2_L2 / (3 V),
// with u the cell-centered eigenfield. Moving the boundary with normal speed +g lowers J to
// first order: dJ = -(V^(1/3) mu1 / |u|^2) int g (v.N) dS.
Eigen::VectorXd shape_gradient(const VoxelDomain &domain, const SpectralResult &result);

// Continuum outer normal and surface weight of each boundary face. The normal is the
// direction of the most violated support inequality at the face centroid; the weight
// h^2 |N . e_axis| makes sum(weight * f) approximate int f dS on the smooth surface.
struct BoundaryGeometry
{
  std::vector<Vec3> normal;
  Eigen::VectorXd weight;
};
BoundaryGeometry boundary_geometry(const VoxelDomain &domain, const SupportBody &body,
                                   const SphereQuadrature &quad = default_quadrature());

// Moves the support function by step * g sampled at the boundary face nearest to each
// contact point, refits (zonal only for axisymmetric bodies), restores convexity and
// rescales to the input's support volume.
SupportBody step_body(const SupportBody &body, const VoxelDomain &domain,
                      const Eigen::VectorXd &g, double step,
                      double margin = kDefaultConvexityMargin,
                      const SphereQuadrature &quad = default_quadrature());

struct NoiseFloor
{
  double J = 0.0;
  double variance = 0.0;
  double min_trace = 0.0;
};

struct OptimalityDiagnostic
{
  double variance = 0.0;  // var(|u|^2) / mean(|u|^2)^2 over boundary faces
  double min_trace = 0.0;
  double mean_trace = 0.0;
  bool ph_flag = false;   // trace looks constant and nonvanishing
};

OptimalityDiagnostic diagnose_trace(const Eigen::VectorXd &trace, const NoiseFloor &noise);
OptimalityDiagnostic optimality_diagnostic(const VoxelDomain &domain,
                                           const SpectralResult &result,
                                           const NoiseFloor &noise);

// Differences of J, trace variance and minimum trace between `resolution` and
// `resolution + 8`.
NoiseFloor measure_noise_floor(const SupportBody &body, int resolution, std::uint64_t seed,
                               double tol = 1e-6);

struct OptConfig
{
  int lmax = 6;
  bool axisymmetric = false;
  int resolution = 24;
  double step = 0.05;  // largest boundary displacement as a fraction of the mean radius
  int max_iterations = 10;
  double margin = kDefaultConvexityMargin;
  std::uint64_t seed = 1;
  bool fallback = true;
  int max_halvings = 4;
  double tol = 1e-6;
  int snapshot_every = 0;  // 0 disables snapshots
  std::string snapshot_dir;
};

struct OptRecord
{
  int iter = 0;
  SupportBody body;  // iterate at the start of the iteration
  double V = 0.0;
  double mu1 = 0.0;
  double J = 0.0;
  double variance = 0.0;
  double min_trace = 0.0;
  double step = 0.0;  // last step tried
  bool accepted = false;
  bool fallback = false;
  bool converged = true;
};

struct OptTrajectory
{
  std::vector<OptRecord> records;
  SupportBody final_body;
  double final_J = 0.0;
  NoiseFloor noise;
  std::string stop_reason;
};

// Gradient descent with backtracking (the step halves until J strictly decreases) and an
// optional compass search over low-degree harmonics when backtracking fails. Steps are
// accepted only on strict decrease, so the recorded J is non-increasing.
OptTrajectory optimize(const OptConfig &config, const SupportBody &initial);

// iter,J,mu1,V,variance,min_trace,step,accepted with a '#' comment header.
void write_trajectory_csv(std::ostream &os, const OptTrajectory &trajectory,
                          const std::string &comment = {});

struct DirectionalCheck
{
  double finite_difference = 0.0;  // one-sided, Richardson-extrapolated
  double predicted = 0.0;          // boundary integral over the top eigenspace
  int multiplicity = 1;
  double t = 0.0;
};

// dJ/dt at t = 0+ for h -> h + t * dh. The prediction uses the largest generalized
// eigenvalue of the boundary form int (u_i . u_j) dh(N) dS over the top positive
// eigenspace, which reduces to the single-field formula when mu1 is simple.
DirectionalCheck check_directional_derivative(const SupportBody &body,
                                              const SupportBody &perturbation, int resolution,
                                              std::uint64_t seed, double t,
                                              double tol = 1e-7);

}  // namespace beltrami

#endif  // BELTRAMI_SHAPE_OPT_HPP
