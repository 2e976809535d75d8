// SPDX-License-Identifier: Apache-2.0

#ifndef BELTRAMI_DOMAIN_GRID_HPP
#define BELTRAMI_DOMAIN_GRID_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "beltrami/common.hpp"
#include "beltrami/convex_body.hpp"
#include "beltrami/grid_spec.hpp"

namespace beltrami
{

// Normal components on the active faces of a VoxelDomain, indexed by face id.
using FaceField = Eigen::VectorXd;
// One scalar per occupied cell, indexed by cell id.
using CellScalar = Eigen::VectorXd;
// One vector per occupied cell (column = cell id).
using CellField = Eigen::Matrix3Xd;

// Staggered (MAC) discretization of a voxelized domain. Unknowns live on faces touching
// at least one occupied cell; a face is a boundary face when exactly one side is
// occupied. Cell ids follow the lattice's x-fastest order.
class VoxelDomain
{
public:
  struct Face
  {
    int axis = 0;
    Index3 pos{0, 0, 0};  // lattice index: the face lies at coordinate pos[axis] * h
    int minus = -1;       // occupied cell on the low side, or -1
    int plus = -1;        // occupied cell on the high side, or -1
    bool boundary() const { return minus < 0 || plus < 0; }
  };

  VoxelDomain() = default;
  // Builds the face structure for the given occupancy (one flag per lattice cell).
  // If keep_largest_component is set, only the largest 6-connected component survives.
  VoxelDomain(const GridSpec &grid, const std::vector<char> &occupancy,
              bool keep_largest_component = true);

  const GridSpec &grid() const { return grid_; }
  double spacing() const { return grid_.spacing; }
  std::size_t cell_count() const { return cells_.size(); }
  std::size_t face_count() const { return faces_.size(); }
  const std::vector<Index3> &cells() const { return cells_; }
  const std::vector<Face> &faces() const { return faces_; }
  const std::vector<int> &boundary_faces() const { return boundary_faces_; }

  // Face ids of a cell: [2*axis] is the low face, [2*axis+1] the high face.
  const std::array<int, 6> &cell_faces(int cell) const { return cell_faces_[cell]; }
  // Cell id at a lattice index, -1 if unoccupied or outside the lattice.
  int cell_at(const Index3 &idx) const;
  // Face id at (axis, lattice position), -1 if not active.
  int face_at(int axis, const Index3 &pos) const;
  bool occupied(const Index3 &idx) const { return cell_at(idx) >= 0; }

  Vec3 cell_center(int cell) const;
  Vec3 face_centroid(int face) const;
  double volume() const { return static_cast<double>(cell_count()) * grid_.cell_volume(); }

private:
  GridSpec grid_;
  std::vector<int> cell_id_;
  std::vector<Index3> cells_;
  std::vector<Face> faces_;
  std::array<std::vector<int>, 3> face_id_;
  std::vector<std::array<int, 6>> cell_faces_;
  std::vector<int> boundary_faces_;
};

// Cells whose centers satisfy every support inequality of the body; largest component.
VoxelDomain rasterize(const SupportBody &body, int resolution,
                      const SphereQuadrature &quad = default_quadrature());
VoxelDomain rasterize(const SupportBody &body, const GridSpec &grid,
                      const SphereQuadrature &quad = default_quadrature());
VoxelDomain rasterize_cylinder(const CylinderSpec &cylinder, int resolution);
VoxelDomain rasterize_cylinder(const CylinderSpec &cylinder, const GridSpec &grid);
// Every cell of the grid covering [lo, hi] at the given resolution.
VoxelDomain box_domain(const Vec3 &lo, const Vec3 &hi, int resolution);

// Flux difference per cell divided by the spacing, boundary faces included.
CellScalar discrete_divergence(const VoxelDomain &domain, const FaceField &f);
// (p_plus - p_minus) / h on interior faces, zero on boundary faces.
FaceField discrete_gradient(const VoxelDomain &domain, const CellScalar &p);

struct ProjectionStats
{
  int iterations = 0;
  double residual = 0.0;
};

// L2-orthogonal projection of face fields onto {div f = 0, f = 0 on boundary faces}.
// Boundary faces are zeroed and the interior gradient part removed by solving the
// Neumann Poisson problem with MIC(0)-preconditioned conjugate gradients. The pressure
// gauge is fixed by pinning the first cell during the solve and shifting to zero mean.
class LerayProjector
{
public:
  explicit LerayProjector(const VoxelDomain &domain, double rel_tol = 1e-10);

  FaceField project(const FaceField &f) const;
  FaceField project(const FaceField &f, ProjectionStats &stats) const;
  // Zero-mean solution of div(grad p) = rhs over the interior-face Laplacian.
  CellScalar solve_poisson(const CellScalar &rhs, ProjectionStats &stats) const;

  const VoxelDomain &domain() const { return *domain_; }

private:
  void apply_laplacian(const Eigen::VectorXd &p, Eigen::VectorXd &out) const;
  void apply_preconditioner(const Eigen::VectorXd &r, Eigen::VectorXd &z) const;

  const VoxelDomain *domain_;
  double rel_tol_;
  std::vector<std::array<int, 6>> neighbors_;  // interior-face neighbors per cell, -1 if none
  Eigen::VectorXd diag_;
  Eigen::VectorXd precon_;
};

FaceField leray_project(const VoxelDomain &domain, const FaceField &f);

// Cell vector from the average of the two opposing face values per component.
CellField interpolate_to_cells(const VoxelDomain &domain, const FaceField &f);
// Adjoint of interpolate_to_cells on interior faces: average of the adjacent cells'
// normal components; zero on boundary faces.
FaceField restrict_to_faces(const VoxelDomain &domain, const CellField &u);

// |u|^2 at the occupied cell adjacent to each boundary face, in the order of
// domain.boundary_faces().
Eigen::VectorXd boundary_trace_sq(const VoxelDomain &domain, const CellField &u);

// BFLD v1 field dump (little-endian): "BFLD", u32 version, 3 x u32 dims, f64 spacing,
// 3 x f64 origin, then 3 x f64 per lattice cell in x-fastest order, NaN where unoccupied.
void write_bfld(std::ostream &os, const VoxelDomain &domain, const CellField &u);
void save_bfld(const std::string &path, const VoxelDomain &domain, const CellField &u);

struct BfldData
{
  GridSpec grid;
  std::vector<Vec3> values;  // one per lattice cell
};
BfldData read_bfld(std::istream &is);

}  // namespace beltrami

#endif  // BELTRAMI_DOMAIN_GRID_HPP
