// SPDX-License-Identifier: Apache-2.0

#include "beltrami/domain_grid.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>

#include "beltrami/io.hpp"

namespace beltrami
{

// --- VoxelDomain ----------------------------------------------------------------------

namespace
{

std::vector<char> largest_component(const GridSpec &grid, const std::vector<char> &occ)
{
  const std::size_t n = grid.cell_count();
  std::vector<int> label(n, -1);
  int best_label = -1;
  std::size_t best_size = 0;
  int next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < n; ++start)
  {
    if (!occ[start] || label[start] >= 0)
    {
      continue;
    }
    std::size_t size = 0;
    stack.assign(1, start);
    label[start] = next;
    while (!stack.empty())
    {
      const std::size_t c = stack.back();
      stack.pop_back();
      ++size;
      const int i = static_cast<int>(c % grid.dims[0]);
      const int j = static_cast<int>((c / grid.dims[0]) % grid.dims[1]);
      const int k = static_cast<int>(c / (static_cast<std::size_t>(grid.dims[0]) * grid.dims[1]));
      const Index3 here{i, j, k};
      for (int axis = 0; axis < 3; ++axis)
      {
        for (int s = -1; s <= 1; s += 2)
        {
          Index3 nb = here;
          nb[axis] += s;
          if (nb[axis] < 0 || nb[axis] >= grid.dims[axis])
          {
            continue;
          }
          const std::size_t li = grid.linear(nb[0], nb[1], nb[2]);
          if (occ[li] && label[li] < 0)
          {
            label[li] = next;
            stack.push_back(li);
          }
        }
      }
    }
    if (size > best_size)
    {
      best_size = size;
      best_label = next;
    }
    ++next;
  }
  std::vector<char> out(n, 0);
  for (std::size_t c = 0; c < n; ++c)
  {
    out[c] = (label[c] == best_label && best_label >= 0) ? 1 : 0;
  }
  return out;
}

}  // namespace

VoxelDomain::VoxelDomain(const GridSpec &grid, const std::vector<char> &occupancy,
                         bool keep_largest_component)
  : grid_(grid)
{
  if (occupancy.size() != grid.cell_count())
  {
    throw DomainError("occupancy does not match the grid");
  }
  const std::vector<char> occ =
      keep_largest_component ? largest_component(grid, occupancy) : occupancy;

  cell_id_.assign(grid.cell_count(), -1);
  for (int k = 0; k < grid.dims[2]; ++k)
  {
    for (int j = 0; j < grid.dims[1]; ++j)
    {
      for (int i = 0; i < grid.dims[0]; ++i)
      {
        const std::size_t li = grid.linear(i, j, k);
        if (occ[li])
        {
          cell_id_[li] = static_cast<int>(cells_.size());
          cells_.push_back({i, j, k});
        }
      }
    }
  }
  if (cells_.empty())
  {
    throw EmptyDomainError("rasterization produced no occupied cell");
  }

  cell_faces_.assign(cells_.size(), {-1, -1, -1, -1, -1, -1});
  for (int axis = 0; axis < 3; ++axis)
  {
    Index3 fd = grid.dims;
    fd[axis] += 1;
    face_id_[axis].assign(static_cast<std::size_t>(fd[0]) * fd[1] * fd[2], -1);
    for (int k = 0; k < fd[2]; ++k)
    {
      for (int j = 0; j < fd[1]; ++j)
      {
        for (int i = 0; i < fd[0]; ++i)
        {
          const Index3 pos{i, j, k};
          Index3 lo = pos;
          lo[axis] -= 1;
          const int minus = cell_at(lo);
          const int plus = cell_at(pos);
          if (minus < 0 && plus < 0)
          {
            continue;
          }
          const int id = static_cast<int>(faces_.size());
          faces_.push_back({axis, pos, minus, plus});
          face_id_[axis][static_cast<std::size_t>(i) + static_cast<std::size_t>(fd[0]) *
                                                           (j + static_cast<std::size_t>(fd[1]) * k)] = id;
          if (minus >= 0)
          {
            cell_faces_[minus][2 * axis + 1] = id;
          }
          if (plus >= 0)
          {
            cell_faces_[plus][2 * axis] = id;
          }
          if (minus < 0 || plus < 0)
          {
            boundary_faces_.push_back(id);
          }
        }
      }
    }
  }
}

int VoxelDomain::cell_at(const Index3 &idx) const
{
  for (int axis = 0; axis < 3; ++axis)
  {
    if (idx[axis] < 0 || idx[axis] >= grid_.dims[axis])
    {
      return -1;
    }
  }
  return cell_id_[grid_.linear(idx[0], idx[1], idx[2])];
}

int VoxelDomain::face_at(int axis, const Index3 &pos) const
{
  Index3 fd = grid_.dims;
  fd[axis] += 1;
  for (int a = 0; a < 3; ++a)
  {
    if (pos[a] < 0 || pos[a] >= fd[a])
    {
      return -1;
    }
  }
  return face_id_[axis][static_cast<std::size_t>(pos[0]) +
                        static_cast<std::size_t>(fd[0]) * (pos[1] + static_cast<std::size_t>(fd[1]) * pos[2])];
}

Vec3 VoxelDomain::cell_center(int cell) const
{
  const Index3 &c = cells_[cell];
  return grid_.cell_center(c[0], c[1], c[2]);
}

Vec3 VoxelDomain::face_centroid(int face) const
{
  const Face &f = faces_[face];
  Vec3 p(f.pos[0] + 0.5, f.pos[1] + 0.5, f.pos[2] + 0.5);
  p[f.axis] -= 0.5;
  return grid_.origin + grid_.spacing * p;
}

// --- rasterization --------------------------------------------------------------------

namespace
{

template <typename Inside>
VoxelDomain rasterize_with(const GridSpec &grid, Inside inside)
{
  std::vector<char> occ(grid.cell_count(), 0);
  parallel_for(static_cast<std::size_t>(grid.dims[2]),
               [&](std::size_t kb, std::size_t ke)
               {
                 for (std::size_t k = kb; k < ke; ++k)
                 {
                   for (int j = 0; j < grid.dims[1]; ++j)
                   {
                     for (int i = 0; i < grid.dims[0]; ++i)
                     {
                       occ[grid.linear(i, j, static_cast<int>(k))] =
                           inside(grid.cell_center(i, j, static_cast<int>(k))) ? 1 : 0;
                     }
                   }
                 }
               });
  return VoxelDomain(grid, occ, true);
}

GridSpec cylinder_grid(const CylinderSpec &cyl, int resolution)
{
  Vec3 half;
  for (int axis = 0; axis < 3; ++axis)
  {
    const double a = std::abs(cyl.axis[axis]);
    half[axis] = cyl.half_height * a + cyl.radius * std::sqrt(std::max(0.0, 1.0 - a * a));
  }
  return make_grid(cyl.center - half, cyl.center + half, resolution);
}

void check_cylinder(const CylinderSpec &cyl)
{
  if (!(cyl.radius > 0.0 && cyl.half_height > 0.0))
  {
    throw DomainError("cylinder radius and half-height must be positive");
  }
  if (std::abs(cyl.axis.norm() - 1.0) > 1e-12)
  {
    throw DomainError("cylinder axis must be a unit vector");
  }
}

}  // namespace

VoxelDomain rasterize(const SupportBody &body, int resolution, const SphereQuadrature &quad)
{
  if (resolution < 8)
  {
    throw DomainError("rasterize resolution must be at least 8");
  }
  return rasterize(body, body_grid(body, resolution), quad);
}

VoxelDomain rasterize(const SupportBody &body, const GridSpec &grid, const SphereQuadrature &quad)
{
  const SupportPolytope poly(body, quad);
  return rasterize_with(grid, [&poly](const Vec3 &x) { return poly.contains(x); });
}

VoxelDomain rasterize_cylinder(const CylinderSpec &cylinder, int resolution)
{
  check_cylinder(cylinder);
  if (resolution < 8)
  {
    throw DomainError("rasterize resolution must be at least 8");
  }
  return rasterize_cylinder(cylinder, cylinder_grid(cylinder, resolution));
}

VoxelDomain rasterize_cylinder(const CylinderSpec &cylinder, const GridSpec &grid)
{
  check_cylinder(cylinder);
  return rasterize_with(grid,
                        [&cylinder](const Vec3 &x)
                        {
                          const Vec3 d = x - cylinder.center;
                          const double along = d.dot(cylinder.axis);
                          const Vec3 radial = d - along * cylinder.axis;
                          return std::abs(along) < cylinder.half_height &&
                                 radial.squaredNorm() < cylinder.radius * cylinder.radius;
                        });
}

VoxelDomain box_domain(const Vec3 &lo, const Vec3 &hi, int resolution)
{
  const GridSpec grid = make_grid(lo, hi, resolution);
  return rasterize_with(grid,
                        [&lo, &hi](const Vec3 &x)
                        {
                          return (x.array() > lo.array()).all() && (x.array() < hi.array()).all();
                        });
}

// --- difference operators -------------------------------------------------------------

CellScalar discrete_divergence(const VoxelDomain &domain, const FaceField &f)
{
  const double inv_h = 1.0 / domain.spacing();
  CellScalar div(domain.cell_count());
  for (std::size_t c = 0; c < domain.cell_count(); ++c)
  {
    const auto &cf = domain.cell_faces(static_cast<int>(c));
    double s = 0.0;
    for (int axis = 0; axis < 3; ++axis)
    {
      s += f[cf[2 * axis + 1]] - f[cf[2 * axis]];
    }
    div[c] = s * inv_h;
  }
  return div;
}

FaceField discrete_gradient(const VoxelDomain &domain, const CellScalar &p)
{
  const double inv_h = 1.0 / domain.spacing();
  FaceField g = FaceField::Zero(domain.face_count());
  const auto &faces = domain.faces();
  for (std::size_t id = 0; id < faces.size(); ++id)
  {
    const auto &face = faces[id];
    if (!face.boundary())
    {
      g[id] = (p[face.plus] - p[face.minus]) * inv_h;
    }
  }
  return g;
}

// --- Leray projection -----------------------------------------------------------------

namespace
{

constexpr double kMicTau = 0.97;
constexpr double kMicSigma = 0.25;
constexpr int kPinnedCell = 0;

}  // namespace

LerayProjector::LerayProjector(const VoxelDomain &domain, double rel_tol)
  : domain_(&domain), rel_tol_(rel_tol)
{
  const std::size_t n = domain.cell_count();
  neighbors_.assign(n, {-1, -1, -1, -1, -1, -1});
  diag_ = Eigen::VectorXd::Zero(n);
  const auto &faces = domain.faces();
  for (std::size_t c = 0; c < n; ++c)
  {
    const auto &cf = domain.cell_faces(static_cast<int>(c));
    for (int slot = 0; slot < 6; ++slot)
    {
      const auto &face = faces[cf[slot]];
      if (face.boundary())
      {
        continue;
      }
      diag_[c] += 1.0;
      const int other = (slot % 2 == 0) ? face.minus : face.plus;
      if (other != kPinnedCell && static_cast<int>(c) != kPinnedCell)
      {
        neighbors_[c][slot] = other;
      }
    }
  }

  // MIC(0) factor of the pinned system (off-diagonals are -1 on interior faces).
  precon_ = Eigen::VectorXd::Zero(n);
  auto plus_link = [this](int cell, int axis) { return neighbors_[cell][2 * axis + 1] >= 0 ? -1.0 : 0.0; };
  for (std::size_t c = 0; c < n; ++c)
  {
    if (static_cast<int>(c) == kPinnedCell)
    {
      continue;
    }
    double e = diag_[c];
    for (int axis = 0; axis < 3; ++axis)
    {
      const int m = neighbors_[c][2 * axis];
      if (m < 0)
      {
        continue;
      }
      const double a = plus_link(m, axis);
      e -= (a * precon_[m]) * (a * precon_[m]);
      double others = 0.0;
      for (int b = 0; b < 3; ++b)
      {
        if (b != axis)
        {
          others += plus_link(m, b);
        }
      }
      e -= kMicTau * a * others * precon_[m] * precon_[m];
    }
    if (e < kMicSigma * diag_[c])
    {
      e = diag_[c];
    }
    precon_[c] = 1.0 / std::sqrt(e);
  }
}

void LerayProjector::apply_laplacian(const Eigen::VectorXd &p, Eigen::VectorXd &out) const
{
  // Negative Laplacian times h^2, restricted to the unpinned cells.
  const std::size_t n = domain_->cell_count();
  out.resize(n);
  for (std::size_t c = 0; c < n; ++c)
  {
    if (static_cast<int>(c) == kPinnedCell)
    {
      out[c] = 0.0;
      continue;
    }
    double s = diag_[c] * p[c];
    for (int slot = 0; slot < 6; ++slot)
    {
      const int nb = neighbors_[c][slot];
      if (nb >= 0)
      {
        s -= p[nb];
      }
    }
    out[c] = s;
  }
}

void LerayProjector::apply_preconditioner(const Eigen::VectorXd &r, Eigen::VectorXd &z) const
{
  const std::size_t n = domain_->cell_count();
  Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
  for (std::size_t c = 0; c < n; ++c)
  {
    if (static_cast<int>(c) == kPinnedCell)
    {
      continue;
    }
    double t = r[c];
    for (int axis = 0; axis < 3; ++axis)
    {
      const int m = neighbors_[c][2 * axis];
      if (m >= 0)
      {
        t += precon_[m] * q[m];  // A(m, c) = -1
      }
    }
    q[c] = t * precon_[c];
  }
  z = Eigen::VectorXd::Zero(n);
  for (std::size_t cc = n; cc-- > 0;)
  {
    if (static_cast<int>(cc) == kPinnedCell)
    {
      continue;
    }
    double t = q[cc];
    for (int axis = 0; axis < 3; ++axis)
    {
      const int p = neighbors_[cc][2 * axis + 1];
      if (p >= 0)
      {
        t += precon_[cc] * z[p];
      }
    }
    z[cc] = t * precon_[cc];
  }
}

CellScalar LerayProjector::solve_poisson(const CellScalar &rhs, ProjectionStats &stats) const
{
  // div(grad p) = rhs  <=>  A p = -h^2 rhs with A the pinned negative Laplacian (times h^2).
  const std::size_t n = domain_->cell_count();
  const double h = domain_->spacing();
  Eigen::VectorXd b = -h * h * rhs;
  b[kPinnedCell] = 0.0;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  stats = {};
  const double bnorm = b.norm();
  if (bnorm == 0.0 || n == 1)
  {
    return CellScalar::Zero(n);
  }
  Eigen::VectorXd r = b, z, p, ap;
  apply_preconditioner(r, z);
  p = z;
  double rz = r.dot(z);
  const int max_it = static_cast<int>(10 * n);
  double rel = 1.0;
  for (int it = 0; it < max_it; ++it)
  {
    apply_laplacian(p, ap);
    const double alpha = rz / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    rel = r.norm() / bnorm;
    stats.iterations = it + 1;
    if (rel <= rel_tol_)
    {
      break;
    }
    apply_preconditioner(r, z);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  stats.residual = rel;
  if (rel > rel_tol_)
  {
    std::ostringstream msg;
    msg << "Poisson solve did not converge: relative residual " << rel << " after "
        << stats.iterations << " iterations";
    throw ConvergenceError(msg.str(), rel);
  }
  x.array() -= x.mean();
  return x;
}

FaceField LerayProjector::project(const FaceField &f) const
{
  ProjectionStats stats;
  return project(f, stats);
}

FaceField LerayProjector::project(const FaceField &f, ProjectionStats &stats) const
{
  FaceField g = f;
  for (int id : domain_->boundary_faces())
  {
    g[id] = 0.0;
  }
  const CellScalar p = solve_poisson(discrete_divergence(*domain_, g), stats);
  g -= discrete_gradient(*domain_, p);
  return g;
}

FaceField leray_project(const VoxelDomain &domain, const FaceField &f)
{
  return LerayProjector(domain).project(f);
}

// --- face/cell transfer ---------------------------------------------------------------

CellField interpolate_to_cells(const VoxelDomain &domain, const FaceField &f)
{
  CellField u(3, domain.cell_count());
  for (std::size_t c = 0; c < domain.cell_count(); ++c)
  {
    const auto &cf = domain.cell_faces(static_cast<int>(c));
    for (int axis = 0; axis < 3; ++axis)
    {
      u(axis, c) = 0.5 * (f[cf[2 * axis]] + f[cf[2 * axis + 1]]);
    }
  }
  return u;
}

FaceField restrict_to_faces(const VoxelDomain &domain, const CellField &u)
{
  FaceField f = FaceField::Zero(domain.face_count());
  const auto &faces = domain.faces();
  for (std::size_t id = 0; id < faces.size(); ++id)
  {
    const auto &face = faces[id];
    if (!face.boundary())
    {
      f[id] = 0.5 * (u(face.axis, face.minus) + u(face.axis, face.plus));
    }
  }
  return f;
}

Eigen::VectorXd boundary_trace_sq(const VoxelDomain &domain, const CellField &u)
{
  const auto &bf = domain.boundary_faces();
  Eigen::VectorXd out(bf.size());
  for (std::size_t i = 0; i < bf.size(); ++i)
  {
    const auto &face = domain.faces()[bf[i]];
    const int cell = face.minus >= 0 ? face.minus : face.plus;
    out[i] = u.col(cell).squaredNorm();
  }
  return out;
}

// --- BFLD -----------------------------------------------------------------------------

namespace
{

template <typename T>
void put_le(std::ostream &os, T value)
{
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
  {
    std::reverse(bytes, bytes + sizeof(T));
  }
  os.write(reinterpret_cast<const char *>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream &is)
{
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char *>(bytes), sizeof(T)))
  {
    throw DomainError("truncated BFLD stream");
  }
  if constexpr (std::endian::native == std::endian::big)
  {
    std::reverse(bytes, bytes + sizeof(T));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_bfld(std::ostream &os, const VoxelDomain &domain, const CellField &u)
{
  const GridSpec &g = domain.grid();
  os.write("BFLD", 4);
  put_le<std::uint32_t>(os, 1);
  for (int axis = 0; axis < 3; ++axis)
  {
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.dims[axis]));
  }
  put_le<double>(os, g.spacing);
  for (int axis = 0; axis < 3; ++axis)
  {
    put_le<double>(os, g.origin[axis]);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0; k < g.dims[2]; ++k)
  {
    for (int j = 0; j < g.dims[1]; ++j)
    {
      for (int i = 0; i < g.dims[0]; ++i)
      {
        const int c = domain.cell_at({i, j, k});
        for (int axis = 0; axis < 3; ++axis)
        {
          put_le<double>(os, c >= 0 ? u(axis, c) : nan);
        }
      }
    }
  }
}

void save_bfld(const std::string &path, const VoxelDomain &domain, const CellField &u)
{
  std::ostringstream os(std::ios::binary);
  write_bfld(os, domain, u);
  write_file_atomic(path, os.str());
}

BfldData read_bfld(std::istream &is)
{
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "BFLD", 4) != 0)
  {
    throw DomainError("not a BFLD stream");
  }
  if (get_le<std::uint32_t>(is) != 1)
  {
    throw DomainError("unsupported BFLD version");
  }
  BfldData d;
  for (int axis = 0; axis < 3; ++axis)
  {
    d.grid.dims[axis] = static_cast<int>(get_le<std::uint32_t>(is));
  }
  d.grid.spacing = get_le<double>(is);
  for (int axis = 0; axis < 3; ++axis)
  {
    d.grid.origin[axis] = get_le<double>(is);
  }
  d.values.resize(d.grid.cell_count());
  for (auto &v : d.values)
  {
    for (int axis = 0; axis < 3; ++axis)
    {
      v[axis] = get_le<double>(is);
    }
  }
  return d;
}

}  // namespace beltrami
