// SPDX-License-Identifier: Apache-2.0

#include "beltrami/shape_opt.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "beltrami/io.hpp"
#include "beltrami/spherical_harmonics.hpp"

namespace beltrami
{

namespace
{

ObjectiveValue solve_on(VoxelDomain domain, std::uint64_t seed, double tol)
{
  ObjectiveValue out;
  out.domain = std::move(domain);
  const ProjectedBiotSavart handle(out.domain);
  SpectralOptions opt;
  opt.seed = seed;
  opt.tol = tol;
  out.result = first_positive_mu(handle, opt);
  out.mu1 = out.result.mu1;
  out.V = out.domain.volume();
  out.J = std::cbrt(out.V) * out.mu1;
  return out;
}

}  // namespace

ObjectiveValue objective(const SupportBody &body, int resolution, std::uint64_t seed, double tol)
{
  return solve_on(rasterize(body, resolution), seed, tol);
}

ObjectiveValue objective(const SupportBody &body, const GridSpec &grid, std::uint64_t seed,
                         double tol)
{
  return solve_on(rasterize(body, grid), seed, tol);
}

namespace
{

double cell_norm_sq(const VoxelDomain &domain, const CellField &u)
{
  return u.squaredNorm() * domain.grid().cell_volume();
}

int boundary_cell(const VoxelDomain &domain, int face_id)
{
  const auto &face = domain.faces()[face_id];
  return face.minus >= 0 ? face.minus : face.plus;
}

double mean_radius(const SupportBody &body)
{
  return body.coeffs()[0] / std::sqrt(4.0 * kPi);
}

}  // namespace

Eigen::VectorXd shape_gradient(const VoxelDomain &domain, const SpectralResult &result)
{
  const CellField u = interpolate_to_cells(domain, result.eigenfield);
  const Eigen::VectorXd trace = boundary_trace_sq(domain, u);
  const double shift = cell_norm_sq(domain, u) / (3.0 * domain.volume());
  return trace.array() - shift;
}

BoundaryGeometry boundary_geometry(const VoxelDomain &domain, const SupportBody &body,
                                   const SphereQuadrature &quad)
{
  const std::vector<double> hv = support_values(body, quad);
  const auto &bf = domain.boundary_faces();
  const double h = domain.spacing();
  BoundaryGeometry geo;
  geo.normal.resize(bf.size());
  geo.weight.resize(static_cast<Eigen::Index>(bf.size()));
  parallel_for(bf.size(),
               [&](std::size_t b, std::size_t e)
               {
                 for (std::size_t i = b; i < e; ++i)
                 {
                   const Vec3 x = domain.face_centroid(bf[i]);
                   std::size_t best = 0;
                   double best_gap = -std::numeric_limits<double>::infinity();
                   for (std::size_t q = 0; q < quad.size(); ++q)
                   {
                     const double gap = x.dot(quad.directions[q]) - hv[q];
                     if (gap > best_gap)
                     {
                       best_gap = gap;
                       best = q;
                     }
                   }
                   geo.normal[i] = quad.directions[best];
                   const int axis = domain.faces()[bf[i]].axis;
                   geo.weight[static_cast<Eigen::Index>(i)] =
                       h * h * std::abs(geo.normal[i][axis]);
                 }
               });
  return geo;
}

SupportBody step_body(const SupportBody &body, const VoxelDomain &domain,
                      const Eigen::VectorXd &g, double step, double margin,
                      const SphereQuadrature &quad)
{
  const auto &bf = domain.boundary_faces();
  if (static_cast<std::size_t>(g.size()) != bf.size())
  {
    throw DomainError("gradient does not match the boundary faces");
  }
  if (!g.allFinite())
  {
    throw DomainError("gradient has non-finite entries");
  }
  std::vector<Vec3> centroids(bf.size());
  for (std::size_t i = 0; i < bf.size(); ++i)
  {
    centroids[i] = domain.face_centroid(bf[i]);
  }
  std::vector<double> values = support_values(body, quad);
  parallel_for(quad.size(),
               [&](std::size_t b, std::size_t e)
               {
                 for (std::size_t q = b; q < e; ++q)
                 {
                   const Vec3 x = contact_point(body, quad.directions[q]);
                   std::size_t nearest = 0;
                   double best = std::numeric_limits<double>::infinity();
                   for (std::size_t i = 0; i < centroids.size(); ++i)
                   {
                     const double d = (centroids[i] - x).squaredNorm();
                     if (d < best)
                     {
                       best = d;
                       nearest = i;
                     }
                   }
                   values[q] += step * g[static_cast<Eigen::Index>(nearest)];
                 }
               });
  const double target = support_volume(body, quad);
  SupportBody moved = SupportBody::fit(values, body.lmax(), body.axisymmetric(), quad);
  moved = project_to_convex(moved, margin, quad);
  const double v = support_volume(moved, quad);
  if (!(v > 0.0))
  {
    throw DomainError("stepped body has no volume");
  }
  moved = moved.scaled(std::cbrt(target / v));
  return project_to_convex(moved, margin, quad);
}

OptimalityDiagnostic diagnose_trace(const Eigen::VectorXd &trace, const NoiseFloor &noise)
{
  OptimalityDiagnostic d;
  if (trace.size() == 0)
  {
    return d;
  }
  d.mean_trace = trace.mean();
  d.min_trace = trace.minCoeff();
  if (d.mean_trace > 0.0)
  {
    d.variance = (trace.array() - d.mean_trace).square().mean() / (d.mean_trace * d.mean_trace);
  }
  d.ph_flag = d.variance < noise.variance && d.min_trace > noise.min_trace;
  return d;
}

OptimalityDiagnostic optimality_diagnostic(const VoxelDomain &domain,
                                           const SpectralResult &result,
                                           const NoiseFloor &noise)
{
  const CellField u = interpolate_to_cells(domain, result.eigenfield);
  return diagnose_trace(boundary_trace_sq(domain, u), noise);
}

NoiseFloor measure_noise_floor(const SupportBody &body, int resolution, std::uint64_t seed,
                               double tol)
{
  const ObjectiveValue a = objective(body, resolution, seed, tol);
  const ObjectiveValue b = objective(body, resolution + 8, seed, tol);
  const NoiseFloor none;
  const OptimalityDiagnostic da = optimality_diagnostic(a.domain, a.result, none);
  const OptimalityDiagnostic db = optimality_diagnostic(b.domain, b.result, none);
  NoiseFloor n;
  n.J = std::abs(a.J - b.J);
  n.variance = std::abs(da.variance - db.variance);
  n.min_trace = std::abs(da.min_trace - db.min_trace);
  return n;
}

namespace
{

// Unit displacement directions for the compass search: each low-degree harmonic scaled so
// its largest value on the sphere is about one, both signs.
std::vector<std::pair<int, double>> compass_directions(const SupportBody &body)
{
  std::vector<std::pair<int, double>> dirs;
  const int lmax = std::min(body.lmax(), 4);
  for (int l = 2; l <= lmax; ++l)
  {
    const double scale = 1.0 / std::sqrt((2.0 * l + 1.0) / (4.0 * kPi));
    for (int m = -l; m <= l; ++m)
    {
      if (body.axisymmetric() && m != 0)
      {
        continue;
      }
      dirs.emplace_back(sh_index(l, m), scale);
      dirs.emplace_back(sh_index(l, m), -scale);
    }
  }
  if (dirs.size() > 8)
  {
    dirs.resize(8);
  }
  return dirs;
}

void maybe_snapshot(const OptConfig &config, int iter, const SupportBody &body)
{
  if (config.snapshot_every <= 0 || iter % config.snapshot_every != 0)
  {
    return;
  }
  std::ostringstream name;
  name << "body_" << iter << ".sb";
  const std::filesystem::path dir =
      config.snapshot_dir.empty() ? std::filesystem::path(".")
                                  : std::filesystem::path(config.snapshot_dir);
  std::ostringstream os;
  write_support_body(os, body);
  write_file_atomic((dir / name.str()).string(), os.str());
}

}  // namespace

OptTrajectory optimize(const OptConfig &config, const SupportBody &initial)
{
  if (!(config.step >= 0.0) || config.resolution < 16)
  {
    throw DomainError("optimizer needs step >= 0 and resolution >= 16");
  }
  SupportBody body = initial.with_lmax(config.lmax);
  if (config.axisymmetric)
  {
    Eigen::VectorXd c = body.coeffs();
    for (int i = 0; i < c.size(); ++i)
    {
      if (sh_order(i) != 0)
      {
        c[i] = 0.0;
      }
    }
    body = SupportBody(config.lmax, true, c);
  }
  else
  {
    body = SupportBody(config.lmax, false, body.coeffs());
  }
  if (!is_convex_valid(body, default_quadrature(), config.margin).valid)
  {
    throw DomainError("initial body fails the convexity certificate");
  }

  OptTrajectory traj;
  traj.noise = measure_noise_floor(body, config.resolution, config.seed, config.tol);
  ObjectiveValue cur = objective(body, config.resolution, config.seed, config.tol);
  double step = config.step;
  traj.stop_reason = "max_iterations";

  for (int it = 0; it < config.max_iterations; ++it)
  {
    const OptimalityDiagnostic diag =
        optimality_diagnostic(cur.domain, cur.result, traj.noise);
    OptRecord rec;
    rec.iter = it;
    rec.body = body;
    rec.V = cur.V;
    rec.mu1 = cur.mu1;
    rec.J = cur.J;
    rec.variance = diag.variance;
    rec.min_trace = diag.min_trace;
    rec.converged = cur.result.converged;
    maybe_snapshot(config, it, body);

    if (diag.variance < traj.noise.variance)
    {
      rec.step = 0.0;
      traj.records.push_back(rec);
      traj.stop_reason = "gradient_below_noise";
      break;
    }

    Eigen::VectorXd g = shape_gradient(cur.domain, cur.result);
    const double gmax = g.cwiseAbs().maxCoeff();
    if (gmax > 0.0)
    {
      g *= mean_radius(body) / gmax;
    }

    bool accepted = false;
    double tried = step;
    ObjectiveValue next;
    SupportBody candidate;
    if (step > 0.0 && gmax > 0.0)
    {
      for (int k = 0; k <= config.max_halvings && !accepted; ++k, tried *= 0.5)
      {
        candidate = step_body(body, cur.domain, g, tried, config.margin);
        next = objective(candidate, config.resolution, config.seed, config.tol);
        accepted = next.J < cur.J;
        if (accepted)
        {
          break;
        }
      }
      if (!accepted && config.fallback)
      {
        tried = step;
        for (const auto &[index, scale] : compass_directions(body))
        {
          Eigen::VectorXd c = body.coeffs();
          c[index] += tried * mean_radius(body) * scale;
          candidate = project_to_convex(SupportBody(body.lmax(), body.axisymmetric(), c),
                                        config.margin);
          candidate = candidate.scaled(
              std::cbrt(support_volume(body) / support_volume(candidate)));
          next = objective(candidate, config.resolution, config.seed, config.tol);
          if (next.J < cur.J)
          {
            accepted = true;
            rec.fallback = true;
            break;
          }
        }
      }
    }
    rec.step = tried;
    rec.accepted = accepted;
    traj.records.push_back(rec);

    if (step == 0.0)
    {
      continue;
    }
    if (!accepted)
    {
      traj.stop_reason = "step_underflow";
      break;
    }
    body = candidate;
    cur = std::move(next);
    step = std::min(config.step, 2.0 * tried);
  }
  traj.final_body = body;
  traj.final_J = cur.J;
  return traj;
}

void write_trajectory_csv(std::ostream &os, const OptTrajectory &trajectory,
                          const std::string &comment)
{
  if (!comment.empty())
  {
    os << "# " << comment << '\n';
  }
  os << "iter,J,mu1,V,variance,min_trace,step,accepted\n";
  for (const OptRecord &r : trajectory.records)
  {
    os << r.iter << ',' << format_double(r.J) << ',' << format_double(r.mu1) << ','
       << format_double(r.V) << ',' << format_double(r.variance) << ','
       << format_double(r.min_trace) << ',' << format_double(r.step) << ','
       << (r.accepted ? 1 : 0) << '\n';
  }
}

DirectionalCheck check_directional_derivative(const SupportBody &body,
                                              const SupportBody &perturbation, int resolution,
                                              std::uint64_t seed, double t, double tol)
{
  const int lmax = std::max(body.lmax(), perturbation.lmax());
  const SupportBody base = body.with_lmax(lmax);
  const SupportBody dir = perturbation.with_lmax(lmax);
  auto shifted = [&](double s)
  {
    SupportBody b(lmax, false, base.coeffs() + s * dir.coeffs());
    if (!is_convex_valid(b).valid)
    {
      throw DomainError("perturbed body is not convex; reduce t");
    }
    return b;
  };

  DirectionalCheck out;
  out.t = t;
  // One lattice for all three bodies: the base spacing, covering the farthest excursion.
  const SupportBody far = shifted(2.0 * t);
  Vec3 lo, hi;
  for (int axis = 0; axis < 3; ++axis)
  {
    const Vec3 e = Vec3::Unit(axis);
    hi[axis] = std::max(eval_support(base, e), eval_support(far, e));
    lo[axis] = -std::max(eval_support(base, -e), eval_support(far, -e));
  }
  const GridSpec base_grid = body_grid(base, resolution);
  GridSpec grid = make_grid(lo, hi, resolution);
  grid.spacing = base_grid.spacing;
  for (int axis = 0; axis < 3; ++axis)
  {
    const double mid = 0.5 * (lo[axis] + hi[axis]);
    const int half = static_cast<int>(std::ceil(0.5 * (hi[axis] - lo[axis]) / grid.spacing)) + 1;
    grid.dims[axis] = 2 * half;
    grid.origin[axis] = mid - half * grid.spacing;
  }
  const ObjectiveValue j0 = objective(base, grid, seed, tol);
  const double j1 = objective(shifted(t), grid, seed, tol).J;
  const double j2 = objective(far, grid, seed, tol).J;
  out.finite_difference = 2.0 * (j1 - j0.J) / t - (j2 - j0.J) / (2.0 * t);

  // Top positive eigenspace at the unperturbed body.
  const VoxelDomain &domain = j0.domain;
  const ProjectedBiotSavart handle(domain);
  const std::vector<EigenPair> pairs = extreme_eigs(handle, seed, tol, 8000, 8);
  double top = 0.0;
  for (const EigenPair &p : pairs)
  {
    top = std::max(top, p.value);
  }
  std::vector<CellField> fields;
  for (const EigenPair &p : pairs)
  {
    if (p.value > 0.0 && p.value >= top * (1.0 - 1e-3))
    {
      fields.push_back(interpolate_to_cells(domain, p.vector));
    }
  }
  out.multiplicity = static_cast<int>(fields.size());

  const BoundaryGeometry geo = boundary_geometry(domain, base);
  const auto &bf = domain.boundary_faces();
  Eigen::VectorXd speed(static_cast<Eigen::Index>(bf.size()));
  for (std::size_t i = 0; i < bf.size(); ++i)
  {
    speed[static_cast<Eigen::Index>(i)] = eval_support(dir, geo.normal[i]);
  }
  const int k = out.multiplicity;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(k, k), M = Eigen::MatrixXd::Zero(k, k);
  const double h3 = domain.grid().cell_volume();
  for (int a = 0; a < k; ++a)
  {
    for (int b = 0; b <= a; ++b)
    {
      double s = 0.0;
      for (std::size_t i = 0; i < bf.size(); ++i)
      {
        const int c = boundary_cell(domain, bf[i]);
        s += geo.weight[static_cast<Eigen::Index>(i)] * speed[static_cast<Eigen::Index>(i)] *
             fields[a].col(c).dot(fields[b].col(c));
      }
      S(a, b) = S(b, a) = s;
      M(a, b) = M(b, a) = h3 * (fields[a].array() * fields[b].array()).sum();
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(S, M);
  const double theta = ges.eigenvalues().maxCoeff();
  const double flux = geo.weight.dot(speed);
  out.predicted = -std::cbrt(j0.V) * j0.mu1 * (theta - flux / (3.0 * j0.V));
  return out;
}

}  // namespace beltrami
