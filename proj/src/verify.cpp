// SPDX-License-Identifier: Apache-2.0

#include "beltrami/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include "beltrami/bounds.hpp"
#include "beltrami/convex_body.hpp"
#include "beltrami/domain_grid.hpp"
#include "beltrami/gamma_metric.hpp"
#include "beltrami/io.hpp"
#include "beltrami/spectral.hpp"

namespace beltrami
{

bool VerifyReport::all_pass() const
{
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck &c) { return c.pass; });
}

namespace
{

class Suite
{
public:
  explicit Suite(VerifyReport &report) : report_(report) {}

  void at_most(const std::string &name, double value, double threshold)
  {
    report_.checks.push_back({name, value, "<=", threshold, value <= threshold});
  }
  void at_least(const std::string &name, double value, double threshold)
  {
    report_.checks.push_back({name, value, ">=", threshold, value >= threshold});
  }

private:
  VerifyReport &report_;
};

FaceField random_face_field(std::size_t n, std::mt19937_64 &rng)
{
  std::normal_distribution<double> normal(0.0, 1.0);
  FaceField f(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < f.size(); ++i)
  {
    f[i] = normal(rng);
  }
  return f;
}

SpectralResult solve(const VoxelDomain &domain, const VerifyOptions &o)
{
  const ProjectedBiotSavart handle(domain);
  SpectralOptions so;
  so.seed = o.seed;
  so.tol = o.tol;
  return first_positive_mu(handle, so);
}

void volume_bound_rows(Suite &suite, const std::string &name, const VoxelDomain &domain,
                       const SpectralResult &r)
{
  const double fk = faber_krahn_bound(domain.volume());
  suite.at_least("faber_krahn_" + name, r.mu1 - fk, -1e-3);
  if (r.mu_minus1)
  {
    suite.at_least("faber_krahn_neg_" + name, -*r.mu_minus1 - fk, -1e-3);
  }
}

}  // namespace

VerifyReport run_verify(const VerifyOptions &o)
{
  VerifyReport report;
  report.resolution = o.resolution;
  report.seed = o.seed;
  Suite suite(report);
  const SeedSequence seeds(o.seed);
  const int res = o.resolution;

  // Balls: scaling at matched resolution, monotonicity on a shared grid.
  const SupportBody unit = SupportBody::ball(1.0);
  const VoxelDomain ball = rasterize(unit, res);
  const SpectralResult rb = solve(ball, o);
  volume_bound_rows(suite, "ball", ball, rb);
  for (double lambda : {0.5, 2.0})
  {
    const SpectralResult rs = solve(rasterize(unit.scaled(lambda), res), o);
    char name[32];
    std::snprintf(name, sizeof(name), "scaling_%g", lambda);
    suite.at_most(name, std::abs(lambda * rs.mu1 / rb.mu1 - 1.0), 0.05);
  }
  {
    const VoxelDomain small = rasterize(SupportBody::ball(0.8), ball.grid());
    const SpectralResult rs = solve(small, o);
    suite.at_least("monotonicity_0.8", rs.mu1 / rb.mu1, 0.98);
  }

  // Variational identity and Rayleigh quotients on the unit ball.
  {
    const ProjectedBiotSavart handle(ball);
    const double H = helicity(handle, rb.eigenfield);
    suite.at_most("helicity_identity", std::abs(H * rb.mu1 / handle.norm_sq(rb.eigenfield) - 1.0),
                  5.0 * o.tol);
    std::mt19937_64 rng = seeds.child("rayleigh").engine();
    double worst = std::numeric_limits<double>::infinity();
    int found = 0;
    for (int attempt = 0; attempt < 200 && found < 20; ++attempt)
    {
      const FaceField w = handle.projector().project(random_face_field(ball.face_count(), rng));
      if (const auto q = rayleigh_upper_bound(handle, w))
      {
        worst = std::min(worst, *q);
        ++found;
      }
    }
    suite.at_least("rayleigh_min_over_mu1", found == 20 ? worst / rb.mu1 : 0.0, 1.0 - o.tol);
  }

  // Projector and operator algebra on the unit ball.
  {
    const ProjectedBiotSavart handle(ball);
    const LerayProjector &proj = handle.projector();
    std::mt19937_64 rng = seeds.child("algebra").engine();
    const FaceField f = random_face_field(ball.face_count(), rng);
    const FaceField pf = proj.project(f);
    suite.at_most("projector_idempotent", (proj.project(pf) - pf).norm() / f.norm(), 1e-9);
    std::normal_distribution<double> normal(0.0, 1.0);
    CellScalar p(static_cast<Eigen::Index>(ball.cell_count()));
    for (Eigen::Index i = 0; i < p.size(); ++i)
    {
      p[i] = normal(rng);
    }
    const FaceField g = discrete_gradient(ball, p);
    suite.at_most("projector_kills_gradients", proj.project(g).norm() / g.norm(), 1e-9);
    double asym = 0.0;
    for (int k = 0; k < 20; ++k)
    {
      const FaceField x = random_face_field(ball.face_count(), rng);
      const FaceField y = random_face_field(ball.face_count(), rng);
      const double lhs = handle.apply(x).dot(y);
      const double rhs = x.dot(handle.apply(y));
      asym = std::max(asym, std::abs(lhs - rhs) / (rb.lambda_max * x.norm() * y.norm()));
    }
    suite.at_most("operator_symmetry", asym, 1e-6);
  }

  // Spheroids and cylinders.
  {
    const SupportBody prolate = SupportBody::spheroid(1.0, 1.0, 1.2, 6);
    const VoxelDomain d = rasterize(prolate, res);
    volume_bound_rows(suite, "spheroid_1_1_1.2", d, solve(d, o));
    const SupportBody oblate = SupportBody::spheroid(1.0, 1.0, 0.6, 6);
    const VoxelDomain e = rasterize(oblate, res);
    volume_bound_rows(suite, "spheroid_1_1_0.6", e, solve(e, o));
  }
  for (const auto &[R, h] : {std::pair{1.0, 1.0}, std::pair{0.5, 1.5}})
  {
    CylinderSpec spec;
    spec.radius = R;
    spec.half_height = h;
    const VoxelDomain d = rasterize_cylinder(spec, res);
    const SpectralResult r = solve(d, o);
    char name[48];
    std::snprintf(name, sizeof(name), "cylinder_%g_%g", R, h);
    volume_bound_rows(suite, name, d, r);
    suite.at_least(std::string("bound_") + name, r.mu1 - cylinder_mu_lower(R, h), -0.02);
    suite.at_most(std::string("quadrature_M_") + name,
                  std::abs(cylinder_M_quadrature(R, h) / cylinder_M(R, h) - 1.0), 1e-3);
  }

  // Hausdorff axioms on three bodies.
  {
    const SupportBody a = SupportBody::ball(1.0, 4);
    const SupportBody b = SupportBody::spheroid(1.0, 1.0, 1.2, 4);
    const SupportBody c = SupportBody::translated_ball(0.9, Vec3(0.1, 0.0, -0.05), 4);
    suite.at_most("hausdorff_identity", hausdorff_distance(b, b), 0.0);
    suite.at_most("hausdorff_symmetry",
                  std::abs(hausdorff_distance(a, b) - hausdorff_distance(b, a)), 0.0);
    suite.at_least("hausdorff_triangle",
                   hausdorff_distance(a, b) + hausdorff_distance(b, c) - hausdorff_distance(a, c),
                   -1e-12);
  }

  // Gamma distance: metric axioms and the Lipschitz inequality for nested balls.
  {
    const BoxDomain box(Vec3::Constant(-1.0), Vec3::Constant(1.0), res);
    const SubdomainOperator b50(box, box.rasterize(SupportBody::ball(0.5)));
    const SubdomainOperator b55(box, box.rasterize(SupportBody::ball(0.55)));
    const SubdomainOperator b60(box, box.rasterize(SupportBody::ball(0.6)));
    const double gtol = 1e-8;
    const std::uint64_t gseed = seeds.child("gamma").seed();
    const GammaEstimate self = gamma_distance(box, b50, b50, gseed, 4, gtol);
    suite.at_most("gamma_identity", self.value, 1e-10);
    const GammaEstimate d12 = gamma_distance(box, b50, b55, gseed, 8, gtol);
    const GammaEstimate d21 = gamma_distance(box, b55, b50, gseed, 8, gtol);
    const GammaEstimate d23 = gamma_distance(box, b55, b60, gseed, 8, gtol);
    const GammaEstimate d13 = gamma_distance(box, b50, b60, gseed, 8, gtol);
    const double slack_tol = 2.0 * gtol * (d12.value + d23.value + d13.value) + d12.residual +
                             d23.residual + d13.residual;
    suite.at_most("gamma_symmetry", std::abs(d12.value - d21.value),
                  2.0 * (d12.residual + d21.residual) + 1e-12);
    suite.at_least("gamma_triangle", d12.value + d23.value - d13.value, -2.0 * slack_tol);
    suite.at_most("gamma_sampling_below_krylov", d12.sampling_lower - d12.value,
                  d12.residual + 1e-12);
    for (int k : {1, 2})
    {
      const LipschitzReport lr = lipschitz_check(b50, b55, k, d12, gseed, gtol);
      suite.at_least("lipschitz_slack_k" + std::to_string(k), lr.slack, 0.0);
    }
  }
  return report;
}

void write_verify_report(std::ostream &os, const VerifyReport &report)
{
  os << "resolution=" << report.resolution << '\n';
  os << "seed=" << report.seed << '\n';
  for (const VerifyCheck &c : report.checks)
  {
    char line[256];
    std::snprintf(line, sizeof(line), "%-32s %-24s %s %-24s %s\n", c.name.c_str(),
                  format_double(c.value).c_str(), c.relation.c_str(),
                  format_double(c.threshold).c_str(), c.pass ? "PASS" : "FAIL");
    os << line;
  }
  os << "all_pass=" << (report.all_pass() ? "true" : "false") << '\n';
}

}  // namespace beltrami
