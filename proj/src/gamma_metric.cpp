// SPDX-License-Identifier: Apache-2.0

#include "beltrami/gamma_metric.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "beltrami/io.hpp"

namespace beltrami
{

BoxDomain::BoxDomain(const Vec3 &lo, const Vec3 &hi, int resolution)
  : domain_(box_domain(lo, hi, resolution))
{
}

BoxDomain::BoxDomain(VoxelDomain domain) : domain_(std::move(domain)) {}

VoxelDomain BoxDomain::rasterize(const SupportBody &body) const
{
  return beltrami::rasterize(body, domain_.grid());
}

SubdomainOperator::SubdomainOperator(const BoxDomain &box, VoxelDomain sub)
  : sub_(std::make_unique<VoxelDomain>(std::move(sub)))
{
  const GridSpec &bg = box.grid();
  const GridSpec &sg = sub_->grid();
  if (bg.dims != sg.dims || bg.spacing != sg.spacing || bg.origin != sg.origin)
  {
    throw DomainError("subdomain is not on the box lattice");
  }
  for (const Index3 &c : sub_->cells())
  {
    if (!box.domain().occupied(c))
    {
      throw DomainError("subdomain leaves the box");
    }
  }
  box_faces_ = box.domain().face_count();
  to_box_.resize(sub_->face_count());
  for (std::size_t f = 0; f < sub_->face_count(); ++f)
  {
    const auto &face = sub_->faces()[f];
    to_box_[f] = box.domain().face_at(face.axis, face.pos);
  }
  op_ = std::make_unique<ProjectedBiotSavart>(*sub_);
}

FaceField SubdomainOperator::restrict(const FaceField &w_box) const
{
  FaceField w(sub_->face_count());
  for (std::size_t f = 0; f < to_box_.size(); ++f)
  {
    w[static_cast<Eigen::Index>(f)] = w_box[to_box_[f]];
  }
  return w;
}

FaceField SubdomainOperator::extend(const FaceField &w_sub) const
{
  FaceField w = FaceField::Zero(static_cast<Eigen::Index>(box_faces_));
  for (std::size_t f = 0; f < to_box_.size(); ++f)
  {
    w[to_box_[f]] = w_sub[static_cast<Eigen::Index>(f)];
  }
  return w;
}

FaceField SubdomainOperator::apply(const FaceField &w_box) const
{
  return extend(op_->apply(restrict(w_box)));
}

FaceField bs_tilde_apply(const BoxDomain &box, const SubdomainOperator &sub, const FaceField &w)
{
  if (static_cast<std::size_t>(w.size()) != box.domain().face_count())
  {
    throw DomainError("field does not live on the box faces");
  }
  return sub.apply(w);
}

namespace
{

bool same_cells(const VoxelDomain &a, const VoxelDomain &b)
{
  return a.cells() == b.cells();
}

}  // namespace

GammaEstimate gamma_distance(const BoxDomain &box, const SubdomainOperator &a,
                             const SubdomainOperator &b, std::uint64_t seed, int nsamples,
                             double tol)
{
  const std::size_t n = box.domain().face_count();
  GammaEstimate est;
  est.spacing = box.grid().spacing;
  est.samples = nsamples;
  auto diff = [&](const FaceField &w) { return FaceField(a.apply(w) - b.apply(w)); };

  // Random unit fields in K(D); the stream is independent of the eigensolver's.
  const SeedSequence seq = SeedSequence(seed).child("gamma-sampling");
  std::mt19937_64 rng = seq.engine();
  std::normal_distribution<double> normal(0.0, 1.0);
  const LerayProjector box_projector(box.domain());
  FaceField best_sample = FaceField::Zero(static_cast<Eigen::Index>(n));
  for (int s = 0; s < nsamples; ++s)
  {
    FaceField w(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < w.size(); ++i)
    {
      w[i] = normal(rng);
    }
    w = box_projector.project(w);
    const double norm = w.norm();
    if (!(norm > 0.0))
    {
      continue;
    }
    w /= norm;
    const double v = diff(w).norm();
    if (v > est.sampling_lower)
    {
      est.sampling_lower = v;
      best_sample = w;
    }
  }

  if (same_cells(a.domain(), b.domain()))
  {
    est.value = 0.0;
    est.method = "power-iteration";
    est.lower_witness = best_sample;
    return est;
  }

  LinearOperator op;
  op.dim = n;
  op.apply = [&](const Eigen::VectorXd &x, Eigen::VectorXd &y) { y = diff(x); };
  EigsOptions opt;
  opt.nev = 4;
  opt.tol = tol;
  opt.max_applies = 4000;
  opt.seed = SeedSequence(seed).child("gamma-krylov").seed();
  const EigsResult r = extreme_eigs(op, opt);
  if (!r.converged || r.pairs.empty())
  {
    est.value = est.sampling_lower;
    est.method = "random-sampling";
    est.converged = false;
    est.lower_witness = best_sample;
    return est;
  }
  const EigenPair &top = r.pairs.front();
  est.value = std::abs(top.value);
  est.residual = top.residual * est.value;
  est.method = "power-iteration";
  est.lower_witness = top.vector;
  return est;
}

namespace
{

double kth_singular(const SubdomainOperator &s, int k, std::uint64_t seed, double tol)
{
  // Magnitudes come in near-equal pairs of opposite sign, so ask for a margin beyond k.
  const int nev = std::max(4, k + 4);
  const std::vector<EigenPair> pairs = extreme_eigs(s.op(), seed, tol, 8000, nev);
  if (static_cast<int>(pairs.size()) < k)
  {
    throw ConvergenceError("too few eigenpairs for the requested index", 0.0);
  }
  return std::abs(pairs[k - 1].value);
}

}  // namespace

LipschitzReport lipschitz_check(const SubdomainOperator &a, const SubdomainOperator &b, int k,
                                const GammaEstimate &gamma, std::uint64_t seed, double tol)
{
  if (k < 1)
  {
    throw DomainError("eigenvalue index starts at 1");
  }
  LipschitzReport r;
  r.k = k;
  r.sigma_a = kth_singular(a, k, seed, tol);
  r.sigma_b = same_cells(a.domain(), b.domain()) ? r.sigma_a : kth_singular(b, k, seed, tol);
  r.gap = std::abs(r.sigma_a - r.sigma_b);
  r.d_gamma = gamma.value;
  // Each extreme eigenvalue is accurate to its residual; 10x headroom on the solver target.
  r.tolerance = 10.0 * tol * (r.sigma_a + r.sigma_b) + gamma.residual;
  r.slack = r.d_gamma + r.tolerance - r.gap;
  r.holds = r.slack >= 0.0;
  return r;
}

void write_gamma_report(std::ostream &os, const GammaEstimate &gamma,
                        const std::vector<LipschitzReport> &checks)
{
  os << "d_gamma=" << format_double(gamma.value) << '\n';
  os << "method=" << gamma.method << '\n';
  os << "residual=" << format_double(gamma.residual) << '\n';
  os << "sampling_lower=" << format_double(gamma.sampling_lower) << '\n';
  os << "samples=" << gamma.samples << '\n';
  os << "spacing=" << format_double(gamma.spacing) << '\n';
  for (const LipschitzReport &c : checks)
  {
    os << "lambda_" << c.k << "=" << format_double(c.sigma_a) << ',' << format_double(c.sigma_b)
       << '\n';
    os << "gap_" << c.k << "=" << format_double(c.gap) << '\n';
    os << "slack_" << c.k << "=" << format_double(c.slack) << '\n';
    os << "inequality_" << c.k << "=" << (c.holds ? "holds" : "violated") << '\n';
  }
}

}  // namespace beltrami
