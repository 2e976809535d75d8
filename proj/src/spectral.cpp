// SPDX-License-Identifier: Apache-2.0

#include "beltrami/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <fftw3.h>

#include "beltrami/io.hpp"

namespace beltrami
{

// --- FFT convolution ------------------------------------------------------------------

namespace
{

int fft_friendly_size(int n)
{
  for (int m = std::max(n, 1);; ++m)
  {
    int r = m;
    for (int p : {2, 3, 5, 7})
    {
      while (r % p == 0)
      {
        r /= p;
      }
    }
    if (r == 1)
    {
      return m;
    }
  }
}

struct FftwReal
{
  double *p;
  explicit FftwReal(std::size_t n) : p(fftw_alloc_real(n)) {}
  ~FftwReal() { fftw_free(p); }
  FftwReal(const FftwReal &) = delete;
  FftwReal &operator=(const FftwReal &) = delete;
};

struct FftwComplex
{
  fftw_complex *p;
  explicit FftwComplex(std::size_t n) : p(fftw_alloc_complex(n)) {}
  ~FftwComplex() { fftw_free(p); }
  FftwComplex(const FftwComplex &) = delete;
  FftwComplex &operator=(const FftwComplex &) = delete;
};

}  // namespace

struct BiotSavartConvolver::Plans
{
  std::size_t real_size = 0;
  std::size_t complex_size = 0;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  std::vector<std::unique_ptr<FftwComplex>> kernel;

  ~Plans()
  {
    if (forward)
    {
      fftw_destroy_plan(forward);
    }
    if (inverse)
    {
      fftw_destroy_plan(inverse);
    }
  }
};

BiotSavartConvolver::BiotSavartConvolver(const VoxelDomain &domain)
  : domain_(&domain), plans_(std::make_unique<Plans>())
{
  Index3 hi{0, 0, 0};
  lo_ = domain.cells().front();
  hi = lo_;
  for (const Index3 &c : domain.cells())
  {
    for (int a = 0; a < 3; ++a)
    {
      lo_[a] = std::min(lo_[a], c[a]);
      hi[a] = std::max(hi[a], c[a]);
    }
  }
  for (int a = 0; a < 3; ++a)
  {
    extent_[a] = hi[a] - lo_[a] + 1;
    padded_[a] = fft_friendly_size(2 * extent_[a] - 1);
  }
  Plans &pl = *plans_;
  pl.real_size = static_cast<std::size_t>(padded_[0]) * padded_[1] * padded_[2];
  pl.complex_size = static_cast<std::size_t>(padded_[0] / 2 + 1) * padded_[1] * padded_[2];

  // FFTW is row-major; x is the fastest index, so it goes last.
  FftwReal real(pl.real_size);
  FftwComplex cplx(pl.complex_size);
  pl.forward = fftw_plan_dft_r2c_3d(padded_[2], padded_[1], padded_[0], real.p, cplx.p, FFTW_ESTIMATE);
  pl.inverse = fftw_plan_dft_c2r_3d(padded_[2], padded_[1], padded_[0], cplx.p, real.p, FFTW_ESTIMATE);

  const double scale = domain.spacing() / (4.0 * kPi);
  auto wrapped = [](int idx, int extent, int padded) -> std::optional<int>
  {
    if (idx < extent)
    {
      return idx;
    }
    if (idx > padded - extent)
    {
      return idx - padded;
    }
    return std::nullopt;
  };
  for (int comp = 0; comp < 3; ++comp)
  {
    std::fill(real.p, real.p + pl.real_size, 0.0);
    for (int k = 0; k < padded_[2]; ++k)
    {
      const auto dz = wrapped(k, extent_[2], padded_[2]);
      if (!dz)
      {
        continue;
      }
      for (int j = 0; j < padded_[1]; ++j)
      {
        const auto dy = wrapped(j, extent_[1], padded_[1]);
        if (!dy)
        {
          continue;
        }
        for (int i = 0; i < padded_[0]; ++i)
        {
          const auto dx = wrapped(i, extent_[0], padded_[0]);
          if (!dx || (*dx == 0 && *dy == 0 && *dz == 0))
          {
            continue;
          }
          const Vec3 d(*dx, *dy, *dz);
          const double r = d.norm();
          real.p[i + static_cast<std::size_t>(padded_[0]) * (j + static_cast<std::size_t>(padded_[1]) * k)] =
              scale * d[comp] / (r * r * r);
        }
      }
    }
    auto khat = std::make_unique<FftwComplex>(pl.complex_size);
    fftw_execute_dft_r2c(pl.forward, real.p, khat->p);
    pl.kernel.push_back(std::move(khat));
  }
}

BiotSavartConvolver::~BiotSavartConvolver() = default;

CellField BiotSavartConvolver::apply(const CellField &u) const
{
  const Plans &pl = *plans_;
  const auto &cells = domain_->cells();
  auto local = [this](const Index3 &c)
  {
    return static_cast<std::size_t>(c[0] - lo_[0]) +
           static_cast<std::size_t>(padded_[0]) *
               (static_cast<std::size_t>(c[1] - lo_[1]) +
                static_cast<std::size_t>(padded_[1]) * static_cast<std::size_t>(c[2] - lo_[2]));
  };

  FftwReal real(pl.real_size);
  std::vector<std::unique_ptr<FftwComplex>> uhat;
  for (int comp = 0; comp < 3; ++comp)
  {
    std::fill(real.p, real.p + pl.real_size, 0.0);
    for (std::size_t c = 0; c < cells.size(); ++c)
    {
      real.p[local(cells[c])] = u(comp, static_cast<Eigen::Index>(c));
    }
    uhat.push_back(std::make_unique<FftwComplex>(pl.complex_size));
    fftw_execute_dft_r2c(pl.forward, real.p, uhat.back()->p);
  }

  CellField out(3, cells.size());
  FftwComplex prod(pl.complex_size);
  const double norm = 1.0 / static_cast<double>(pl.real_size);
  for (int comp = 0; comp < 3; ++comp)
  {
    // (u x K)_i = u_j K_k - u_k K_j with (i, j, k) cyclic.
    const int j = (comp + 1) % 3, k = (comp + 2) % 3;
    const fftw_complex *uj = uhat[j]->p, *uk = uhat[k]->p;
    const fftw_complex *Kj = pl.kernel[j]->p, *Kk = pl.kernel[k]->p;
    for (std::size_t n = 0; n < pl.complex_size; ++n)
    {
      prod.p[n][0] = (uj[n][0] * Kk[n][0] - uj[n][1] * Kk[n][1]) - (uk[n][0] * Kj[n][0] - uk[n][1] * Kj[n][1]);
      prod.p[n][1] = (uj[n][0] * Kk[n][1] + uj[n][1] * Kk[n][0]) - (uk[n][0] * Kj[n][1] + uk[n][1] * Kj[n][0]);
    }
    fftw_execute_dft_c2r(pl.inverse, prod.p, real.p);
    for (std::size_t c = 0; c < cells.size(); ++c)
    {
      out(comp, static_cast<Eigen::Index>(c)) = real.p[local(cells[c])] * norm;
    }
  }
  return out;
}

CellField biot_savart_direct(const VoxelDomain &domain, const CellField &u)
{
  const auto &cells = domain.cells();
  const double scale = domain.spacing() / (4.0 * kPi);
  CellField out(3, cells.size());
  parallel_for(cells.size(),
               [&](std::size_t b, std::size_t e)
               {
                 for (std::size_t t = b; t < e; ++t)
                 {
                   Vec3 acc = Vec3::Zero();
                   for (std::size_t s = 0; s < cells.size(); ++s)
                   {
                     if (s == t)
                     {
                       continue;
                     }
                     const Vec3 d(cells[t][0] - cells[s][0], cells[t][1] - cells[s][1],
                                  cells[t][2] - cells[s][2]);
                     const double r = d.norm();
                     acc += Vec3(u.col(static_cast<Eigen::Index>(s))).cross(d) / (r * r * r);
                   }
                   out.col(static_cast<Eigen::Index>(t)) = scale * acc;
                 }
               });
  return out;
}

CellField biot_savart_apply(const VoxelDomain &domain, const CellField &u)
{
  return BiotSavartConvolver(domain).apply(u);
}

// --- projected operator ---------------------------------------------------------------

ProjectedBiotSavart::ProjectedBiotSavart(const VoxelDomain &domain, double poisson_tol)
  : domain_(&domain), projector_(domain, poisson_tol), convolver_(domain)
{
}

FaceField ProjectedBiotSavart::apply(const FaceField &w) const
{
  ++applies_;
  const FaceField pw = projector_.project(w);
  const CellField bs = convolver_.apply(interpolate_to_cells(*domain_, pw));
  return projector_.project(restrict_to_faces(*domain_, bs));
}

LinearOperator ProjectedBiotSavart::as_operator() const
{
  LinearOperator op;
  op.dim = domain_->face_count();
  op.apply = [this](const Eigen::VectorXd &x, Eigen::VectorXd &y) { y = apply(x); };
  return op;
}

double ProjectedBiotSavart::inner(const FaceField &a, const FaceField &b) const
{
  return a.dot(b) * domain_->grid().cell_volume();
}

FaceField projected_bs_apply(const ProjectedBiotSavart &handle, const FaceField &w)
{
  return handle.apply(w);
}

// --- eigenvalues ----------------------------------------------------------------------

std::vector<EigenPair> extreme_eigs(const ProjectedBiotSavart &handle, std::uint64_t seed,
                                    double tol, int maxit, int nev, bool *converged)
{
  EigsOptions opt;
  opt.nev = nev;
  opt.tol = tol;
  opt.max_applies = maxit;
  opt.seed = seed;
  opt.block_size = nev <= 4 ? 4 : 8;
  EigsResult r = extreme_eigs(handle.as_operator(), opt);
  if (converged)
  {
    *converged = r.converged;
  }
  return std::move(r.pairs);
}

SpectralResult first_positive_mu(const ProjectedBiotSavart &handle, const SpectralOptions &options)
{
  const double h3 = handle.domain().grid().cell_volume();
  const double to_unit_l2 = 1.0 / std::sqrt(h3);
  for (int nev : {4, 8, 16})
  {
    EigsOptions opt;
    opt.nev = nev;
    opt.tol = options.tol;
    opt.max_applies = options.max_applies;
    opt.seed = options.seed;
    opt.block_size = nev <= 4 ? 4 : 8;
    const std::size_t before = handle.apply_count();
    EigsResult eig = extreme_eigs(handle.as_operator(), opt);

    const EigenPair *pos = nullptr;
    const EigenPair *neg = nullptr;
    for (const EigenPair &p : eig.pairs)
    {
      if (p.value > 0.0 && (!pos || p.value > pos->value))
      {
        pos = &p;
      }
      if (p.value < 0.0 && (!neg || p.value < neg->value))
      {
        neg = &p;
      }
    }
    if (!pos)
    {
      continue;
    }
    SpectralResult r;
    r.lambda_max = pos->value;
    r.mu1 = 1.0 / pos->value;
    r.eigenfield = pos->vector * to_unit_l2;
    r.residual = pos->residual * std::abs(pos->value);
    r.iterations = static_cast<int>(handle.apply_count() - before);
    r.converged = eig.converged;
    if (neg)
    {
      r.mu_minus1 = 1.0 / neg->value;
      r.negative_field = neg->vector * to_unit_l2;
    }
    for (const EigenPair &p : eig.pairs)
    {
      r.ritz_values.push_back(p.value);
    }
    r.volume = handle.domain().volume();
    return r;
  }
  throw NoPositiveEigenvalueError(
      "no positive eigenvalue among the 16 extreme eigenpairs; resolution too coarse");
}

double helicity(const ProjectedBiotSavart &handle, const FaceField &w)
{
  return handle.inner(handle.apply(w), w);
}

std::optional<double> rayleigh_upper_bound(const ProjectedBiotSavart &handle, const FaceField &w)
{
  const double H = helicity(handle, w);
  if (!(H > 0.0))
  {
    return std::nullopt;
  }
  return handle.norm_sq(w) / H;
}

void write_spectral_report(std::ostream &os, const SpectralResult &result,
                           const std::vector<std::pair<std::string, std::string>> &extra)
{
  const double fk = std::cbrt(4.0 * kPi / (3.0 * result.volume));
  os << "mu1=" << format_double(result.mu1) << '\n';
  os << "lambda_max=" << format_double(result.lambda_max) << '\n';
  os << "residual=" << format_double(result.residual) << '\n';
  os << "iterations=" << result.iterations << '\n';
  os << "converged=" << (result.converged ? "true" : "false") << '\n';
  os << "volume=" << format_double(result.volume) << '\n';
  os << "faber_krahn_bound=" << format_double(fk) << '\n';
  if (result.mu_minus1)
  {
    os << "mu_minus1=" << format_double(*result.mu_minus1) << '\n';
  }
  for (const auto &[k, v] : extra)
  {
    os << k << '=' << v << '\n';
  }
}

}  // namespace beltrami
