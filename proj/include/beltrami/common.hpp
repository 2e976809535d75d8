// SPDX-License-Identifier: Apache-2.0

#ifndef BELTRAMI_COMMON_HPP
#define BELTRAMI_COMMON_HPP

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace beltrami
{

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

// Thrown for violated preconditions on user-supplied values (nonpositive lengths, bad
// resolutions, malformed files).
class DomainError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when rasterization leaves no occupied cell.
class EmptyDomainError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Thrown by iterative solvers that exhaust their budget. Carries the last residual.
class ConvergenceError : public std::runtime_error
{
public:
  ConvergenceError(const std::string &what, double residual)
    : std::runtime_error(what), residual_(residual)
  {
  }
  double residual() const { return residual_; }

private:
  double residual_;
};

// Upper bound on worker threads used by internal loops. Initialized from the
// BELTRAMI_THREADS environment variable (default: hardware concurrency).
int max_threads();
void set_max_threads(int n);

// Runs body(begin, end) over [0, n) split into contiguous chunks, one per worker. Each
// index is handled by exactly one call, so per-index results are independent of the
// thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)> &body);

// Deterministic splittable seed source. A child stream is identified by its parent seed
// and a name; the mapping is SplitMix64 over an FNV-1a hash of the name, so the set of
// streams a run draws from does not depend on the order in which they are created.
class SeedSequence
{
public:
  explicit SeedSequence(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  SeedSequence child(std::string_view name) const;
  SeedSequence child(std::uint64_t index) const;
  std::mt19937_64 engine() const { return std::mt19937_64(seed_); }

private:
  std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace beltrami

#endif  // BELTRAMI_COMMON_HPP
