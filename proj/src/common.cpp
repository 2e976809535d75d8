// SPDX-License-Identifier: Apache-2.0

#include "beltrami/common.hpp"
#include "beltrami/io.hpp"
#include "beltrami/grid_spec.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>
#include <vector>

namespace beltrami
{

namespace
{

int threads_from_env()
{
  int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char *env = std::getenv("BELTRAMI_THREADS"))
  {
    int n = std::atoi(env);
    if (n > 0)
    {
      return std::min(n, hw);
    }
  }
  return hw;
}

std::atomic<int> &thread_cap()
{
  static std::atomic<int> cap{threads_from_env()};
  return cap;
}

}  // namespace

int max_threads()
{
  return thread_cap().load();
}

void set_max_threads(int n)
{
  thread_cap().store(std::max(1, n));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)> &body)
{
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(max_threads()), std::max<std::size_t>(n / 256, 1));
  if (workers <= 1)
  {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w)
  {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e)
    {
      break;
    }
    pool.emplace_back([&body, b, e] { body(b, e); });
  }
  for (auto &t : pool)
  {
    t.join();
  }
}

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SeedSequence SeedSequence::child(std::string_view name) const
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name)
  {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return SeedSequence(splitmix64(seed_ ^ splitmix64(h)));
}

SeedSequence SeedSequence::child(std::uint64_t index) const
{
  return SeedSequence(splitmix64(seed_ ^ splitmix64(index + 0x51ed270b27a4d3c5ULL)));
}

void write_file_atomic(const std::string &path, std::string_view contents)
{
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
    {
      throw DomainError("cannot write " + tmp);
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out)
    {
      throw DomainError("short write to " + tmp);
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double value)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

GridSpec make_grid(const Vec3 &lo, const Vec3 &hi, int resolution)
{
  if (resolution < 1)
  {
    throw DomainError("grid resolution must be positive");
  }
  const Vec3 extent = hi - lo;
  const double largest = extent.maxCoeff();
  if (!(largest > 0.0))
  {
    throw DomainError("grid box has no extent");
  }
  GridSpec g;
  g.spacing = largest / resolution;
  for (int axis = 0; axis < 3; ++axis)
  {
    const double half_cells = std::ceil(extent[axis] / (2.0 * g.spacing) - 1e-9);
    g.dims[axis] = 2 * std::max(1, static_cast<int>(half_cells)) + 2;
  }
  const Vec3 center = 0.5 * (lo + hi);
  g.origin = center - 0.5 * g.spacing * Vec3(g.dims[0], g.dims[1], g.dims[2]);
  return g;
}

}  // namespace beltrami
