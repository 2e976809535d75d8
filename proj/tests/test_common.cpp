// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <vector>

#include "beltrami/common.hpp"
#include "beltrami/grid_spec.hpp"
#include "beltrami/io.hpp"

using namespace beltrami;

TEST(SeedSequence, ChildStreamsAreStableAndDistinct)
{
  const SeedSequence root(42);
  EXPECT_EQ(root.child("a").seed(), SeedSequence(42).child("a").seed());
  EXPECT_NE(root.child("a").seed(), root.child("b").seed());
  EXPECT_NE(root.child(std::uint64_t{0}).seed(), root.child(std::uint64_t{1}).seed());
  auto e1 = root.child("x").engine();
  auto e2 = root.child("x").engine();
  EXPECT_EQ(e1(), e2());
}

TEST(ParallelFor, CoversEveryIndexOnce)
{
  std::vector<std::atomic<int>> hits(10007);
  parallel_for(hits.size(),
               [&](std::size_t b, std::size_t e)
               {
                 for (std::size_t i = b; i < e; ++i)
                 {
                   hits[i]++;
                 }
               });
  for (const auto &h : hits)
  {
    EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelFor, ThreadCapIsRespected)
{
  const int before = max_threads();
  set_max_threads(1);
  EXPECT_EQ(max_threads(), 1);
  set_max_threads(0);
  EXPECT_EQ(max_threads(), 1);
  set_max_threads(before);
}

TEST(MakeGrid, EvenSymmetricAndScaleCovariant)
{
  const GridSpec g = make_grid(Vec3(-1, -0.5, -2), Vec3(1, 0.5, 2), 16);
  EXPECT_DOUBLE_EQ(g.spacing, 4.0 / 16);
  for (int a = 0; a < 3; ++a)
  {
    EXPECT_EQ(g.dims[a] % 2, 0);
    const double lo = g.origin[a];
    const double hi = g.origin[a] + g.spacing * g.dims[a];
    EXPECT_NEAR(lo, -hi, 1e-12);
  }
  const GridSpec s = make_grid(Vec3(-2, -1, -4), Vec3(2, 1, 4), 16);
  EXPECT_EQ(s.dims, g.dims);
  EXPECT_DOUBLE_EQ(s.spacing, 2.0 * g.spacing);
  EXPECT_THROW(make_grid(Vec3::Zero(), Vec3::Zero(), 8), DomainError);
}

TEST(Io, AtomicWriteAndDoubleFormat)
{
  const auto dir = std::filesystem::temp_directory_path() / "beltrami_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "f.txt").string();
  write_file_atomic(path, "hello\n");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "hello");
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
  EXPECT_EQ(std::stod(format_double(0.1)), 0.1);
  std::filesystem::remove_all(dir);
}
