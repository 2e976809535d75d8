// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "beltrami/cli.hpp"
#include "beltrami/convex_body.hpp"
#include "beltrami/spherical_harmonics.hpp"

using namespace beltrami;
namespace fs = std::filesystem;

namespace
{

struct CliRun
{
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string> &args)
{
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string &name)
{
  const fs::path p = fs::temp_directory_path() / ("beltrami_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path &p)
{
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string value_of(const std::string &text, const std::string &key)
{
  const std::size_t at = text.find(key + "=");
  if (at == std::string::npos)
  {
    return {};
  }
  const std::size_t from = at + key.size() + 1;
  return text.substr(from, text.find('\n', from) - from);
}

}  // namespace

TEST(Cli, BoundsPrintsClosedForm)
{
  const fs::path dir = scratch("bounds");
  const CliRun r = run({"bounds", "--cylinder", "1,1", "--out", dir.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NEAR(std::stod(value_of(r.out, "M")), 14.22478, 1e-5);
  EXPECT_NEAR(std::stod(value_of(r.out, "mu_lower")), 0.88342, 1e-5);
  EXPECT_LT(std::stod(value_of(r.out, "M_relative_difference")), 1e-3);
  EXPECT_EQ(slurp(dir / "bounds.txt"), r.out);
}

TEST(Cli, ConfigurationErrorsExitOne)
{
  const CliRun missing = run({"solve", "--body", "/nonexistent/body.sb"});
  EXPECT_EQ(missing.code, kExitConfig);
  EXPECT_NE(missing.err.find("/nonexistent/body.sb"), std::string::npos) << missing.err;
  EXPECT_EQ(run({"solve", "--resolution", "4"}).code, kExitConfig);
  EXPECT_EQ(run({"solve", "--shape", "torus:1,2"}).code, kExitConfig);
  EXPECT_EQ(run({"solve", "--shape", "cylinder:1,-1"}).code, kExitConfig);
  EXPECT_EQ(run({"explode"}).code, kExitConfig);
  EXPECT_EQ(run({"bounds", "--cylinder", "1"}).code, kExitConfig);
  EXPECT_EQ(run({}).code, kExitConfig);
}

TEST(Cli, ConfigFileWithFlagOverride)
{
  const fs::path dir = scratch("config");
  {
    std::ofstream cfg(dir / "run.toml");
    cfg << "cylinder = \"2,0.5\"\n";
    cfg << "out = \"" << dir.string() << "\"\n";
  }
  const CliRun a = run({"bounds", "--config", (dir / "run.toml").string()});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(value_of(a.out, "R"), "2");
  const CliRun b =
      run({"bounds", "--config", (dir / "run.toml").string(), "--cylinder", "1,1"});
  ASSERT_EQ(b.code, kExitOk) << b.err;
  EXPECT_EQ(value_of(b.out, "R"), "1");

  {
    std::ofstream bad(dir / "bad.toml");
    bad << "no_such_key = 3\n";
  }
  EXPECT_EQ(run({"bounds", "--config", (dir / "bad.toml").string()}).code, kExitConfig);
}

TEST(Cli, SolveWritesReportFieldAndTrace)
{
  const fs::path dir = scratch("solve");
  const CliRun r = run({"solve", "--shape", "ball", "--resolution", "16", "--out", dir.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const char *f : {"report.txt", "eigenfield.bfld", "trace.csv"})
  {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const std::string report = slurp(dir / "report.txt");
  EXPECT_EQ(value_of(report, "converged"), "true");
  EXPECT_EQ(value_of(report, "resolution"), "16");
  const std::string trace = slurp(dir / "trace.csv");
  EXPECT_EQ(trace[0], '#');
  EXPECT_NE(trace.find("face,axis,x,y,z,trace\n"), std::string::npos);

  const fs::path cdir = scratch("solve_cyl");
  const CliRun c = run({"solve", "--shape", "cylinder:1,1", "--resolution", "16", "--out",
                     cdir.string()});
  ASSERT_EQ(c.code, kExitOk) << c.err;
  EXPECT_EQ(value_of(slurp(cdir / "report.txt"), "bound_ok"), "true");
}

TEST(Cli, SolveLoadsBodyFile)
{
  const fs::path dir = scratch("body");
  save_support_body((dir / "b.sb").string(), SupportBody::spheroid(1.0, 1.0, 1.2, 4));
  const CliRun r = run({"solve", "--body", (dir / "b.sb").string(), "--resolution", "12", "--out",
                     dir.string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
}

TEST(Cli, UnreachableToleranceExitsTwo)
{
  const fs::path dir = scratch("tol");
  const CliRun r = run({"solve", "--resolution", "8", "--tol", "1e-300", "--out", dir.string()});
  EXPECT_EQ(r.code, kExitNoConvergence) << r.err;
}

TEST(Cli, OptimizeZeroStepAndZonalSnapshots)
{
  const fs::path dir = scratch("opt");
  const CliRun r = run({"optimize", "--shape", "spheroid:1,1,1.2", "--lmax", "4", "--resolution",
                     "16", "--step", "0", "--iterations", "2", "--axisymmetric", "--out",
                     dir.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream csv(slurp(dir / "trajectory.csv"));
  std::string line;
  std::vector<std::string> js;
  while (std::getline(csv, line))
  {
    if (line.empty() || line[0] == '#' || line.rfind("iter", 0) == 0)
    {
      continue;
    }
    std::stringstream ss(line);
    std::string iter, j;
    std::getline(ss, iter, ',');
    std::getline(ss, j, ',');
    js.push_back(j);
  }
  ASSERT_EQ(js.size(), 2u);
  EXPECT_EQ(js[0], js[1]);
  for (const char *snap : {"body_0.sb", "body_1.sb"})
  {
    ASSERT_TRUE(fs::exists(dir / snap)) << snap;
    const SupportBody b = load_support_body((dir / snap).string());
    for (int i = 0; i < b.coeffs().size(); ++i)
    {
      if (sh_order(i) != 0)
      {
        EXPECT_EQ(b.coeffs()[i], 0.0);
      }
    }
  }
  EXPECT_TRUE(fs::exists(dir / "final.sb"));
}
