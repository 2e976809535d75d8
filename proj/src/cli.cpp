// SPDX-License-Identifier: Apache-2.0

#include "beltrami/cli.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <variant>

#include "beltrami/bounds.hpp"
#include "beltrami/convex_body.hpp"
#include "beltrami/domain_grid.hpp"
#include "beltrami/gamma_metric.hpp"
#include "beltrami/io.hpp"
#include "beltrami/shape_opt.hpp"
#include "beltrami/spectral.hpp"
#include "beltrami/verify.hpp"

namespace beltrami
{

namespace
{

struct RunConfig
{
  std::string command;
  std::string shape = "ball";
  std::string body_path;
  int resolution = 24;
  int lmax = 6;
  std::uint64_t seed = 1;
  double tol = 1e-6;
  std::string out_dir = ".";
  bool axisymmetric = false;
  double step = 0.05;
  int iterations = 10;
  int snapshot_every = 1;
  bool no_fallback = false;
  std::string cylinder = "1,1";
  std::string pair = "ball:0.5,ball:0.55";
  int samples = 8;
  int kmax = 2;
  bool quick = false;
};

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// A parsed --shape value: either a support body or a cylinder.
using Shape = std::variant<SupportBody, CylinderSpec>;

std::vector<double> parse_numbers(const std::string &text, const std::string &what)
{
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    try
    {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size())
      {
        throw std::invalid_argument(item);
      }
    }
    catch (const std::exception &)
    {
      throw ConfigError("malformed number '" + item + "' in " + what);
    }
  }
  return v;
}

Shape parse_shape(const std::string &spec, int lmax)
{
  const std::size_t colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  const std::vector<double> v = args.empty() ? std::vector<double>{} : parse_numbers(args, spec);
  try
  {
    if (kind == "ball" && v.size() <= 1)
    {
      return SupportBody::ball(v.empty() ? 1.0 : v[0], lmax);
    }
    if (kind == "spheroid" && v.size() == 3)
    {
      return SupportBody::spheroid(v[0], v[1], v[2], lmax);
    }
    if (kind == "cylinder" && v.size() == 2)
    {
      if (!(v[0] > 0.0 && v[1] > 0.0))
      {
        throw DomainError("cylinder radius and half-height must be positive");
      }
      CylinderSpec c;
      c.radius = v[0];
      c.half_height = v[1];
      return c;
    }
  }
  catch (const DomainError &e)
  {
    throw ConfigError(std::string("invalid shape '") + spec + "': " + e.what());
  }
  throw ConfigError("unknown shape '" + spec +
                    "' (expected ball[:r], spheroid:a,b,c or cylinder:R,h)");
}

// "ball:0.5,ball:0.55" -> two shape strings. A new shape starts at a token beginning with
// a letter, so shapes with comma-separated parameters split correctly.
std::vector<std::string> split_pair(const std::string &text)
{
  std::vector<std::string> shapes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    if (!item.empty() && std::isalpha(static_cast<unsigned char>(item[0])))
    {
      shapes.push_back(item);
    }
    else if (!shapes.empty())
    {
      shapes.back() += "," + item;
    }
    else
    {
      throw ConfigError("malformed --pair '" + text + "'");
    }
  }
  if (shapes.size() != 2)
  {
    throw ConfigError("--pair needs exactly two shapes, got '" + text + "'");
  }
  return shapes;
}

Shape input_shape(const RunConfig &cfg)
{
  if (!cfg.body_path.empty())
  {
    try
    {
      return load_support_body(cfg.body_path);
    }
    catch (const DomainError &e)
    {
      throw ConfigError(e.what());
    }
  }
  return parse_shape(cfg.shape, cfg.lmax);
}

std::string timestamp_comment()
{
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[64];
  std::strftime(buf, sizeof(buf), "# generated %Y-%m-%dT%H:%M:%SZ\n", &tm);
  return buf;
}

std::string out_path(const RunConfig &cfg, const std::string &name)
{
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

void ensure_out_dir(const RunConfig &cfg)
{
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec)
  {
    throw ConfigError("cannot create output directory: " + cfg.out_dir);
  }
}

VoxelDomain rasterize_shape(const Shape &shape, int resolution)
{
  if (const auto *body = std::get_if<SupportBody>(&shape))
  {
    return rasterize(*body, resolution);
  }
  return rasterize_cylinder(std::get<CylinderSpec>(shape), resolution);
}

int cmd_solve(const RunConfig &cfg, std::ostream &out)
{
  const Shape shape = input_shape(cfg);
  ensure_out_dir(cfg);
  const VoxelDomain domain = rasterize_shape(shape, cfg.resolution);
  const ProjectedBiotSavart handle(domain);
  SpectralOptions opt;
  opt.seed = cfg.seed;
  opt.tol = cfg.tol;
  const SpectralResult r = first_positive_mu(handle, opt);

  std::vector<std::pair<std::string, std::string>> extra;
  extra.emplace_back("resolution", std::to_string(cfg.resolution));
  extra.emplace_back("spacing", format_double(domain.spacing()));
  extra.emplace_back("cells", std::to_string(domain.cell_count()));
  if (const auto *cyl = std::get_if<CylinderSpec>(&shape))
  {
    const double lower = cylinder_mu_lower(cyl->radius, cyl->half_height);
    extra.emplace_back("cylinder_mu_lower", format_double(lower));
    extra.emplace_back("bound_ok", r.mu1 >= lower - 0.02 ? "true" : "false");
  }
  std::ostringstream report;
  write_spectral_report(report, r, extra);
  write_file_atomic(out_path(cfg, "report.txt"), report.str());

  const CellField u = interpolate_to_cells(domain, r.eigenfield);
  std::ostringstream field;
  write_bfld(field, domain, u);
  write_file_atomic(out_path(cfg, "eigenfield.bfld"), field.str());

  const Eigen::VectorXd trace = boundary_trace_sq(domain, u);
  std::ostringstream csv;
  csv << timestamp_comment();
  csv << "face,axis,x,y,z,trace\n";
  const auto &bf = domain.boundary_faces();
  for (std::size_t i = 0; i < bf.size(); ++i)
  {
    const Vec3 c = domain.face_centroid(bf[i]);
    csv << bf[i] << ',' << domain.faces()[bf[i]].axis << ',' << format_double(c.x()) << ','
        << format_double(c.y()) << ',' << format_double(c.z()) << ','
        << format_double(trace[static_cast<Eigen::Index>(i)]) << '\n';
  }
  write_file_atomic(out_path(cfg, "trace.csv"), csv.str());

  out << report.str();
  return r.converged ? kExitOk : kExitNoConvergence;
}

int cmd_optimize(const RunConfig &cfg, std::ostream &out)
{
  const Shape shape = input_shape(cfg);
  const auto *body = std::get_if<SupportBody>(&shape);
  if (!body)
  {
    throw ConfigError("optimize needs a support body (ball, spheroid or --body)");
  }
  if (cfg.resolution < 16)
  {
    throw ConfigError("optimize needs --resolution >= 16");
  }
  if (!(cfg.step >= 0.0))
  {
    throw ConfigError("--step must be nonnegative");
  }
  ensure_out_dir(cfg);
  OptConfig oc;
  oc.lmax = cfg.lmax;
  oc.axisymmetric = cfg.axisymmetric;
  oc.resolution = cfg.resolution;
  oc.step = cfg.step;
  oc.max_iterations = cfg.iterations;
  oc.seed = cfg.seed;
  oc.tol = cfg.tol;
  oc.fallback = !cfg.no_fallback;
  oc.snapshot_every = cfg.snapshot_every;
  oc.snapshot_dir = cfg.out_dir;
  const OptTrajectory traj = optimize(oc, *body);

  std::ostringstream csv;
  csv << timestamp_comment();
  write_trajectory_csv(csv, traj,
                       "noise_J=" + format_double(traj.noise.J) +
                           " noise_variance=" + format_double(traj.noise.variance) +
                           " stop=" + traj.stop_reason);
  write_file_atomic(out_path(cfg, "trajectory.csv"), csv.str());
  std::ostringstream final_body;
  write_support_body(final_body, traj.final_body);
  write_file_atomic(out_path(cfg, "final.sb"), final_body.str());

  out << "iterations=" << traj.records.size() << '\n';
  out << "final_J=" << format_double(traj.final_J) << '\n';
  out << "stop_reason=" << traj.stop_reason << '\n';
  bool converged = true;
  for (const OptRecord &r : traj.records)
  {
    converged = converged && r.converged;
  }
  return converged ? kExitOk : kExitNoConvergence;
}

int cmd_bounds(const RunConfig &cfg, std::ostream &out)
{
  const std::vector<double> v = parse_numbers(cfg.cylinder, "--cylinder");
  if (v.size() != 2 || !(v[0] > 0.0 && v[1] > 0.0))
  {
    throw ConfigError("--cylinder needs two positive numbers R,h");
  }
  const CylinderBound b = cylinder_bound(v[0], v[1]);
  const double quad = cylinder_M_quadrature(v[0], v[1]);
  const double volume = 2.0 * kPi * v[0] * v[0] * v[1];
  std::ostringstream os;
  os << "R=" << format_double(v[0]) << '\n';
  os << "h=" << format_double(v[1]) << '\n';
  os << "M=" << format_double(b.M) << '\n';
  os << "mu_lower=" << format_double(b.mu_lower) << '\n';
  os << "M_quadrature=" << format_double(quad) << '\n';
  os << "M_relative_difference=" << format_double(std::abs(quad / b.M - 1.0)) << '\n';
  os << "cylinder_volume=" << format_double(volume) << '\n';
  os << "faber_krahn_bound=" << format_double(faber_krahn_bound(volume)) << '\n';
  os << "ball_mu_reference=" << format_double(ball_mu_reference(1.0)) << '\n';
  ensure_out_dir(cfg);
  write_file_atomic(out_path(cfg, "bounds.txt"), os.str());
  out << os.str();
  return kExitOk;
}

int cmd_gamma(const RunConfig &cfg, std::ostream &out)
{
  const std::vector<std::string> names = split_pair(cfg.pair);
  if (cfg.kmax < 1)
  {
    throw ConfigError("--k must be at least 1");
  }
  ensure_out_dir(cfg);
  const BoxDomain box(Vec3::Constant(-1.0), Vec3::Constant(1.0), cfg.resolution);
  std::vector<std::unique_ptr<SubdomainOperator>> ops;
  for (const std::string &name : names)
  {
    const Shape s = parse_shape(name, cfg.lmax);
    VoxelDomain d = std::holds_alternative<SupportBody>(s)
                        ? box.rasterize(std::get<SupportBody>(s))
                        : rasterize_cylinder(std::get<CylinderSpec>(s), box.grid());
    try
    {
      ops.push_back(std::make_unique<SubdomainOperator>(box, std::move(d)));
    }
    catch (const DomainError &e)
    {
      throw ConfigError("shape '" + name + "' does not fit the box [-1,1]^3: " + e.what());
    }
  }
  const double tol = std::min(cfg.tol, 1e-8);
  const SeedSequence seeds(cfg.seed);
  const std::uint64_t gseed = seeds.child("gamma").seed();
  const GammaEstimate g = gamma_distance(box, *ops[0], *ops[1], gseed, cfg.samples, tol);
  std::vector<LipschitzReport> checks;
  for (int k = 1; k <= cfg.kmax; ++k)
  {
    checks.push_back(lipschitz_check(*ops[0], *ops[1], k, g, gseed, tol));
  }
  std::ostringstream os;
  os << "pair=" << cfg.pair << '\n';
  os << "resolution=" << cfg.resolution << '\n';
  write_gamma_report(os, g, checks);
  write_file_atomic(out_path(cfg, "gamma.txt"), os.str());
  out << os.str();
  return g.converged ? kExitOk : kExitNoConvergence;
}

int cmd_verify(const RunConfig &cfg, std::ostream &out)
{
  ensure_out_dir(cfg);
  VerifyOptions vo;
  vo.resolution = cfg.quick ? 16 : cfg.resolution;
  vo.seed = cfg.seed;
  vo.tol = cfg.tol;
  const VerifyReport report = run_verify(vo);
  std::ostringstream os;
  write_verify_report(os, report);
  write_file_atomic(out_path(cfg, "verify.txt"), timestamp_comment() + os.str());
  out << os.str();
  return report.all_pass() ? kExitOk : kExitNoConvergence;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
  RunConfig cfg;
  CLI::App app{"Curl eigenvalues of convex domains via the projected Biot-Savart operator",
               "beltrami"};
  app.add_option("command", cfg.command, "solve | optimize | bounds | gamma | verify")
      ->required()
      ->check(CLI::IsMember({"solve", "optimize", "bounds", "gamma", "verify"}));
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.add_option("--shape", cfg.shape, "ball[:r] | spheroid:a,b,c | cylinder:R,h");
  app.add_option("--body", cfg.body_path, "SUPPORTBODY file")->check(CLI::ExistingFile);
  app.add_option("--resolution", cfg.resolution, "cells across the largest extent")
      ->check(CLI::Range(8, 128));
  app.add_option("--lmax", cfg.lmax, "spherical-harmonic degree")->check(CLI::Range(0, 12));
  app.add_option("--seed", cfg.seed);
  app.add_option("--tol", cfg.tol, "eigensolver relative residual")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_flag("--axisymmetric", cfg.axisymmetric, "restrict the optimizer to zonal bodies");
  app.add_option("--step", cfg.step, "largest boundary move per step / mean radius");
  app.add_option("--iterations", cfg.iterations)->check(CLI::NonNegativeNumber);
  app.add_option("--snapshot-every", cfg.snapshot_every, "body snapshot period, 0 = off")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--no-fallback", cfg.no_fallback, "disable the compass-search fallback");
  app.add_option("--cylinder", cfg.cylinder, "R,h for the bounds command");
  app.add_option("--pair", cfg.pair, "two shapes inside [-1,1]^3 for the gamma command");
  app.add_option("--samples", cfg.samples, "random fields for the gamma lower bound")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--k", cfg.kmax, "check eigenvalue indices 1..k");
  app.add_flag("--quick", cfg.quick, "verify at resolution 16");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try
  {
    app.parse(reversed);
  }
  catch (const CLI::CallForHelp &)
  {
    out << app.help();
    return kExitOk;
  }
  catch (const CLI::ParseError &e)
  {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try
  {
    if (cfg.command == "solve")
    {
      return cmd_solve(cfg, out);
    }
    if (cfg.command == "optimize")
    {
      return cmd_optimize(cfg, out);
    }
    if (cfg.command == "bounds")
    {
      return cmd_bounds(cfg, out);
    }
    if (cfg.command == "gamma")
    {
      return cmd_gamma(cfg, out);
    }
    return cmd_verify(cfg, out);
  }
  catch (const ConfigError &e)
  {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  catch (const DomainError &e)
  {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  catch (const EmptyDomainError &e)
  {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  catch (const NoPositiveEigenvalueError &e)
  {
    err << "error: " << e.what() << '\n';
    return kExitNoConvergence;
  }
  catch (const ConvergenceError &e)
  {
    err << "error: " << e.what() << " (residual " << e.residual() << ")\n";
    return kExitNoConvergence;
  }
  catch (const std::exception &e)
  {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace beltrami
