// SPDX-License-Identifier: Apache-2.0

#ifndef BELTRAMI_VERIFY_HPP
#define BELTRAMI_VERIFY_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace beltrami
{

struct VerifyCheck
{
  std::string name;
  double value = 0.0;
  std::string relation;  // "<=" or ">="
  double threshold = 0.0;
  bool pass = false;
};

struct VerifyReport
{
  int resolution = 0;
  std::uint64_t seed = 0;
  std::vector<VerifyCheck> checks;

  bool all_pass() const;
};

struct VerifyOptions
{
  int resolution = 24;
  std::uint64_t seed = 1;
  double tol = 1e-6;
};

// Scaling, monotonicity, volume and cylinder lower bounds, the helicity identity,
// projector and operator algebra, Hausdorff axioms and the Lipschitz inequality for the
// gamma distance, each as one row with its threshold.
VerifyReport run_verify(const VerifyOptions &options);

// Fixed-width table followed by "all_pass=true|false". Deterministic for a given report.
void write_verify_report(std::ostream &os, const VerifyReport &report);

}  // namespace beltrami

#endif  // BELTRAMI_VERIFY_HPP
