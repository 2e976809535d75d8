// SPDX-License-Identifier: Apache-2.0

#ifndef BELTRAMI_CLI_HPP
#define BELTRAMI_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace beltrami
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNoConvergence = 2;

// Entry point of the `beltrami` executable:
//   beltrami <solve|optimize|bounds|gamma|verify> [flags]
// Returns the process exit code. Output files go to --out; the run summary goes to `out`,
// diagnostics to `err`.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace beltrami

#endif  // BELTRAMI_CLI_HPP
