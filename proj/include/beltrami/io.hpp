// SPDX-License-Identifier: Apache-2.0

#ifndef BELTRAMI_IO_HPP
#define BELTRAMI_IO_HPP

#include <string>
#include <string_view>

namespace beltrami
{

// Writes `contents` to `path` through a sibling temporary file and a rename, so readers
// never observe a partially written file.
void write_file_atomic(const std::string &path, std::string_view contents);

// Decimal form of a double with 17 significant digits.
std::string format_double(double value);

}  // namespace beltrami

#endif  // BELTRAMI_IO_HPP
