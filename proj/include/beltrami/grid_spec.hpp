// SPDX-License-Identifier: Apache-2.0

#ifndef BELTRAMI_GRID_SPEC_HPP
#define BELTRAMI_GRID_SPEC_HPP

#include <array>
#include <cstddef>

#include "beltrami/common.hpp"

namespace beltrami
{

using Index3 = std::array<int, 3>;

// Uniform cell lattice: cell (i, j, k) is the cube origin + spacing * [i, i+1] x ... with
// center origin + spacing * (i + 1/2, ...). Linear indices are x-fastest.
struct GridSpec
{
  Vec3 origin = Vec3::Zero();
  double spacing = 1.0;
  Index3 dims{0, 0, 0};

  std::size_t cell_count() const
  {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  std::size_t linear(int i, int j, int k) const
  {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0]) * (j + static_cast<std::size_t>(dims[1]) * k);
  }
  Vec3 cell_center(int i, int j, int k) const
  {
    return origin + spacing * Vec3(i + 0.5, j + 0.5, k + 0.5);
  }
  double cell_volume() const { return spacing * spacing * spacing; }
};

// Grid covering the box [lo, hi] with spacing = (largest extent) / resolution. Each axis
// gets an even number of cells plus one padding layer per side, centered on the box, so
// the lattice is symmetric under reflections through the box center and scales exactly
// with the box.
GridSpec make_grid(const Vec3 &lo, const Vec3 &hi, int resolution);

}  // namespace beltrami

#endif  // BELTRAMI_GRID_SPEC_HPP
