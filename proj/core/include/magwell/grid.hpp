#pragma once

#include <array>
#include <cstddef>

#include "magwell/field.hpp"

namespace magwell {

// Uniform tensor grid of interior points on an axis-aligned box; homogeneous
// Dirichlet conditions are imposed by omitting the boundary layer.
struct Grid3 {
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};
  std::array<int, 3> n{};      // interior points per axis (>= 8)
  std::array<double, 3> dx{};  // spacing = extent/(n+1)

  static Grid3 make(const std::array<double, 3>& lo, const std::array<double, 3>& hi,
                    const std::array<int, 3>& n);

  std::size_t size() const {
    return std::size_t(n[0]) * std::size_t(n[1]) * std::size_t(n[2]);
  }
  // x fastest, then y, then z.
  std::size_t index(int i, int j, int k) const {
    return std::size_t(i) + std::size_t(n[0]) * (std::size_t(j) + std::size_t(n[1]) * k);
  }
  std::array<double, 3> point(int i, int j, int k) const {
    return {lo[0] + dx[0] * (i + 1), lo[1] + dx[1] * (j + 1), lo[2] + dx[2] * (k + 1)};
  }
};

// Grid centered at `center` with the given half extents, validated against the
// field domain and a minimum margin (in localization lengths) around the well.
Grid3 make_well_grid(const std::array<double, 3>& center,
                     const std::array<double, 3>& half_extent,
                     const std::array<int, 3>& points, const DomainBox& domain,
                     const std::array<double, 3>& localization_length,
                     double min_margin_lengths = 4.0);

}  // namespace magwell
