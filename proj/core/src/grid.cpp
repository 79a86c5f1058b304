#include "magwell/grid.hpp"

#include "magwell/errors.hpp"

namespace magwell {

Grid3 Grid3::make(const std::array<double, 3>& lo, const std::array<double, 3>& hi,
                  const std::array<int, 3>& n) {
  Grid3 g;
  g.lo = lo;
  g.hi = hi;
  g.n = n;
  for (int a = 0; a < 3; ++a) {
    if (n[a] < 8) throw ConstructionError("grid needs at least 8 interior points per axis");
    if (!(hi[a] > lo[a])) throw ConstructionError("grid box has non-positive extent");
    g.dx[a] = (hi[a] - lo[a]) / double(n[a] + 1);
  }
  return g;
}

Grid3 make_well_grid(const std::array<double, 3>& center,
                     const std::array<double, 3>& half_extent,
                     const std::array<int, 3>& points, const DomainBox& domain,
                     const std::array<double, 3>& localization_length,
                     double min_margin_lengths) {
  std::array<double, 3> lo, hi;
  for (int a = 0; a < 3; ++a) {
    if (half_extent[a] < min_margin_lengths * localization_length[a]) {
      throw BoundaryError(
          "verification box margin is below the minimum number of localization lengths");
    }
    lo[a] = center[a] - half_extent[a];
    hi[a] = center[a] + half_extent[a];
    if (lo[a] < domain.min[a] || hi[a] > domain.max[a]) {
      throw BoundaryError("verification box does not fit inside the field domain");
    }
  }
  return Grid3::make(lo, hi, points);
}

}  // namespace magwell
