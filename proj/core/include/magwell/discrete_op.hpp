#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "magwell/field.hpp"
#include "magwell/grid.hpp"

namespace magwell {

using zval = std::complex<double>;

// Finite-difference Dirichlet discretization of
//   (h D_1 - A_1)^2 + (h D_2 - A_2)^2 + (h D_3 - A_3)^2
// in expanded form: 7-point kinetic stencil, symmetrized first-order magnetic
// coupling with midpoint-sampled A, |A|^2 on the diagonal.  Hermitian by
// construction with a real diagonal; stored as compressed sparse rows.
class DiscreteH {
public:
  Grid3 grid;
  double h = 0.0;
  std::string field_name;

  std::size_t dim() const { return std::size_t(row_ptr.size()) - 1; }
  std::size_t nonzeros() const { return val.size(); }

  void matvec(const zval* x, zval* y, int threads = 0) const;
  std::vector<zval> apply(const std::vector<zval>& x, int threads = 0) const;

  // ||H v - mu v||_2 / ||v||_2 through one matrix application.
  double residual_norm(const std::vector<zval>& v, double mu, int threads = 0) const;

  // Coordinate-list export "row col re im" (0-based, all stored entries).
  std::string export_coo() const;

  // Largest Hermiticity defect over stored entries (0 by construction;
  // recomputed for diagnostics).
  double hermiticity_defect() const;

  std::vector<std::int64_t> row_ptr;
  std::vector<std::int32_t> col;
  std::vector<zval> val;
};

DiscreteH discretize(const PolyVecField& field, double h, const Grid3& grid, int threads = 0);

// Applies the same stencil without assembling it (entry formulas shared with
// discretize); for residual probes on grids too large to store.
void apply_stencil(const PolyVecField& field, double h, const Grid3& grid, const zval* in,
                   zval* out, int threads = 0);

// ||H v - mu v||_2 / ||v||_2 with the matrix-free application above.
double stencil_residual_norm(const PolyVecField& field, double h, const Grid3& grid,
                             const std::vector<zval>& v, double mu, int threads = 0);

}  // namespace magwell
