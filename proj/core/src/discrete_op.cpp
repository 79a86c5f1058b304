#include "magwell/discrete_op.hpp"

#include <cmath>
#include <cstdio>

#include "magwell/errors.hpp"
#include "magwell/parallel.hpp"

namespace magwell {

namespace {

// Single source of the stencil entry formulas, used by both the assembled and
// the matrix-free application.  Midpoint samples are rebuilt from the grid
// origin so the two rows sharing an edge evaluate the polynomial at the
// bitwise-identical point (exact Hermiticity).
struct StencilEntries {
  const PolyVecField& field;
  const Grid3& grid;
  double h;
  double kin[3];

  StencilEntries(const PolyVecField& f, double h_, const Grid3& g) : field(f), grid(g), h(h_) {
    for (int a = 0; a < 3; ++a) kin[a] = h * h / (g.dx[a] * g.dx[a]);
  }

  double diag(int i, int j, int k) const {
    const auto P = grid.point(i, j, k);
    const Eigen::Vector3d Av = field.eval(Eigen::Vector3d(P[0], P[1], P[2]));
    return 2.0 * (kin[0] + kin[1] + kin[2]) + Av.squaredNorm();
  }

  // Coupling to the neighbor at position+sign along `axis`.
  zval side(int axis, int i, int j, int k, double sign) const {
    const auto P = grid.point(i, j, k);
    Eigen::Vector3d M(P[0], P[1], P[2]);
    const int pos = (axis == 0 ? i : axis == 1 ? j : k);
    M[axis] = grid.lo[axis] + grid.dx[axis] * (double(pos) + 1.0 + 0.5 * sign);
    return zval(-kin[axis], sign * h * field.A[axis].eval(M) / grid.dx[axis]);
  }
};

void check_grid_inside(const PolyVecField& field, const Grid3& grid) {
  for (int a = 0; a < 3; ++a) {
    if (grid.lo[a] < field.domain.min[a] - 1e-12 || grid.hi[a] > field.domain.max[a] + 1e-12) {
      throw BoundaryError("discretize: grid box leaves the field domain");
    }
  }
}

}  // namespace

DiscreteH discretize(const PolyVecField& field, double h, const Grid3& grid, int threads) {
  if (!(h > 0.0)) throw ConstructionError("discretize: h must be positive");
  check_grid_inside(field, grid);

  DiscreteH H;
  H.grid = grid;
  H.h = h;
  H.field_name = field.name;

  const int nx = grid.n[0], ny = grid.n[1], nz = grid.n[2];
  const std::size_t N = grid.size();

  // Row pattern: z-back, y-back, x-back, diagonal, x-fwd, y-fwd, z-fwd.
  H.row_ptr.assign(N + 1, 0);
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const int deg = 1 + (i > 0) + (i + 1 < nx) + (j > 0) + (j + 1 < ny) + (k > 0) +
                        (k + 1 < nz);
        H.row_ptr[grid.index(i, j, k) + 1] = deg;
      }
    }
  }
  for (std::size_t r = 0; r < N; ++r) H.row_ptr[r + 1] += H.row_ptr[r];
  H.col.resize(std::size_t(H.row_ptr[N]));
  H.val.resize(std::size_t(H.row_ptr[N]));

  const StencilEntries S(field, h, grid);

  parallel_for(
      std::size_t(nz),
      [&](std::size_t k_lo, std::size_t k_hi) {
        for (int k = int(k_lo); k < int(k_hi); ++k) {
          for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
              const std::size_t row = grid.index(i, j, k);
              std::int64_t slot = H.row_ptr[row];
              auto put = [&](std::size_t c, zval v) {
                H.col[slot] = std::int32_t(c);
                H.val[slot] = v;
                ++slot;
              };

              if (k > 0) put(row - std::size_t(nx) * ny, S.side(2, i, j, k, -1.0));
              if (j > 0) put(row - std::size_t(nx), S.side(1, i, j, k, -1.0));
              if (i > 0) put(row - 1, S.side(0, i, j, k, -1.0));
              put(row, zval(S.diag(i, j, k), 0.0));
              if (i + 1 < nx) put(row + 1, S.side(0, i, j, k, 1.0));
              if (j + 1 < ny) put(row + std::size_t(nx), S.side(1, i, j, k, 1.0));
              if (k + 1 < nz) put(row + std::size_t(nx) * ny, S.side(2, i, j, k, 1.0));
            }
          }
        }
      },
      threads);
  return H;
}

void apply_stencil(const PolyVecField& field, double h, const Grid3& grid, const zval* in,
                   zval* out, int threads) {
  if (!(h > 0.0)) throw ConstructionError("apply_stencil: h must be positive");
  check_grid_inside(field, grid);
  const int nx = grid.n[0], ny = grid.n[1], nz = grid.n[2];
  const StencilEntries S(field, h, grid);
  parallel_for(
      std::size_t(nz),
      [&](std::size_t k_lo, std::size_t k_hi) {
        for (int k = int(k_lo); k < int(k_hi); ++k) {
          for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
              const std::size_t row = grid.index(i, j, k);
              zval acc = S.diag(i, j, k) * in[row];
              if (k > 0) acc += S.side(2, i, j, k, -1.0) * in[row - std::size_t(nx) * ny];
              if (j > 0) acc += S.side(1, i, j, k, -1.0) * in[row - std::size_t(nx)];
              if (i > 0) acc += S.side(0, i, j, k, -1.0) * in[row - 1];
              if (i + 1 < nx) acc += S.side(0, i, j, k, 1.0) * in[row + 1];
              if (j + 1 < ny) acc += S.side(1, i, j, k, 1.0) * in[row + std::size_t(nx)];
              if (k + 1 < nz) acc += S.side(2, i, j, k, 1.0) * in[row + std::size_t(nx) * ny];
              out[row] = acc;
            }
          }
        }
      },
      threads);
}

double stencil_residual_norm(const PolyVecField& field, double h, const Grid3& grid,
                             const std::vector<zval>& v, double mu, int threads) {
  if (v.size() != grid.size()) throw ConstructionError("stencil_residual_norm: size mismatch");
  std::vector<zval> y(v.size());
  apply_stencil(field, h, grid, v.data(), y.data(), threads);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    num += std::norm(y[i] - mu * v[i]);
    den += std::norm(v[i]);
  }
  if (!(den > 0.0)) throw ConstructionError("stencil_residual_norm: zero vector");
  return std::sqrt(num / den);
}

void DiscreteH::matvec(const zval* x, zval* y, int threads) const {
  const std::size_t N = dim();
  parallel_for(
      N,
      [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r) {
          zval acc(0.0, 0.0);
          for (std::int64_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) {
            acc += val[std::size_t(p)] * x[col[std::size_t(p)]];
          }
          y[r] = acc;
        }
      },
      threads);
}

std::vector<zval> DiscreteH::apply(const std::vector<zval>& x, int threads) const {
  if (x.size() != dim()) throw ConstructionError("matvec: dimension mismatch");
  std::vector<zval> y(x.size());
  matvec(x.data(), y.data(), threads);
  return y;
}

double DiscreteH::residual_norm(const std::vector<zval>& v, double mu, int threads) const {
  if (v.size() != dim()) throw ConstructionError("residual_norm: dimension mismatch");
  std::vector<zval> y = apply(v, threads);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    num += std::norm(y[i] - mu * v[i]);
    den += std::norm(v[i]);
  }
  if (!(den > 0.0)) throw ConstructionError("residual_norm: zero vector");
  return std::sqrt(num / den);
}

std::string DiscreteH::export_coo() const {
  std::string out;
  out.reserve(val.size() * 48);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%% coordinate-list hermitian %zu %zu %zu\n", dim(), dim(),
                val.size());
  out += buf;
  for (std::size_t r = 0; r + 1 < row_ptr.size(); ++r) {
    for (std::int64_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) {
      std::snprintf(buf, sizeof(buf), "%zu %d %.17g %.17g\n", r, int(col[std::size_t(p)]),
                    val[std::size_t(p)].real(), val[std::size_t(p)].imag());
      out += buf;
    }
  }
  return out;
}

double DiscreteH::hermiticity_defect() const {
  // For every stored (r, c, v) locate (c, r) and compare with conj(v).
  double worst = 0.0;
  for (std::size_t r = 0; r + 1 < row_ptr.size(); ++r) {
    for (std::int64_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) {
      const std::size_t c = std::size_t(col[std::size_t(p)]);
      zval mirror(0.0, 0.0);
      for (std::int64_t q = row_ptr[c]; q < row_ptr[c + 1]; ++q) {
        if (std::size_t(col[std::size_t(q)]) == r) {
          mirror = val[std::size_t(q)];
          break;
        }
      }
      worst = std::max(worst, std::abs(val[std::size_t(p)] - std::conj(mirror)));
    }
  }
  return worst;
}

}  // namespace magwell
