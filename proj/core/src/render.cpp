#include "magwell/render.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "magwell/errors.hpp"
#include "magwell/parallel.hpp"

namespace magwell {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Values h_m(t) for m = 0..M at fixed scale, via the orthonormal recurrence
// (overflow-safe for any mode the basis admits).
void hermite_column(double lambda, int M, double t, double* out) {
  const double root = std::sqrt(lambda);
  const double u = root * t;
  double prev = 0.0;
  double cur = std::pow(kPi, -0.25) * std::exp(-0.5 * u * u);
  for (int m = 0; m <= M; ++m) {
    out[m] = root * std::sqrt(HermiteBasis::weight(m)) * cur;
    const double next =
        std::sqrt(2.0 / (m + 1)) * u * cur - std::sqrt(double(m) / (m + 1)) * prev;
    prev = cur;
    cur = next;
  }
}

double turning_point(double lambda, int max_mode) {
  return std::sqrt((2.0 * max_mode + 1.0) / lambda);
}

struct FlatKey {
  int a;  // x mode
  int m;  // eta mode
  int c;  // z mode
  cplx coeff;
};

}  // namespace

double plateau_window(double s, const CutoffSpec& cut) {
  const double a = cut.plateau_fraction;
  const double b = cut.support_fraction;
  if (!(a > 0.0) || !(b > a)) {
    throw ConstructionError("plateau window requires 0 < plateau_fraction < support_fraction");
  }
  if (s <= a) return 1.0;
  if (s >= b) return 0.0;
  const auto g = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double t = (s - a) / (b - a);
  const double up = g(1.0 - t);
  return up / (up + g(t));
}

std::array<double, 3> localization_lengths(const QuasimodeBundle& mode, double h) {
  if (!(h > 0.0)) throw ConstructionError("localization_lengths: h must be positive");
  const double lx = mode.u[0].lambda(Var::X);
  const double le = mode.u[0].lambda(Var::Eta);
  const double lz = mode.u[0].lambda(Var::Z);
  const double root_h = std::sqrt(h);
  return {root_h / std::sqrt(lx), root_h * std::sqrt(le), std::pow(h, 0.25) / std::sqrt(lz)};
}

std::array<double, 3> mode_half_extents(const QuasimodeBundle& mode,
                                        const NormalFormCoeffs& coeffs, double h,
                                        double lengths_pad) {
  if (!(h > 0.0)) throw ConstructionError("mode_half_extents: h must be positive");
  const double lx = mode.u[0].lambda(Var::X);
  const double le = mode.u[0].lambda(Var::Eta);
  const double lz = mode.u[0].lambda(Var::Z);
  int kx = 0, ke = 0, kz = 0;
  for (const auto& u : mode.u) {
    kx = std::max(kx, u.max_index(Var::X));
    ke = std::max(ke, u.max_index(Var::Eta));
    kz = std::max(kz, u.max_index(Var::Z));
  }
  const double b0 = coeffs.b0;
  const double theta = coeffs.beta3() / (2.0 * b0);
  const double eta_turn = turning_point(le, ke);
  const double z_turn = turning_point(lz, kz) + lengths_pad / std::sqrt(lz);
  // x spreads by its own turning point plus the shear offset eta/b0.
  const double x_half = turning_point(lx, kx) + eta_turn / b0 + lengths_pad / std::sqrt(lx);
  // y width of the transform: chirped-Gaussian width scaled by the mode count,
  // plus the drift of the y center from the shear gauge phase. The drift uses
  // the bare turning point: past it the amplitude decays faster than the
  // quadratic drift grows, and the pad already covers the tail linearly.
  const double kappa = std::abs(mode.h5.B) / mode.h5.A;
  const double y_std = std::sqrt((le * le + kappa * kappa) / le);
  const double z_core = turning_point(lz, kz);
  const double y_half = y_std * (std::sqrt(2.0 * ke + 1.0) + lengths_pad) +
                        std::abs(theta) * z_core * z_core;
  const double root_h = std::sqrt(h);
  return {root_h * x_half, root_h * y_half, std::pow(h, 0.25) * z_turn};
}

std::complex<double> grid_inner(const std::vector<std::complex<double>>& a,
                                const std::vector<std::complex<double>>& b, const Grid3& grid) {
  if (a.size() != grid.size() || b.size() != grid.size()) {
    throw ConstructionError("grid_inner: vector size does not match grid");
  }
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * (grid.dx[0] * grid.dx[1] * grid.dx[2]);
}

double grid_norm(const std::vector<std::complex<double>>& v, const Grid3& grid) {
  return std::sqrt(std::abs(grid_inner(v, v, grid)));
}

RenderedQuasimode render_quasimode(const QuasimodeBundle& mode, const NormalFormCoeffs& coeffs,
                                   double h, const Grid3& grid, const RenderOptions& opt) {
  if (!(h > 0.0)) throw ConstructionError("render_quasimode: h must be positive");

  // Resolution guard: the grid has to resolve the semiclassical widths.
  const auto len = localization_lengths(mode, h);
  for (int d = 0; d < 3; ++d) {
    const double required = len[d] / opt.min_points_per_length;
    if (grid.dx[d] > required) {
      std::ostringstream os;
      os << "render_quasimode: grid spacing " << grid.dx[d] << " on axis " << d
         << " exceeds the required " << required << " (" << opt.min_points_per_length
         << " points per localization length " << len[d] << ")";
      throw ResolutionError(os.str());
    }
  }

  // Combined expansion sum_l h^{l/4} u_l, flattened for the sweep below.
  TensorHermiteExpansion total = mode.u[0];
  for (int l = 1; l < 5; ++l) total += mode.u[l] * cplx(std::pow(h, 0.25 * l), 0.0);
  total = total.pruned(1e-14);
  if (total.empty()) throw ConstructionError("render_quasimode: empty expansion");

  std::vector<FlatKey> keys;
  keys.reserve(total.coeffs().size());
  int max_a = 0, max_m = 0, max_c = 0;
  for (const auto& [key, coeff] : total.coeffs()) {
    keys.push_back({key[0], key[1], key[2], coeff});
    max_a = std::max(max_a, key[0]);
    max_m = std::max(max_m, key[1]);
    max_c = std::max(max_c, key[2]);
  }

  const double lx = total.lambda(Var::X);
  const double le = total.lambda(Var::Eta);
  const double lz = total.lambda(Var::Z);
  const double b0 = mode.b0;
  const double theta = coeffs.beta3() / (2.0 * b0);
  const double root_h = std::sqrt(h);
  const double quarter_h = std::pow(h, 0.25);

  // Spectral quadrature for the inverse transform eta -> y: uniform nodes over
  // the Gaussian support, spacing below the Nyquist limit of every oscillatory
  // factor met by the integrand.
  const double L_eta = turning_point(le, max_m) + opt.tail_pad / std::sqrt(le);
  const double y_max = std::max(std::abs(grid.lo[1]), std::abs(grid.hi[1])) / root_h;
  const double z_max = std::max(std::abs(grid.lo[2]), std::abs(grid.hi[2])) / quarter_h;
  const double chirp = std::abs(mode.h5.B) / mode.h5.A;
  const double bandwidth = y_max + std::abs(theta) * z_max * z_max +
                           std::sqrt((2.0 * max_a + 1.0) * lx) / b0 +
                           std::sqrt(le * (2.0 * max_m + 1.0)) + chirp * L_eta +
                           opt.bandwidth_pad * std::max(1.0, std::sqrt(le));
  const double step_limit = kPi / bandwidth;
  const int n_eta = 2 * int(std::ceil(L_eta / step_limit)) + 1;
  if (n_eta > opt.max_quadrature_points) {
    std::ostringstream os;
    os << "render_quasimode: spectral quadrature needs " << n_eta << " nodes (cap "
       << opt.max_quadrature_points << "); the grid demands too much bandwidth";
    throw ResolutionError(os.str());
  }
  const double step = 2.0 * L_eta / (n_eta - 1);

  const int nx = grid.n[0], ny = grid.n[1], nz = grid.n[2];
  const int na = max_a + 1, nm = max_m + 1, nc = max_c + 1;

  // Per-node eta values and Hermite columns in eta.
  std::vector<double> eta(n_eta);
  std::vector<double> HN(std::size_t(n_eta) * nm);
  for (int q = 0; q < n_eta; ++q) {
    eta[q] = -L_eta + step * q;
    hermite_column(le, max_m, eta[q], &HN[std::size_t(q) * nm]);
  }

  // Collapse the eta dependence: g_q[a][c] = sum_m c_{a,m,c} h_m(eta_q).
  std::vector<cplx> g(std::size_t(n_eta) * na * nc, cplx(0.0, 0.0));
  for (const auto& fk : keys) {
    for (int q = 0; q < n_eta; ++q) {
      g[(std::size_t(q) * na + fk.a) * nc + fk.c] += fk.coeff * HN[std::size_t(q) * nm + fk.m];
    }
  }

  // Hermite columns in the sheared x argument and in z.
  std::vector<double> HX(std::size_t(n_eta) * nx * na);
  for (int q = 0; q < n_eta; ++q) {
    for (int i = 0; i < nx; ++i) {
      const double xt = (grid.lo[0] + grid.dx[0] * (i + 1)) / root_h - eta[q] / b0;
      hermite_column(lx, max_a, xt, &HX[(std::size_t(q) * nx + i) * na]);
    }
  }
  std::vector<double> HZ(std::size_t(nz) * nc);
  std::vector<double> zt(nz);
  for (int k = 0; k < nz; ++k) {
    zt[k] = (grid.lo[2] + grid.dx[2] * (k + 1)) / quarter_h;
    hermite_column(lz, max_c, zt[k], &HZ[std::size_t(k) * nc]);
  }

  // Oscillatory factor of the inverse transform, with the quadrature weight
  // and the (2 pi)^{-1/2} normalization folded in.
  std::vector<cplx> PY(std::size_t(n_eta) * ny);
  const double weight = step / std::sqrt(2.0 * kPi);
  for (int q = 0; q < n_eta; ++q) {
    for (int j = 0; j < ny; ++j) {
      const double yt = (grid.lo[1] + grid.dx[1] * (j + 1)) / root_h;
      PY[std::size_t(q) * ny + j] = std::polar(weight, eta[q] * yt);
    }
  }

  RenderedQuasimode out;
  out.grid = grid;
  out.h = h;
  out.idx = mode.idx;
  out.mu = mode.mu(h);
  out.eta_points = n_eta;
  out.eta_halfwidth = L_eta;
  out.values.assign(grid.size(), cplx(0.0, 0.0));

  parallel_for(
      std::size_t(nz),
      [&](std::size_t klo, std::size_t khi) {
        std::vector<cplx> M(na);
        std::vector<cplx> V(std::size_t(n_eta) * nx);
        for (std::size_t k = klo; k < khi; ++k) {
          // V[q][i]: integrand value at (x_i, eta_q, z_k) including the shear
          // gauge phase exp(-i theta eta z^2).
          for (int q = 0; q < n_eta; ++q) {
            const cplx* gq = &g[std::size_t(q) * na * nc];
            const double* hz = &HZ[k * nc];
            for (int a = 0; a < na; ++a) {
              cplx s = 0.0;
              for (int c = 0; c < nc; ++c) s += gq[std::size_t(a) * nc + c] * hz[c];
              M[a] = s;
            }
            const cplx phase = std::polar(1.0, -theta * eta[q] * zt[k] * zt[k]);
            const double* hx = &HX[std::size_t(q) * nx * na];
            for (int i = 0; i < nx; ++i) {
              cplx s = 0.0;
              for (int a = 0; a < na; ++a) s += M[a] * hx[std::size_t(i) * na + a];
              V[std::size_t(q) * nx + i] = phase * s;
            }
          }
          for (int j = 0; j < ny; ++j) {
            cplx* row = &out.values[grid.index(0, j, int(k))];
            for (int q = 0; q < n_eta; ++q) {
              const cplx f = PY[std::size_t(q) * ny + j];
              const cplx* vq = &V[std::size_t(q) * nx];
              for (int i = 0; i < nx; ++i) row[i] += f * vq[i];
            }
          }
        }
      },
      opt.threads);

  const double full_norm = grid_norm(out.values, grid);
  if (!(full_norm > 0.0)) throw ConstructionError("render_quasimode: zero render");
  out.norm_raw = full_norm;

  if (opt.apply_cutoff) {
    // Ellipsoidal plateau window fitted to the mode: full strength out to the
    // turning points plus plateau_sigma ground widths on every axis, gone at
    // support_sigma. The grid box must contain the support.
    const auto support = mode_half_extents(mode, coeffs, h, opt.support_sigma);
    const auto plateau = mode_half_extents(mode, coeffs, h, opt.plateau_sigma);
    double ratio = 0.0;
    for (int d = 0; d < 3; ++d) {
      ratio = std::max(ratio, plateau[d] / support[d]);
      const double box = std::min(-grid.lo[d], grid.hi[d]);
      if (box < support[d] * (1.0 - 1e-9)) {
        std::ostringstream os;
        os << "render_quasimode: grid box " << box << " on axis " << d
           << " does not contain the cutoff support " << support[d];
        throw ResolutionError(os.str());
      }
    }
    const CutoffSpec spec{ratio, 1.0};
    for (int k = 0; k < nz; ++k) {
      for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
          const auto p = grid.point(i, j, k);
          double s2 = 0.0;
          for (int d = 0; d < 3; ++d) {
            const double r = p[d] / support[d];
            s2 += r * r;
          }
          out.values[grid.index(i, j, k)] *= plateau_window(std::sqrt(s2), spec);
        }
      }
    }
  }

  const double cut_norm = grid_norm(out.values, grid);
  if (!(cut_norm > 0.0)) throw ConstructionError("render_quasimode: cutoff removed the mode");
  out.cutoff_mass_removed = 1.0 - (cut_norm * cut_norm) / (full_norm * full_norm);
  const double inv = 1.0 / cut_norm;
  for (auto& v : out.values) v *= inv;
  return out;
}

}  // namespace magwell
