#include "magwell/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "magwell/errors.hpp"

namespace magwell {

namespace {

// Interior points per axis so the spacing stays below
// localization_length / (points_per_length * refine), within the policy caps.
std::array<int, 3> axis_points(const std::array<double, 3>& half,
                               const std::array<double, 3>& len, const GridPolicy& policy,
                               double refine) {
  std::array<int, 3> n{};
  for (int d = 0; d < 3; ++d) {
    const double target = len[d] / (policy.points_per_length * refine);
    int pts = int(std::ceil(2.0 * half[d] / target)) - 1;
    pts = std::clamp(pts, policy.min_points_per_axis, policy.max_points_per_axis);
    n[d] = pts;
  }
  return n;
}

std::array<double, 3> union_half_extents(const std::vector<QuasimodeBundle>& modes,
                                         const NormalFormCoeffs& coeffs, double h,
                                         double pad) {
  std::array<double, 3> half{0.0, 0.0, 0.0};
  for (const auto& m : modes) {
    const auto e = mode_half_extents(m, coeffs, h, pad);
    for (int d = 0; d < 3; ++d) half[d] = std::max(half[d], e[d]);
  }
  return half;
}

std::array<double, 3> min_lengths(const std::vector<QuasimodeBundle>& modes, double h) {
  std::array<double, 3> len{std::numeric_limits<double>::infinity(),
                            std::numeric_limits<double>::infinity(),
                            std::numeric_limits<double>::infinity()};
  for (const auto& m : modes) {
    const auto l = localization_lengths(m, h);
    for (int d = 0; d < 3; ++d) len[d] = std::min(len[d], l[d]);
  }
  return len;
}

// Trilinear interpolation of a Dirichlet grid function onto another grid over
// the same box (values vanish on and outside the boundary layer).
std::vector<zval> interpolate_to(const std::vector<zval>& src, const Grid3& from,
                                 const Grid3& to) {
  const auto at = [&](int i, int j, int k) -> zval {
    if (i < 0 || j < 0 || k < 0 || i >= from.n[0] || j >= from.n[1] || k >= from.n[2]) {
      return zval(0.0, 0.0);
    }
    return src[from.index(i, j, k)];
  };
  std::vector<zval> out(to.size());
  for (int k = 0; k < to.n[2]; ++k) {
    for (int j = 0; j < to.n[1]; ++j) {
      for (int i = 0; i < to.n[0]; ++i) {
        const auto p = to.point(i, j, k);
        double w[3];
        int base[3];
        for (int d = 0; d < 3; ++d) {
          const double f = (p[d] - from.lo[d]) / from.dx[d] - 1.0;
          base[d] = int(std::floor(f));
          w[d] = f - base[d];
        }
        zval acc(0.0, 0.0);
        for (int dz = 0; dz < 2; ++dz) {
          for (int dy = 0; dy < 2; ++dy) {
            for (int dxi = 0; dxi < 2; ++dxi) {
              const double ww = (dxi ? w[0] : 1.0 - w[0]) * (dy ? w[1] : 1.0 - w[1]) *
                                (dz ? w[2] : 1.0 - w[2]);
              if (ww != 0.0) acc += ww * at(base[0] + dxi, base[1] + dy, base[2] + dz);
            }
          }
        }
        out[to.index(i, j, k)] = acc;
      }
    }
  }
  return out;
}

}  // namespace

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConstructionError("fit_loglog: size mismatch");
  if (x.size() < 4) throw ConstructionError("fit_loglog: needs at least 4 samples");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ConstructionError("fit_loglog: non-positive data");
    if (i + 1 < x.size() && !(x[i + 1] < x[i])) {
      throw ConstructionError("fit_loglog: abscissae must decrease strictly");
    }
  }
  SlopeFit out;
  out.x = x;
  out.y = y;
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log10(x[i]);
    ly[i] = std::log10(y[i]);
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) throw ConstructionError("fit_loglog: degenerate abscissae");
  out.slope = (n * sxy - sx * sy) / denom;
  out.intercept = (sy - out.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (out.intercept + out.slope * lx[i]);
    ss += r * r;
  }
  out.fit_residual = std::sqrt(ss / n);
  return out;
}

Grid3 quasimode_grid(const QuasimodeBundle& mode, const NormalFormCoeffs& coeffs,
                     const PolyVecField& aligned_field, double h, const GridPolicy& policy,
                     double refine) {
  const auto half =
      mode_half_extents(mode, coeffs, h, policy.support_sigma + policy.margin_sigma);
  const auto len = localization_lengths(mode, h);
  const auto n = axis_points(half, len, policy, refine);
  return make_well_grid({0.0, 0.0, 0.0}, half, n, aligned_field.domain, len);
}

ResidualStudy run_residual_study(const PolyVecField& aligned_field,
                                 const NormalFormCoeffs& coeffs, const QuasimodeBundle& mode,
                                 const ResidualStudyOptions& opt) {
  if (opt.max_corrector < 0 || opt.max_corrector > 4) {
    throw ConstructionError("residual study: max_corrector must be in [0,4]");
  }
  QuasimodeBundle work = mode;
  for (int l = opt.max_corrector + 1; l <= 4; ++l) {
    work.u[std::size_t(l)] = work.u[std::size_t(l)] * cplx(0.0, 0.0);
  }
  RenderOptions ropt;
  ropt.threads = unsigned(std::max(1, opt.threads));
  ropt.support_sigma = opt.grid.support_sigma;
  ropt.plateau_sigma = opt.grid.plateau_sigma;

  ResidualStudy out;
  std::vector<double> hs, rs;
  for (const double h : opt.h_values) {
    const double mu = opt.mu_leading_only ? work.lambda0 * h : work.mu(h);
    const auto measure = [&](const Grid3& g) {
      const RenderedQuasimode rq = render_quasimode(work, coeffs, h, g, ropt);
      return stencil_residual_norm(aligned_field, h, g, rq.values, mu, opt.threads);
    };

    double refine = 1.0;
    Grid3 grid = quasimode_grid(work, coeffs, aligned_field, h, opt.grid, refine);
    double residual = measure(grid);
    int refinements = 0;
    double agreement = std::numeric_limits<double>::infinity();
    for (;;) {
      refine *= opt.refine_factor;
      const Grid3 finer = quasimode_grid(work, coeffs, aligned_field, h, opt.grid, refine);
      if (finer.n == grid.n) {
        std::ostringstream os;
        os << "residual study at h = " << h << ": refinement cap "
           << opt.grid.max_points_per_axis << " reached before two measurements agreed to "
           << opt.agreement_tol;
        throw InconclusiveResolution(os.str());
      }
      const double next = measure(finer);
      ++refinements;
      agreement = std::abs(next - residual) / std::max(std::abs(next), 1e-300);
      grid = finer;
      residual = next;
      if (agreement <= opt.agreement_tol) break;
      if (refinements >= opt.max_refinements) {
        std::ostringstream os;
        os << "residual study at h = " << h << ": " << refinements
           << " refinements without agreement (last change " << agreement << ")";
        throw InconclusiveResolution(os.str());
      }
    }

    ResidualSample s;
    s.h = h;
    s.residual = residual;
    s.mu = mu;
    s.grid_n = grid.n;
    s.spacing = grid.dx;
    s.refinements = refinements;
    s.agreement = agreement;
    out.samples.push_back(s);
    hs.push_back(h);
    rs.push_back(residual);
  }
  out.fit = fit_loglog(hs, rs);
  return out;
}

EigenComparison run_eigenvalue_comparison(const PolyVecField& aligned_field,
                                          const NormalFormCoeffs& coeffs,
                                          const std::vector<QuasimodeBundle>& modes,
                                          const EigenCompareOptions& opt) {
  if (modes.empty()) throw ConstructionError("eigenvalue comparison needs at least one mode");
  if (opt.refine_den < 1 || opt.refine_num <= opt.refine_den) {
    throw ConstructionError("eigenvalue comparison: refine ratio must exceed 1");
  }
  const int count = int(modes.size());

  RenderOptions ropt;
  ropt.threads = unsigned(std::max(1, opt.threads));
  ropt.support_sigma = opt.grid.support_sigma;
  ropt.plateau_sigma = opt.grid.plateau_sigma;

  EigenComparison out;
  for (const double h : opt.h_values) {
    const auto half =
        union_half_extents(modes, coeffs, h, opt.grid.support_sigma + opt.grid.margin_sigma);
    const auto len = min_lengths(modes, h);

    // Coarse/fine pair with every axis refined by exactly refine_num/refine_den,
    // so the spacing-squared error extrapolates with one uniform ratio.
    auto nc = axis_points(half, len, opt.grid, 1.0);
    std::array<int, 3> nf{};
    for (int d = 0; d < 3; ++d) {
      const int den = opt.refine_den;
      nc[d] = ((nc[d] + den) / den) * den - 1;  // (n+1) divisible by refine_den
      nf[d] = (nc[d] + 1) / den * opt.refine_num - 1;
      if (nf[d] > opt.grid.max_points_per_axis) {
        std::ostringstream os;
        os << "eigenvalue comparison at h = " << h << ": fine grid needs " << nf[d]
           << " points on axis " << d << " (cap " << opt.grid.max_points_per_axis << ")";
        throw ResolutionError(os.str());
      }
    }
    const Grid3 gc = make_well_grid({0.0, 0.0, 0.0}, half, nc, aligned_field.domain, len);
    const Grid3 gf = make_well_grid({0.0, 0.0, 0.0}, half, nf, aligned_field.domain, len);

    // Warm starts: render on an auxiliary grid that resolves the localization
    // lengths, then interpolate onto the solver grids.
    GridPolicy render_policy = opt.grid;
    render_policy.points_per_length = std::max(8.0, opt.grid.points_per_length);
    const auto nr = axis_points(half, len, render_policy, 1.0);
    const Grid3 gr = make_well_grid({0.0, 0.0, 0.0}, half, nr, aligned_field.domain, len);
    std::vector<std::vector<zval>> warm_c, warm_f;
    for (const auto& mode : modes) {
      const RenderedQuasimode rq = render_quasimode(mode, coeffs, h, gr, ropt);
      warm_c.push_back(interpolate_to(rq.values, gr, gc));
      warm_f.push_back(interpolate_to(rq.values, gr, gf));
    }

    LobpcgOptions lopt;
    lopt.count = count;
    lopt.tol = opt.tol;
    lopt.max_iterations = opt.max_iterations;
    lopt.block_extra = 2;
    lopt.seed = opt.seed;
    lopt.threads = opt.threads;

    EigenCompareRow row;
    row.h = h;
    row.coarse_n = gc.n;
    row.fine_n = gf.n;
    {
      const DiscreteH Hc = discretize(aligned_field, h, gc, opt.threads);
      lopt.initial_guess = &warm_c;
      for (const auto& p : lowest_eigenpairs(Hc, lopt)) {
        row.lambda_coarse.push_back(p.value);
        row.max_solver_residual = std::max(row.max_solver_residual, p.residual);
      }
    }
    {
      const DiscreteH Hf = discretize(aligned_field, h, gf, opt.threads);
      lopt.initial_guess = &warm_f;
      for (const auto& p : lowest_eigenpairs(Hf, lopt)) {
        row.lambda_fine.push_back(p.value);
        row.max_solver_residual = std::max(row.max_solver_residual, p.residual);
      }
    }

    const double ratio = double(opt.refine_num) / double(opt.refine_den);
    const double r2 = ratio * ratio;
    for (int i = 0; i < count; ++i) {
      row.lambda.push_back((r2 * row.lambda_fine[i] - row.lambda_coarse[i]) / (r2 - 1.0));
      row.mu.push_back(modes[i].mu(h));
    }
    row.normalized_h2 =
        (row.lambda[0] - modes[0].lambda0 * h - modes[0].lambda2 * std::pow(h, 1.5)) / (h * h);
    const double scale = std::max(std::abs(modes[0].lambda4), 1e-300);
    row.rel_dev_lambda4 = std::abs(row.normalized_h2 - modes[0].lambda4) / scale;
    out.rows.push_back(std::move(row));
  }

  // Smallest constant bounding lambda[0] <= mu + C h^{9/4} over the samples.
  double max_scaled = -std::numeric_limits<double>::infinity();
  double max_abs_scaled = 0.0;
  for (const auto& row : out.rows) {
    const double dev = row.lambda[0] - row.mu[0];
    const double scale = std::pow(row.h, 2.25);
    max_scaled = std::max(max_scaled, dev / scale);
    max_abs_scaled = std::max(max_abs_scaled, std::abs(dev) / scale);
  }
  out.fitted_C = max_scaled > 0.0 ? max_scaled : max_abs_scaled;
  out.upper_bound_ok = out.fitted_C > 0.0;
  for (const auto& row : out.rows) {
    const double bound = row.mu[0] + out.fitted_C * std::pow(row.h, 2.25);
    if (row.lambda[0] > bound * (1.0 + 1e-12) + 1e-12) out.upper_bound_ok = false;
  }
  return out;
}

GramStudy run_gram_study(const PolyVecField& aligned_field, const NormalFormCoeffs& coeffs,
                         const std::vector<QuasimodeBundle>& modes,
                         const GramStudyOptions& opt) {
  if (modes.size() < 2) throw ConstructionError("gram study needs at least two modes");

  RenderOptions ropt;
  ropt.threads = unsigned(std::max(1, opt.threads));
  ropt.support_sigma = opt.grid.support_sigma;
  ropt.plateau_sigma = opt.grid.plateau_sigma;

  GramStudy out;
  std::vector<double> hs, offs;
  for (const double h : opt.h_values) {
    const auto half =
        union_half_extents(modes, coeffs, h, opt.grid.support_sigma + opt.grid.margin_sigma);
    const auto len = min_lengths(modes, h);
    const auto n = axis_points(half, len, opt.grid, 1.0);
    const Grid3 grid = make_well_grid({0.0, 0.0, 0.0}, half, n, aligned_field.domain, len);

    std::vector<std::vector<zval>> rendered;
    for (const auto& mode : modes) {
      rendered.push_back(render_quasimode(mode, coeffs, h, grid, ropt).values);
    }

    GramRow row;
    row.h = h;
    for (std::size_t a = 0; a < rendered.size(); ++a) {
      row.max_diag_dev = std::max(
          row.max_diag_dev, std::abs(std::abs(grid_inner(rendered[a], rendered[a], grid)) - 1.0));
      for (std::size_t b = a + 1; b < rendered.size(); ++b) {
        const double v = std::abs(grid_inner(rendered[a], rendered[b], grid));
        row.offdiag.push_back(v);
        row.max_offdiag = std::max(row.max_offdiag, v);
      }
    }
    hs.push_back(h);
    offs.push_back(row.max_offdiag);
    out.rows.push_back(std::move(row));
  }
  out.fit = fit_loglog(hs, offs);
  return out;
}

double GapInterval::lower(double h) const {
  return lambda0 * h + lambda2 * std::pow(h, 1.5) + c * h * h;
}

double GapInterval::upper(double h) const {
  return lambda0 * h + lambda2 * std::pow(h, 1.5) + C * h * h;
}

GapInterval predict_gaps(const NormalFormCoeffs& coeffs, const ReducedOperators& ops, int j,
                         int k, int N) {
  if (j < 0 || k < 0) throw ParseError("gap prediction: j and k must be non-negative");
  if (N < 1) throw ParseError("gap prediction: the band must contain at least one level (N >= 1)");

  const double b0 = coeffs.b0;
  const double a = coeffs.Qmat(2, 2) / (2.0 * b0);
  const double d = coeffs.Qmat.determinant() / (b0 * b0 * b0);
  const double Lambda2 = std::sqrt((2.0 * k + 1.0) * a);

  const EffectiveOperator cell = effective_for_modes(coeffs, ops, j, k).op;

  GapInterval out;
  out.j = j;
  out.k = k;
  out.N = N;
  out.lambda0 = (2.0 * k + 1.0) * b0;
  out.lambda2 = (2.0 * j + 1.0) * Lambda2;
  out.spacing = cell.eigenvalue(1) - cell.eigenvalue(0);
  out.spacing_formula = (2.0 * k + 1.0) / b0 * std::sqrt(d / (2.0 * a));
  const double margin = 0.5 * out.spacing;
  out.c = cell.eigenvalue(0) - margin;
  out.C = cell.eigenvalue(N) + margin;
  out.inequality_ok = out.C > out.c + out.spacing_formula * double(N);

  // The window is meaningful while the (j+1,k) band (one slow-oscillator level
  // up, entering at order h^{3/2}) stays above the top of this one.
  const EffectiveOperator next = effective_for_modes(coeffs, ops, j + 1, k).op;
  const double next_spacing = next.eigenvalue(1) - next.eigenvalue(0);
  const double c_next = next.eigenvalue(0) - 0.5 * next_spacing;
  const double rise = 2.0 * Lambda2;  // lambda2 gap between the cells
  if (out.C <= c_next) {
    out.h_max = 1.0;
  } else {
    const double root = rise / (out.C - c_next);
    out.h_max = std::min(1.0, root * root);
  }
  return out;
}

}  // namespace magwell
