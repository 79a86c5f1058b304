#pragma once

#include <array>
#include <vector>

#include "magwell/discrete_op.hpp"
#include "magwell/lobpcg.hpp"
#include "magwell/normal_form.hpp"
#include "magwell/quasimode.hpp"
#include "magwell/render.hpp"

namespace magwell {

// Least squares line through (log10 x_i, log10 y_i).  Requires >= 4 strictly
// decreasing positive abscissae and positive ordinates.
struct SlopeFit {
  std::vector<double> x, y;
  double slope = 0.0;
  double intercept = 0.0;     // log10 units
  double fit_residual = 0.0;  // rms residual of log10 y
};
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

// Geometry policy for verification grids around the well (aligned frame).
// The box hugs the cutoff support (turning points + support_sigma ground
// widths) plus a small margin, so the refinement cap is spent on resolution.
struct GridPolicy {
  double support_sigma = 3.2;      // must match the render cutoff support
  double plateau_sigma = 2.0;      // render cutoff plateau (forwarded to the render)
  double margin_sigma = 0.2;       // box margin past the support, in ground widths
  double points_per_length = 8.0;  // grid points per localization length
  int min_points_per_axis = 24;
  int max_points_per_axis = 192;   // refinement cap
};

// Box and resolution covering every corrector of the mode at this h, validated
// against the field domain.  `refine` scales the resolution (1 = policy).
Grid3 quasimode_grid(const QuasimodeBundle& mode, const NormalFormCoeffs& coeffs,
                     const PolyVecField& aligned_field, double h, const GridPolicy& policy,
                     double refine = 1.0);

// ---------------------------------------------------------------------------
// Residual decay of the rendered quasimode against the discretized operator.
struct ResidualSample {
  double h = 0.0;
  double residual = 0.0;  // ||H phi - mu phi|| / ||phi||
  double mu = 0.0;
  std::array<int, 3> grid_n{};
  std::array<double, 3> spacing{};
  int refinements = 0;      // grid doublings performed for this h
  double agreement = 0.0;   // relative change at the accepted refinement
};
struct ResidualStudyOptions {
  ResidualStudyOptions() { grid.max_points_per_axis = 256; }
  std::vector<double> h_values{0.16, 0.12, 0.08, 0.06, 0.04};
  GridPolicy grid;
  double refine_factor = 1.5;    // resolution step between agreement probes
  int max_corrector = 4;         // ablation: keep u_l only for l <= this (4 = full sum)
  bool mu_leading_only = false;  // ablation: compare against the first term only
  double agreement_tol = 0.05;   // accept when two refinements agree to 5%
  int max_refinements = 3;
  int threads = 1;
};
struct ResidualStudy {
  std::vector<ResidualSample> samples;
  SlopeFit fit;
};
ResidualStudy run_residual_study(const PolyVecField& aligned_field,
                                 const NormalFormCoeffs& coeffs, const QuasimodeBundle& mode,
                                 const ResidualStudyOptions& opt);

// ---------------------------------------------------------------------------
// Lowest eigenvalues of the discretized operator against the predictions.
struct EigenCompareRow {
  double h = 0.0;
  std::vector<double> lambda;         // spacing-extrapolated, ascending
  std::vector<double> lambda_coarse;  // raw values on the two grids
  std::vector<double> lambda_fine;
  std::vector<double> mu;  // predictions of the supplied modes
  std::array<int, 3> coarse_n{}, fine_n{};
  double max_solver_residual = 0.0;
  // Second-order comparison for the first mode:
  // (lambda[0] - lambda0 h - lambda2 h^{3/2})/h^2 against lambda4.
  double normalized_h2 = 0.0;
  double rel_dev_lambda4 = 0.0;
};
struct EigenCompareOptions {
  // Coarse resolution tuned for the spacing-squared extrapolation below; warm
  // starts are rendered on a finer auxiliary grid and interpolated down.
  EigenCompareOptions() { grid.points_per_length = 5.0; }
  std::vector<double> h_values{0.2, 0.1, 0.05};
  GridPolicy grid;
  // Fine grid refines every axis by exactly refine_num/refine_den so the
  // second-order error extrapolates with a single uniform ratio.
  int refine_num = 6;
  int refine_den = 5;
  double tol = 1e-7;
  int max_iterations = 600;
  unsigned seed = 12345;
  int threads = 1;
};
struct EigenComparison {
  std::vector<EigenCompareRow> rows;
  // Smallest constant with lambda[0] <= mu + C h^{9/4} across the sampled h
  // (magnitude fit when the deviation never goes above zero).
  double fitted_C = 0.0;
  bool upper_bound_ok = false;
};
EigenComparison run_eigenvalue_comparison(const PolyVecField& aligned_field,
                                          const NormalFormCoeffs& coeffs,
                                          const std::vector<QuasimodeBundle>& modes,
                                          const EigenCompareOptions& opt);

// ---------------------------------------------------------------------------
// Near-orthonormality of the rendered quasimodes.
struct GramRow {
  double h = 0.0;
  double max_offdiag = 0.0;
  double max_diag_dev = 0.0;  // |<phi,phi> - 1| (0 by normalization)
  std::vector<double> offdiag;  // |entry| for each unordered pair, row-major
};
struct GramStudyOptions {
  std::vector<double> h_values{0.2, 0.14, 0.1, 0.07, 0.05};
  GridPolicy grid;
  int threads = 1;
};
struct GramStudy {
  std::vector<GramRow> rows;
  SlopeFit fit;  // max off-diagonal vs h
};
GramStudy run_gram_study(const PolyVecField& aligned_field, const NormalFormCoeffs& coeffs,
                         const std::vector<QuasimodeBundle>& modes, const GramStudyOptions& opt);

// ---------------------------------------------------------------------------
// Predicted spectral-gap intervals from the three-term asymptotics: the m-band
// of the cell (j,k) lies in [A(h), B(h)] with
//   A(h) = lambda0 h + lambda2 h^{3/2} + c h^2,   c = lambda4(j,k,0) - margin,
//   B(h) = lambda0 h + lambda2 h^{3/2} + C h^2,   C = lambda4(j,k,N) + margin,
// margin = half the m-spacing, so consecutive bands leave N gaps.
struct GapInterval {
  int j = 0, k = 0, N = 0;
  double lambda0 = 0.0, lambda2 = 0.0;
  double c = 0.0, C = 0.0;
  double spacing = 0.0;        // measured lambda4(m+1) - lambda4(m)
  double spacing_formula = 0.0;  // (1/b0) sqrt(d/(2a)) (2k+1)
  bool inequality_ok = false;  // C > c + spacing_formula * N
  double h_max = 0.0;          // ordering vs the (j+1,k) cell degrades above this
  double lower(double h) const;
  double upper(double h) const;
};
GapInterval predict_gaps(const NormalFormCoeffs& coeffs, const ReducedOperators& ops, int j,
                         int k, int N);

}  // namespace magwell
