#pragma once

#include <array>
#include <complex>
#include <vector>

#include "magwell/grid.hpp"
#include "magwell/normal_form.hpp"
#include "magwell/quasimode.hpp"

namespace magwell {

// C-infinity plateau profile in a normalized radius s >= 0: identically 1 for
// s <= plateau_fraction, identically 0 for s >= support_fraction, glued by the
// standard exponential partition in between.
struct CutoffSpec {
  double plateau_fraction = 0.70;
  double support_fraction = 0.93;
};
double plateau_window(double s, const CutoffSpec& cut);

struct RenderOptions {
  bool apply_cutoff = true;
  // The cutoff is the plateau profile on an ellipsoid fitted to the mode: on
  // each axis the plateau reaches past the classical turning point by
  // plateau_sigma ground widths and the support ends at support_sigma.
  double plateau_sigma = 2.0;
  double support_sigma = 3.2;
  // Halfwidth pad beyond the turning points for the spectral quadrature, in
  // ground widths; controls the quadrature tail error.
  double tail_pad = 7.0;
  // Extra angular bandwidth margin for the spectral quadrature spacing.
  double bandwidth_pad = 4.0;
  int max_quadrature_points = 20000;
  // Minimum grid points per localization length (resolution guard).
  double min_points_per_length = 8.0;
  unsigned threads = 1;
};

// Quasimode sampled on a grid in the aligned, gauge-normalized frame.
struct RenderedQuasimode {
  Grid3 grid;
  double h = 0.0;
  QuasimodeIndices idx;
  double mu = 0.0;  // three-term eigenvalue prediction at this h
  std::vector<std::complex<double>> values;  // x fastest; sum |v|^2 dV = 1

  // Diagnostics of the back transform.
  int eta_points = 0;
  double eta_halfwidth = 0.0;
  double norm_raw = 0.0;             // grid L2 norm before normalization
  double cutoff_mass_removed = 0.0;  // relative L2 mass removed by the window
};

// Localization lengths (std-dev scale of the ground Gaussians) per axis in
// physical units: sqrt(h/b0), sqrt(h * lambda_eta), h^{1/4}/sqrt(Lambda2).
std::array<double, 3> localization_lengths(const QuasimodeBundle& mode, double h);

// Half extents that cover every corrector in the bundle through its classical
// turning points plus `lengths_pad` ground widths, including the x/eta shear
// and the y drift of the shear gauge phase.
std::array<double, 3> mode_half_extents(const QuasimodeBundle& mode,
                                        const NormalFormCoeffs& coeffs, double h,
                                        double lengths_pad);

// Samples the back-transformed quasimode sum_l h^{l/4} u_l on `grid` (aligned
// frame, well at the origin): undoes the shear gauge phase, the x-translation,
// the partial Fourier transform in y (spectral quadrature), and the
// semiclassical dilations, then applies the plateau window and normalizes.
// The grid must contain the cutoff support and resolve the localization
// lengths (ResolutionError otherwise).
RenderedQuasimode render_quasimode(const QuasimodeBundle& mode, const NormalFormCoeffs& coeffs,
                                   double h, const Grid3& grid, const RenderOptions& opt = {});

// Grid L2 inner product sum conj(a) b dV and the induced norm.
std::complex<double> grid_inner(const std::vector<std::complex<double>>& a,
                                const std::vector<std::complex<double>>& b, const Grid3& grid);
double grid_norm(const std::vector<std::complex<double>>& v, const Grid3& grid);

}  // namespace magwell
