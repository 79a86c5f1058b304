#pragma once

#include <array>
#include <cmath>

#include "magwell/effective_op.hpp"
#include "magwell/normal_form.hpp"
#include "magwell/reduced_ops.hpp"
#include "magwell/tensor_expansion.hpp"

namespace magwell {

// Mode indices: k transverse oscillator level, j field-gradient level,
// m slow-drift level.
struct QuasimodeIndices {
  int k = 0;
  int j = 0;
  int m = 0;
};

// Solve (P0 - (2k+1) b0) u = rhs on the span of x-modes != k by dividing the
// x-mode (k+l) component by 2 l b0.  The x-mode-k component of rhs (which must
// vanish for solvability) is reported through k_component_sq.
TensorHermiteExpansion solve_x_shifts(const TensorHermiteExpansion& rhs, int k, double b0,
                                      double* k_component_sq = nullptr);
// Same along z with eigenvalue spacing 2 l Lambda2.
TensorHermiteExpansion solve_z_shifts(const TensorHermiteExpansion& rhs, int j, double Lambda2,
                                      double* j_component_sq = nullptr);

// The parts of the corrector chain that are linear in the slow profile chi:
//   u0 = phi_k chi psi_j,   u1 = phi_k v1(chi),   U2 = x-shifted part of u2.
struct ChainParts {
  TensorHermiteExpansion u0, u1, U2;
  double solvability = 0.0;  // max relative norm of components required to vanish
};
ChainParts run_chain(const ReducedOperators& ops, int k, int j, double b0, double Lambda2,
                     const HermiteExpansion& chi);

// Complete formal solution through order h: eigenvalue coefficients, the
// effective slow operator and its eigenfunction, and the correctors u0..u4
// with all five order-by-order equations certified.
struct QuasimodeBundle {
  QuasimodeIndices idx;
  double b0 = 0.0;
  double lambda_x = 0.0;  // x basis scale (= b0)
  double lambda_z = 0.0;  // z basis scale (= Lambda2)
  double Lambda2 = 0.0;   // z-mode spacing

  double lambda0 = 0.0;  // (2k+1) b0
  double lambda2 = 0.0;  // (2j+1) Lambda2
  double lambda4 = 0.0;  // m-th eigenvalue of the slow operator

  EffectiveOperator h5;
  EffectiveExtraction extraction;  // fit diagnostics for h5
  HermiteExpansion chi0;           // slow profile (eta)

  std::array<TensorHermiteExpansion, 5> u;  // u0..u4 in (x, eta, z)
  double hierarchy_residual = 0.0;          // max relative residual of the 5 equations
  double solvability = 0.0;                 // max norm of required-vanishing components

  // mu(h) = lambda0 h + lambda2 h^{3/2} + lambda4 h^2 (original operator scale).
  double mu(double h) const {
    return lambda0 * h + lambda2 * std::pow(h, 1.5) + lambda4 * h * h;
  }
  // Value of the formal eigenvalue of the rescaled operator: mu(h)/h.
  double lambda_rescaled(double h) const { return mu(h) / h; }
};

// Slow effective operator of the cell (j,k): probe extraction with the
// closed-form cross-check, without building the correctors of a specific m.
EffectiveExtraction effective_for_modes(const NormalFormCoeffs& coeffs,
                                        const ReducedOperators& ops, int j, int k);

QuasimodeBundle build_quasimode(const NormalFormCoeffs& coeffs, const ReducedOperators& ops,
                                const QuasimodeIndices& idx);

}  // namespace magwell
