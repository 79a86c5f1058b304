#pragma once

#include "magwell/normal_form.hpp"
#include "magwell/poly_diff_op.hpp"

namespace magwell {

// Graded pieces of the rescaled operator after the metaplectic chain
// (partial Fourier transform in y, shear x -> x - eta/b0, gauge phase
// exp(-i beta3/(2 b0) eta z^2)):
//
//   P(h) = P0 + h^(1/2) P2 + h^(3/4) P3 + h P4 + O(h^(5/4)),
//
// acting on functions of (x, eta, z).  Each piece is formally symmetric.
struct ReducedOperators {
  PolyDiffOp P0, P2, P3, P4;
  // Building blocks, exposed for validation:
  //   S   = x + eta/b0
  //   W   = (1/b0) Dx + (beta3/(2 b0)) z^2 - Deta      (commutes with S)
  //   Dzt = Dz + beta3 x z
  PolyDiffOp S, W, Dzt;
};

ReducedOperators build_reduced_operators(const NormalFormCoeffs& c);

}  // namespace magwell
