#pragma once

#include <Eigen/Dense>
#include <functional>

#include "magwell/hermite.hpp"
#include "magwell/normal_form.hpp"
#include "magwell/poly_diff_op.hpp"

namespace magwell {

// Second-order operator in the slow variable,
//   A Deta^2 + B (eta Deta + Deta eta) + C eta^2 + alpha Deta + beta eta + gamma,
// with AC - B^2 > 0.  Its spectrum is an explicit arithmetic ladder and its
// eigenfunctions are generated from a complex Gaussian by a raising operator.
struct EffectiveOperator {
  double A = 1.0;
  double B = 0.0;
  double C = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  double R() const;  // sqrt(AC - B^2), throws if not positive
  // (2m+1) R + gamma - (C alpha^2 - 2 B alpha beta + A beta^2) / (4 (AC-B^2))
  double eigenvalue(int m) const;
  PolyDiffOp as_op() const;  // acting along Var::Eta
};

// Closed form of the second-order part for transverse mode k (drift and
// constant parts are not available in closed form and stay zero here).
EffectiveOperator effective_quadratic_part(const NormalFormCoeffs& c, int k);

// Recovers all six coefficients of an (assumed) operator of the above form
// from the action of `L` on the first `num_probes` Hermite basis functions,
// by least squares over the output coefficients.  The residual certifies that
// L really has this form; the imaginary parts certify real coefficients.
struct EffectiveExtraction {
  EffectiveOperator op;
  double fit_residual = 0.0;  // relative
  double max_imag = 0.0;      // largest |Im| among fitted coefficients
};
EffectiveExtraction extract_effective_operator(
    const std::function<HermiteExpansion(const HermiteExpansion&)>& L, int num_probes = 4,
    double lambda_eta = 1.0);

// m-th normalized eigenfunction as a Hermite expansion at scale R/A; built
// from the closed-form ground state by the raising operator, with the basis
// size grown until the eigen-equation residual falls below tol_rel.
HermiteExpansion effective_eigenfunction(const EffectiveOperator& op, int m,
                                         double tol_rel = 1e-12,
                                         double* residual_out = nullptr);

}  // namespace magwell
