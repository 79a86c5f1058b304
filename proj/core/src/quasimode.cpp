#include "magwell/quasimode.hpp"

#include <algorithm>
#include <cmath>

#include "magwell/errors.hpp"

namespace magwell {

namespace {

double key_weight(const TensorHermiteExpansion& e, const TensorHermiteExpansion::Key& k) {
  double w = 1.0;
  for (int i = 0; i < 3; ++i) {
    if (e.active_mask()[i]) w *= HermiteBasis::weight(k[i]);
  }
  return w;
}

TensorHermiteExpansion solve_mode_shifts(const TensorHermiteExpansion& rhs, Var v, int base,
                                         double spacing, double* base_component_sq) {
  TensorHermiteExpansion out = TensorHermiteExpansion::zero_like(rhs);
  double acc = 0.0;
  const int axis = vix(v);
  for (const auto& [key, c] : rhs.coeffs()) {
    const int l = key[axis] - base;
    if (l == 0) {
      acc += std::norm(c) * key_weight(rhs, key);
      continue;
    }
    out.add(key, c / (2.0 * l * spacing));
  }
  if (base_component_sq) *base_component_sq = acc;
  return out;
}

}  // namespace

TensorHermiteExpansion solve_x_shifts(const TensorHermiteExpansion& rhs, int k, double b0,
                                      double* k_component_sq) {
  return solve_mode_shifts(rhs, Var::X, k, b0, k_component_sq);
}

TensorHermiteExpansion solve_z_shifts(const TensorHermiteExpansion& rhs, int j, double Lambda2,
                                      double* j_component_sq) {
  return solve_mode_shifts(rhs, Var::Z, j, Lambda2, j_component_sq);
}

ChainParts run_chain(const ReducedOperators& ops, int k, int j, double b0, double Lambda2,
                     const HermiteExpansion& chi) {
  ChainParts cp;
  TensorHermiteExpansion ce = TensorHermiteExpansion::from_1d(Var::Eta, chi);
  cp.u0 = ce.tensor_with_mode(Var::X, b0, k).tensor_with_mode(Var::Z, Lambda2, j);
  const double u0n = std::max(cp.u0.norm_sq(), 1e-300);

  // Order h^(1/2): (P0 - lambda0) u2 = lambda2 u0 - P2 u0; keep the x-shifted
  // part, the x-mode-k component must cancel on its own.
  const double l2 = (2.0 * j + 1.0) * Lambda2;
  TensorHermiteExpansion rhs2 = cp.u0 * cplx(l2, 0.0) - ops.P2.apply(cp.u0);
  double ksq = 0.0;
  cp.U2 = solve_x_shifts(rhs2, k, b0, &ksq);

  // Order h^(3/4) solvability: (h3 - lambda2) v1 = - <P3 u0>_k, whose z-mode-j
  // component must vanish (it is odd in z).
  TensorHermiteExpansion g = ops.P3.apply(cp.u0).project(Var::X, k) * cplx(-1.0, 0.0);
  double jsq = 0.0;
  TensorHermiteExpansion v1 = solve_z_shifts(g, j, Lambda2, &jsq);
  cp.u1 = v1.tensor_with_mode(Var::X, b0, k);

  cp.solvability = std::sqrt(std::max(ksq, jsq) / u0n);
  return cp;
}

EffectiveExtraction effective_for_modes(const NormalFormCoeffs& coeffs,
                                        const ReducedOperators& ops, int j, int k) {
  if (k < 0 || j < 0) throw ConstructionError("quasimode indices must be non-negative");
  const double b0 = coeffs.b0;
  const double q33 = coeffs.Qmat(2, 2);
  if (!(q33 > 0.0)) throw ConstructionError("axial curvature coefficient must be positive");
  const double Lambda2 = std::sqrt((2.0 * k + 1.0) * q33 / (2.0 * b0));

  // Extract the slow operator by probing the solvability map with low modes.
  auto L = [&](const HermiteExpansion& chi) {
    ChainParts cp = run_chain(ops, k, j, b0, Lambda2, chi);
    TensorHermiteExpansion w =
        ops.P4.apply(cp.u0) + ops.P3.apply(cp.u1) + ops.P2.apply(cp.U2);
    return to_1d(w.project(Var::X, k).project(Var::Z, j), Var::Eta);
  };
  EffectiveExtraction ex = extract_effective_operator(L, 4, 1.0);

  const double scale =
      std::max({1.0, std::abs(ex.op.A), std::abs(ex.op.B), std::abs(ex.op.C),
                std::abs(ex.op.alpha), std::abs(ex.op.beta), std::abs(ex.op.gamma)});
  if (ex.fit_residual > 1e-8 || ex.max_imag > 1e-8 * scale) {
    throw ConstructionError("slow operator extraction failed its consistency fit");
  }
  // Independent closed forms for the second-order part.
  EffectiveOperator cf = effective_quadratic_part(coeffs, k);
  const double tol = 1e-8 * scale;
  if (std::abs(ex.op.A - cf.A) > tol || std::abs(ex.op.B - cf.B) > tol ||
      std::abs(ex.op.C - cf.C) > tol) {
    throw ConstructionError("slow operator disagrees with its closed-form quadratic part");
  }
  return ex;
}

QuasimodeBundle build_quasimode(const NormalFormCoeffs& coeffs, const ReducedOperators& ops,
                                const QuasimodeIndices& idx) {
  if (idx.k < 0 || idx.j < 0 || idx.m < 0) {
    throw ConstructionError("quasimode indices must be non-negative");
  }
  QuasimodeBundle B;
  B.idx = idx;
  B.b0 = coeffs.b0;
  const double b0 = coeffs.b0;
  const double q33 = coeffs.Qmat(2, 2);
  if (!(q33 > 0.0)) throw ConstructionError("axial curvature coefficient must be positive");
  B.lambda_x = b0;
  B.Lambda2 = std::sqrt((2.0 * idx.k + 1.0) * q33 / (2.0 * b0));
  B.lambda_z = B.Lambda2;
  B.lambda0 = (2.0 * idx.k + 1.0) * b0;
  B.lambda2 = (2.0 * idx.j + 1.0) * B.Lambda2;

  B.extraction = effective_for_modes(coeffs, ops, idx.j, idx.k);
  B.h5 = B.extraction.op;
  B.lambda4 = B.h5.eigenvalue(idx.m);
  B.chi0 = effective_eigenfunction(B.h5, idx.m);

  // Final chain with the actual slow profile.
  ChainParts cp = run_chain(ops, idx.k, idx.j, b0, B.Lambda2, B.chi0);
  B.u[0] = cp.u0;
  B.u[1] = cp.u1;
  const double u0n = std::max(cp.u0.norm_sq(), 1e-300);

  // v2 from the order-h solvability in the z-ladder.
  TensorHermiteExpansion w =
      ops.P4.apply(cp.u0) + ops.P3.apply(cp.u1) + ops.P2.apply(cp.U2);
  TensorHermiteExpansion g5 = w.project(Var::X, idx.k) * cplx(-1.0, 0.0);
  TensorHermiteExpansion cz = TensorHermiteExpansion::from_1d(Var::Eta, B.chi0)
                                  .tensor_with_mode(Var::Z, B.Lambda2, idx.j);
  g5 += cz * cplx(B.lambda4, 0.0);
  double jsq5 = 0.0;
  TensorHermiteExpansion v2 = solve_z_shifts(g5, idx.j, B.Lambda2, &jsq5);
  B.u[2] = cp.U2 + v2.tensor_with_mode(Var::X, b0, idx.k);

  // u3 and u4 from the x-ladder.
  TensorHermiteExpansion rhs4 =
      cp.u1 * cplx(B.lambda2, 0.0) - ops.P3.apply(cp.u0) - ops.P2.apply(cp.u1);
  double ksq4 = 0.0;
  B.u[3] = solve_x_shifts(rhs4, idx.k, b0, &ksq4);

  TensorHermiteExpansion rhs5 = B.u[2] * cplx(B.lambda2, 0.0) + cp.u0 * cplx(B.lambda4, 0.0) -
                                ops.P4.apply(cp.u0) - ops.P3.apply(cp.u1) -
                                ops.P2.apply(B.u[2]);
  double ksq5 = 0.0;
  B.u[4] = solve_x_shifts(rhs5, idx.k, b0, &ksq5);

  B.solvability = std::max({cp.solvability, std::sqrt(jsq5 / u0n), std::sqrt(ksq4 / u0n),
                            std::sqrt(ksq5 / u0n)});

  // Certify the five order-by-order equations.
  auto resid = [&](const TensorHermiteExpansion& r) { return std::sqrt(r.norm_sq() / u0n); };
  const double l0 = B.lambda0, l2v = B.lambda2, l4 = B.lambda4;
  double hr = 0.0;
  hr = std::max(hr, resid(ops.P0.apply(B.u[0]) - B.u[0] * cplx(l0, 0.0)));
  hr = std::max(hr, resid(ops.P0.apply(B.u[1]) - B.u[1] * cplx(l0, 0.0)));
  hr = std::max(hr, resid(ops.P0.apply(B.u[2]) - B.u[2] * cplx(l0, 0.0) +
                          ops.P2.apply(B.u[0]) - B.u[0] * cplx(l2v, 0.0)));
  hr = std::max(hr, resid(ops.P0.apply(B.u[3]) - B.u[3] * cplx(l0, 0.0) +
                          ops.P3.apply(B.u[0]) + ops.P2.apply(B.u[1]) -
                          B.u[1] * cplx(l2v, 0.0)));
  hr = std::max(hr, resid(ops.P0.apply(B.u[4]) - B.u[4] * cplx(l0, 0.0) +
                          ops.P4.apply(B.u[0]) + ops.P3.apply(B.u[1]) +
                          ops.P2.apply(B.u[2]) - B.u[2] * cplx(l2v, 0.0) -
                          B.u[0] * cplx(l4, 0.0)));
  B.hierarchy_residual = hr;
  return B;
}

}  // namespace magwell
