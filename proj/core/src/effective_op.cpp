#include "magwell/effective_op.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "magwell/errors.hpp"

namespace magwell {

double EffectiveOperator::R() const {
  const double disc = A * C - B * B;
  if (!(A > 0.0) || !(disc > 0.0)) {
    throw ConstructionError("effective operator is not elliptic (needs A>0, AC-B^2>0)");
  }
  return std::sqrt(disc);
}

double EffectiveOperator::eigenvalue(int m) const {
  const double r = R();
  const double disc = r * r;
  return (2.0 * m + 1.0) * r + gamma -
         (C * alpha * alpha - 2.0 * B * alpha * beta + A * beta * beta) / (4.0 * disc);
}

PolyDiffOp EffectiveOperator::as_op() const {
  using Op = PolyDiffOp;
  const Op ETA = Op::position(Var::Eta);
  const Op DETA = Op::momentum(Var::Eta);
  return DETA * DETA * A + (ETA * DETA + DETA * ETA) * B + ETA * ETA * C + DETA * alpha +
         ETA * beta + Op::identity() * gamma;
}

EffectiveOperator effective_quadratic_part(const NormalFormCoeffs& c, int k) {
  const Eigen::Matrix3d& q = c.Qmat;
  const double b0 = c.b0;
  const double f = 2.0 * k + 1.0;
  EffectiveOperator op;
  op.A = f / (2.0 * b0) * (q(1, 1) * q(2, 2) - q(1, 2) * q(1, 2)) / q(2, 2);
  op.B = -f / (2.0 * b0 * b0) * (q(0, 1) * q(2, 2) - q(0, 2) * q(1, 2)) / q(2, 2);
  op.C = f / (2.0 * b0 * b0 * b0) * (q(0, 0) * q(2, 2) - q(0, 2) * q(0, 2)) / q(2, 2);
  return op;
}

EffectiveExtraction extract_effective_operator(
    const std::function<HermiteExpansion(const HermiteExpansion&)>& L, int num_probes,
    double lambda_eta) {
  if (num_probes < 3) throw ConstructionError("effective extraction needs >= 3 probes");

  // Images of the six elementary operators and of L on each probe.
  struct ProbeData {
    std::array<HermiteExpansion, 6> elem;
    HermiteExpansion image;
  };
  std::vector<ProbeData> data(num_probes);
  int max_mode = 0;
  for (int i = 0; i < num_probes; ++i) {
    HermiteExpansion p = HermiteExpansion::unit(lambda_eta, i, cplx(1.0, 0.0));
    data[i].elem[0] = apply_dt(apply_dt(p));           // Deta^2
    data[i].elem[1] = mul_t(apply_dt(p)) + apply_dt(mul_t(p));  // eta Deta + Deta eta
    data[i].elem[2] = mul_t2(p);                       // eta^2
    data[i].elem[3] = apply_dt(p);                     // Deta
    data[i].elem[4] = mul_t(p);                        // eta
    data[i].elem[5] = p;                               // 1
    data[i].image = L(p);
    for (const auto& e : data[i].elem) max_mode = std::max(max_mode, e.max_mode());
    max_mode = std::max(max_mode, data[i].image.max_mode());
  }

  // One complex row per (probe, output mode); weight rows by the natural
  // norm of the mode so the least squares matches inner products.
  const int rows = num_probes * (max_mode + 1);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(rows, 6);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(rows);
  for (int i = 0; i < num_probes; ++i) {
    for (int m = 0; m <= max_mode; ++m) {
      const double w = std::sqrt(HermiteBasis::weight(m));
      const int r = i * (max_mode + 1) + m;
      for (int c = 0; c < 6; ++c) M(r, c) = w * data[i].elem[c].coeff(m);
      b[r] = w * data[i].image.coeff(m);
    }
  }

  Eigen::VectorXcd x = M.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);

  EffectiveExtraction out;
  out.max_imag = 0.0;
  for (int c = 0; c < 6; ++c) out.max_imag = std::max(out.max_imag, std::abs(x[c].imag()));
  Eigen::VectorXcd xr(6);
  for (int c = 0; c < 6; ++c) xr[c] = cplx(x[c].real(), 0.0);
  const double bnorm = b.norm();
  out.fit_residual = (M * xr - b).norm() / (bnorm > 0.0 ? bnorm : 1.0);
  out.op.A = x[0].real();
  out.op.B = x[1].real();
  out.op.C = x[2].real();
  out.op.alpha = x[3].real();
  out.op.beta = x[4].real();
  out.op.gamma = x[5].real();
  return out;
}

namespace {

// Deterministic phase fix: rotate so the largest coefficient is positive real.
void fix_phase(HermiteExpansion& e) {
  double best = 0.0;
  cplx lead(1.0, 0.0);
  for (const auto& [m, c] : e.coeffs()) {
    (void)m;
    if (std::abs(c) > best) {
      best = std::abs(c);
      lead = c;
    }
  }
  if (best > 0.0) e = e * (std::conj(lead) / std::abs(lead));
}

double eigen_residual(const EffectiveOperator& op, const HermiteExpansion& chi, double lam) {
  // (op - lam) chi through the exact coefficient recurrences.
  HermiteExpansion r = apply_dt(apply_dt(chi)) * op.A +
                       (mul_t(apply_dt(chi)) + apply_dt(mul_t(chi))) * op.B +
                       mul_t2(chi) * op.C + apply_dt(chi) * op.alpha + mul_t(chi) * op.beta +
                       chi * (op.gamma - lam);
  const double scale = std::max({1.0, std::abs(lam), op.R()});
  return std::sqrt(r.norm_sq() / chi.norm_sq()) / scale;
}

}  // namespace

HermiteExpansion effective_eigenfunction(const EffectiveOperator& op, int m, double tol_rel,
                                         double* residual_out) {
  const double r = op.R();
  const double sqA = std::sqrt(op.A);
  // Ground state: exp(-((R + iB)/(2A)) eta^2 - i conj(w) eta / sqrt(A)),
  // where w = alpha/(2 sqrt(A)) + i (A beta - B alpha)/(2 sqrt(A) R).
  const cplx quad = cplx(r, op.B) / (2.0 * op.A);
  const cplx w(op.alpha / (2.0 * sqA), (op.A * op.beta - op.B * op.alpha) / (2.0 * sqA * r));
  const cplx lin = cplx(0.0, -1.0) * std::conj(w) / sqA;
  auto ground = [&](double eta) {
    return std::exp(-quad * eta * eta + lin * eta);
  };

  const double lambda = r / op.A;  // basis scale matching the Gaussian decay
  const double lam0 = op.eigenvalue(0);

  HermiteExpansion chi0;
  double res = 1.0;
  int mmax = 24 + 2 * m;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const int quad_pts = std::max(240, 4 * mmax + 160);
    chi0 = project_function(lambda, mmax, ground, quad_pts);
    const double n2 = chi0.norm_sq();
    if (n2 > 0.0) {
      chi0 = chi0 * (1.0 / std::sqrt(n2));
      res = eigen_residual(op, chi0, lam0);
      if (res <= tol_rel) break;
    }
    mmax = std::min(mmax + mmax / 2 + 8, HermiteBasis::kMaxMode - m - 2);
  }
  if (res > tol_rel) {
    throw ConvergenceError("effective eigenfunction: ground state did not converge");
  }

  // Raising operator X = sqrt(A) Deta + ((B + iR)/sqrt(A)) eta + w.
  HermiteExpansion chi = chi0;
  for (int i = 0; i < m; ++i) {
    chi = apply_dt(chi) * sqA + mul_t(chi) * (cplx(op.B, r) / sqA) + chi * w;
    const double n2 = chi.norm_sq();
    if (!(n2 > 0.0)) throw ConstructionError("effective eigenfunction: ladder collapsed");
    chi = chi * (1.0 / std::sqrt(n2));
  }
  chi = chi.pruned(1e-300);
  fix_phase(chi);

  const double rm = eigen_residual(op, chi, op.eigenvalue(m));
  if (residual_out) *residual_out = rm;
  if (rm > 50.0 * tol_rel * (m + 1.0)) {
    throw ConvergenceError("effective eigenfunction: excited state residual too large");
  }
  return chi;
}

}  // namespace magwell
