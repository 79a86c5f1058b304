#include "magwell/normal_form.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "magwell/errors.hpp"

namespace magwell {

namespace {

// Vector potentials transform covariantly: A'(X') = R^T A(t + R X').
PolyVecField transform_potential(const PolyVecField& f, const Eigen::Matrix3d& R,
                                 const Eigen::Vector3d& t) {
  std::array<Poly3, 3> composed;
  for (int c = 0; c < 3; ++c) composed[c] = f.A[c].compose_affine(R, t);
  PolyVecField out;
  out.name = f.name;
  for (int c = 0; c < 3; ++c) {
    Poly3 acc;
    for (int d = 0; d < 3; ++d) acc += composed[d] * R(d, c);
    out.A[c] = acc.pruned(1e-300);
  }
  // Conservative axis-aligned box in the new coordinates.
  bool rotated = !R.isApprox(Eigen::Matrix3d::Identity(), 1e-14);
  if (!rotated) {
    out.domain.min = f.domain.min - t;
    out.domain.max = f.domain.max - t;
  } else {
    double r = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
      r = std::min(r, t[a] - f.domain.min[a]);
      r = std::min(r, f.domain.max[a] - t[a]);
    }
    r = std::max(r, 1e-6) / std::sqrt(3.0);
    out.domain.min = Eigen::Vector3d::Constant(-r);
    out.domain.max = Eigen::Vector3d::Constant(r);
  }
  return out;
}

double field_scale(const std::array<Poly3, 3>& B) {
  return std::max({1.0, B[0].max_abs_coeff(), B[1].max_abs_coeff(), B[2].max_abs_coeff()});
}

Eigen::Matrix3d quad_matrix(const Poly3& q) {
  Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
  M(0, 0) = q.coeff({2, 0, 0});
  M(1, 1) = q.coeff({0, 2, 0});
  M(2, 2) = q.coeff({0, 0, 2});
  M(0, 1) = M(1, 0) = 0.5 * q.coeff({1, 1, 0});
  M(0, 2) = M(2, 0) = 0.5 * q.coeff({1, 0, 1});
  M(1, 2) = M(2, 1) = 0.5 * q.coeff({0, 1, 1});
  return M;
}

// Restriction to the plane {x = 0}.
Poly3 at_x0(const Poly3& p) {
  Poly3 r;
  for (const auto& [e, c] : p.terms())
    if (e[0] == 0) r.add_term(e, c);
  return r;
}

Poly3 at_xy0(const Poly3& p) {
  Poly3 r;
  for (const auto& [e, c] : p.terms())
    if (e[0] == 0 && e[1] == 0) r.add_term(e, c);
  return r;
}

}  // namespace

AlignResult align_frame(const PolyVecField& field, const WellAnalysis& well) {
  std::array<Poly3, 3> B = curl(field);
  Eigen::Vector3d Bv{B[0].eval(well.X0), B[1].eval(well.X0), B[2].eval(well.X0)};
  double b0 = Bv.norm();
  if (b0 <= 0.0) throw ZeroFieldViolation("cannot align: B vanishes at the well");

  Eigen::Matrix3d R1 =
      Eigen::Quaterniond::FromTwoVectors(Eigen::Vector3d::UnitZ(), Bv / b0).toRotationMatrix();

  // Residual freedom: rotation about the field axis, fixed by removing the
  // z-derivative of the first transverse component.
  PolyVecField stage1 = transform_potential(field, R1, well.X0);
  std::array<Poly3, 3> B1 = curl(stage1.A);
  double a3 = B1[0].coeff({0, 0, 1});
  double b3 = B1[1].coeff({0, 0, 1});
  double theta = 0.0;
  if (std::abs(a3) > 1e-14 * field_scale(B1)) theta = std::atan2(-a3, b3);
  // Tie-break into (-pi/2, pi/2].
  if (theta <= -M_PI / 2) theta += M_PI;
  if (theta > M_PI / 2) theta -= M_PI;

  Eigen::Matrix3d Rz = Eigen::Matrix3d::Identity();
  double cs = std::cos(theta), sn = std::sin(theta);
  Rz(0, 0) = cs;
  Rz(0, 1) = -sn;
  Rz(1, 0) = sn;
  Rz(1, 1) = cs;

  AlignResult out;
  out.frame.translation = well.X0;
  out.frame.rotation = R1 * Rz;
  out.aligned = transform_potential(field, out.frame.rotation, well.X0);
  out.aligned.name = field.name;

  // Certificates.
  std::array<Poly3, 3> Ba = curl(out.aligned.A);
  double scale = field_scale(Ba);
  Eigen::Vector3d B0{Ba[0].eval(Eigen::Vector3d::Zero()), Ba[1].eval(Eigen::Vector3d::Zero()),
                     Ba[2].eval(Eigen::Vector3d::Zero())};
  if (std::abs(B0[0]) > 1e-10 * scale || std::abs(B0[1]) > 1e-10 * scale ||
      std::abs(B0[2] - b0) > 1e-10 * scale)
    throw ConstructionError("frame alignment failed to put B(0) on the third axis");
  if (std::abs(Ba[0].coeff({0, 0, 1})) > 1e-10 * scale)
    throw ConstructionError("frame alignment failed to cancel the axial derivative");
  return out;
}

NormalFormCoeffs extract_taylor(const PolyVecField& aligned) {
  std::array<Poly3, 3> B = curl(aligned);
  double scale = field_scale(B);
  const double tol = 1e-10 * scale;

  NormalFormCoeffs c;
  c.b0 = B[2].coeff({0, 0, 0});
  if (c.b0 <= tol) throw ZeroFieldViolation("aligned field has no positive axial component");
  if (std::abs(B[0].coeff({0, 0, 0})) > tol || std::abs(B[1].coeff({0, 0, 0})) > tol)
    throw ConstructionError("potential is not aligned: transverse B(0) != 0");

  c.l1 = {B[0].coeff({1, 0, 0}), B[0].coeff({0, 1, 0}), B[0].coeff({0, 0, 1})};
  c.l2 = {B[1].coeff({1, 0, 0}), B[1].coeff({0, 1, 0}), B[1].coeff({0, 0, 1})};
  if (std::abs(c.l1[2]) > tol)
    throw ConstructionError("potential is not aligned: axial derivative of B1 survives");
  c.l1[2] = 0.0;

  // The critical-point structure kills the linear part of B3.
  Poly3 B3lin = B[2].homogeneous_part(1);
  if (!B3lin.is_zero(tol))
    throw AssumptionViolation(
        "origin of the aligned frame is not a critical point of the axial component");

  c.Q1 = B[0].homogeneous_part(2);
  c.Q2 = B[1].homogeneous_part(2);
  c.Q3 = B[2].homogeneous_part(2);
  c.C1 = B[0].homogeneous_part(3);
  c.C2 = B[1].homogeneous_part(3);
  c.C3 = B[2].homogeneous_part(3);
  c.R1 = B[0].homogeneous_part(4);
  c.R2 = B[1].homogeneous_part(4);
  c.R3 = B[2].homogeneous_part(4);

  c.aQ = quad_matrix(c.Q1);
  c.bQ = quad_matrix(c.Q2);
  c.cQ = quad_matrix(c.Q3);
  c.delta = {c.R1.coeff({0, 0, 4}), c.R2.coeff({0, 0, 4}), c.R3.coeff({0, 0, 4})};

  // Divergence-free identities, degree by degree.
  if (std::abs(c.l1[0] + c.l2[1]) > tol)
    throw ConstructionError("divergence identity fails at degree 1");
  for (int deg = 2; deg <= 4; ++deg) {
    Poly3 div = B[0].homogeneous_part(deg).derivative(0) + B[1].homogeneous_part(deg).derivative(1) +
                B[2].homogeneous_part(deg).derivative(2);
    if (!div.is_zero(tol * 10.0))
      throw ConstructionError("divergence identity fails at degree " + std::to_string(deg));
  }

  // Second-derivative matrix of |B| scaled by b0, from the entry formulas.
  const double a1 = c.l1[0], a2 = c.l1[1];
  const double b1 = c.l2[0], b2 = c.l2[1], b3 = c.l2[2];
  Eigen::Matrix3d Q;
  Q(0, 0) = a1 * a1 + b1 * b1 + 2 * c.b0 * c.cQ(0, 0);
  Q(0, 1) = a1 * a2 + b1 * b2 + 2 * c.b0 * c.cQ(0, 1);
  Q(0, 2) = b1 * b3 + 2 * c.b0 * c.cQ(0, 2);
  Q(1, 1) = a2 * a2 + b2 * b2 + 2 * c.b0 * c.cQ(1, 1);
  Q(1, 2) = b2 * b3 + 2 * c.b0 * c.cQ(1, 2);
  Q(2, 2) = b3 * b3 + 2 * c.b0 * c.cQ(2, 2);
  Q(1, 0) = Q(0, 1);
  Q(2, 0) = Q(0, 2);
  Q(2, 1) = Q(1, 2);
  c.Qmat = Q;

  build_normal_gauge(c);
  return c;
}

void build_normal_gauge(NormalFormCoeffs& c) {
  for (const auto* p : {&c.Q1, &c.Q2, &c.Q3, &c.C1, &c.C2, &c.C3, &c.R1, &c.R2, &c.R3})
    if (p->total_degree() > 4) throw ConstructionError("Taylor family exceeds degree 4");
  if (!std::isfinite(c.b0) || c.b0 <= 0.0)
    throw ConstructionError("normal-form coefficients are unpopulated (b0 <= 0)");

  Poly3 B1 = Poly3::variable(0) * c.l1[0] + Poly3::variable(1) * c.l1[1];
  B1 += c.Q1 + c.C1 + c.R1;
  Poly3 B2 = Poly3::variable(0) * c.l2[0] + Poly3::variable(1) * c.l2[1] +
             Poly3::variable(2) * c.l2[2];
  B2 += c.Q2 + c.C2 + c.R2;
  Poly3 B3 = Poly3(c.b0) + c.Q3 + c.C3 + c.R3;

  c.A2_poly = B3.antiderivative(0);
  c.A3_poly = -B2.antiderivative(0) + at_x0(B1).antiderivative(1);
}

GaugeNormalized normalize_gauge_exact(const PolyVecField& aligned) {
  GaugeNormalized out;
  std::array<Poly3, 3> A = aligned.A;
  // Three gauge steps, each an exact polynomial antiderivative.
  Poly3 chi1 = -A[0].antiderivative(0);
  A[0] += chi1.derivative(0);  // = 0
  A[1] += chi1.derivative(1);
  A[2] += chi1.derivative(2);
  Poly3 chi2 = -at_x0(A[1]).antiderivative(1);
  A[1] += chi2.derivative(1);
  A[2] += chi2.derivative(2);
  Poly3 chi3 = -at_xy0(A[2]).antiderivative(2);
  A[2] += chi3.derivative(2);

  out.chi = chi1 + chi2 + chi3;
  out.potential = aligned;
  out.potential.A = {A[0].pruned(0.0), A[1].pruned(0.0), A[2].pruned(0.0)};

  if (!out.potential.A[0].is_zero(0.0) || !at_x0(out.potential.A[1]).is_zero(0.0) ||
      !at_xy0(out.potential.A[2]).is_zero(0.0))
    throw ConstructionError("gauge normalization failed to zero the required traces");
  return out;
}

NormalFormResult compute_normal_form(const PolyVecField& field, const WellSearchOptions& opt) {
  NormalFormResult r;
  r.well = find_well(field, opt);
  AlignResult al = align_frame(field, r.well);
  r.frame = al.frame;
  GaugeNormalized gn = normalize_gauge_exact(al.aligned);
  r.aligned_nf = gn.potential;
  r.gauge_chi = gn.chi;
  r.coeffs = extract_taylor(r.aligned_nf);
  return r;
}

std::string coeffs_to_json(const NormalFormCoeffs& c) {
  nlohmann::json doc;
  doc["b0"] = c.b0;
  doc["l1"] = {c.l1[0], c.l1[1], c.l1[2]};
  doc["l2"] = {c.l2[0], c.l2[1], c.l2[2]};
  auto mat = [](const Eigen::Matrix3d& M) {
    nlohmann::json m = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) m.push_back({M(i, 0), M(i, 1), M(i, 2)});
    return m;
  };
  doc["aQ"] = mat(c.aQ);
  doc["bQ"] = mat(c.bQ);
  doc["cQ"] = mat(c.cQ);
  doc["Qmat"] = mat(c.Qmat);
  auto poly = [](const Poly3& p) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [e, v] : p.terms()) {
      nlohmann::json rec;
      rec["exponents"] = {e[0], e[1], e[2]};
      rec["coeff"] = v;
      arr.push_back(rec);
    }
    return arr;
  };
  doc["C"] = {poly(c.C1), poly(c.C2), poly(c.C3)};
  doc["R"] = {poly(c.R1), poly(c.R2), poly(c.R3)};
  doc["delta"] = {c.delta[0], c.delta[1], c.delta[2]};
  doc["A2"] = poly(c.A2_poly);
  doc["A3"] = poly(c.A3_poly);
  return doc.dump(2) + "\n";
}

}  // namespace magwell
