#pragma once

#include <Eigen/Dense>

#include "magwell/field.hpp"
#include "magwell/poly3.hpp"

namespace magwell {

// Rigid change of coordinates: X_input = translation + rotation * X_aligned.
// In aligned coordinates the well sits at the origin with B(0) = (0,0,b0)
// and the z-derivative of the first field component removed.
struct Frame {
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();

  Eigen::Vector3d to_aligned(const Eigen::Vector3d& X_input) const {
    return rotation.transpose() * (X_input - translation);
  }
  Eigen::Vector3d to_input(const Eigen::Vector3d& X_aligned) const {
    return translation + rotation * X_aligned;
  }
};

struct AlignResult {
  Frame frame;
  PolyVecField aligned;
};

AlignResult align_frame(const PolyVecField& field, const WellAnalysis& well);

// Taylor data of B = rot A at the origin of the aligned frame, through total
// degree 4, split by homogeneous degree.  Quadratic families are stored as
// symmetric matrices (off-diagonal entry = half the mixed monomial
// coefficient); cubic and quartic families as homogeneous polynomials.
struct NormalFormCoeffs {
  double b0 = 0.0;
  Eigen::Vector3d l1 = Eigen::Vector3d::Zero();  // grad B1(0) = (alpha1, alpha2, alpha3=0)
  Eigen::Vector3d l2 = Eigen::Vector3d::Zero();  // grad B2(0) = (beta1, beta2, beta3)
  Eigen::Matrix3d aQ = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d bQ = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d cQ = Eigen::Matrix3d::Zero();
  Poly3 Q1, Q2, Q3;  // homogeneous degree-2 parts of B
  Poly3 C1, C2, C3;  // degree-3 parts
  Poly3 R1, R2, R3;  // degree-4 parts
  Eigen::Vector3d delta = Eigen::Vector3d::Zero();  // z^4 coefficients of R1,R2,R3
  Eigen::Matrix3d Qmat = Eigen::Matrix3d::Zero();   // b0 * Hess|B|(0) via entry formulas

  // Degree-5 normal-form potential reconstructed from the Taylor data.
  Poly3 A2_poly, A3_poly;

  double alpha1() const { return l1[0]; }
  double alpha2() const { return l1[1]; }
  double beta1() const { return l2[0]; }
  double beta2() const { return l2[1]; }
  double beta3() const { return l2[2]; }
  // Monomial coefficient of a cubic/quartic part for exponent (ex,ey,ez).
  static double mono(const Poly3& p, int ex, int ey, int ez) { return p.coeff({ex, ey, ez}); }
};

// Reads the Taylor families from an already-aligned potential, checking the
// alignment conditions and the divergence identities degree by degree.
NormalFormCoeffs extract_taylor(const PolyVecField& aligned);

// Reconstructs the degree-5 normal-form potential (fills A2_poly / A3_poly):
//   A2 = int_0^x B3,   A3 = -int_0^x B2 + int_0^y B1(0, ., z)
// applied to the degree-<=4 Taylor field.
void build_normal_gauge(NormalFormCoeffs& c);

// Exact gauge normalization of an aligned potential at full degree:
// returns A' = A + grad(chi) with A'_1 = 0, A'_2(0,y,z) = 0, A'_3(0,0,z) = 0.
struct GaugeNormalized {
  PolyVecField potential;
  Poly3 chi;
};
GaugeNormalized normalize_gauge_exact(const PolyVecField& aligned);

// Full pipeline: well search, frame alignment, exact gauge normalization,
// Taylor extraction, degree-5 reconstruction.
struct NormalFormResult {
  WellAnalysis well;        // in input coordinates
  Frame frame;
  PolyVecField aligned_nf;  // gauge-normalized potential, aligned frame, full degree
  Poly3 gauge_chi;          // A_aligned + grad(chi) = aligned_nf
  NormalFormCoeffs coeffs;
};
NormalFormResult compute_normal_form(const PolyVecField& field,
                                     const WellSearchOptions& opt = {});

std::string coeffs_to_json(const NormalFormCoeffs& c);

}  // namespace magwell
