// Frame alignment, exact gauge normalization, and Taylor-coefficient
// extraction for the normal-form potential.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "magwell/errors.hpp"
#include "magwell/normal_form.hpp"
#include "test_fixtures.hpp"

using namespace magwell;
using namespace magwell::testing;

namespace {

// Largest |coefficient| of a term of p whose x-exponent is zero.
double max_x0_coeff(const Poly3& p) {
  double m = 0.0;
  for (const auto& [e, c] : p.terms())
    if (e[0] == 0) m = std::max(m, std::abs(c));
  return m;
}

// Largest |coefficient| of a term with x- and y-exponent zero.
double max_xy0_coeff(const Poly3& p) {
  double m = 0.0;
  for (const auto& [e, c] : p.terms())
    if (e[0] == 0 && e[1] == 0) m = std::max(m, std::abs(c));
  return m;
}

void check_gauge_traces(const PolyVecField& f) {
  CHECK(f.A[0].max_abs_coeff() <= 1e-12);      // A1 = 0
  CHECK(max_x0_coeff(f.A[1]) <= 1e-12);        // A2(0,y,z) = 0
  CHECK(max_xy0_coeff(f.A[2]) <= 1e-12);       // A3(0,0,z) = 0
}

}  // namespace

TEST_CASE("normal form: isotropic field needs no frame or gauge change") {
  const NormalFormResult nf = compute_normal_form(isotropic_field());
  CHECK(nf.frame.translation.norm() <= 1e-10);
  CHECK((nf.frame.rotation - Eigen::Matrix3d::Identity()).norm() <= 1e-10);
  CHECK(nf.gauge_chi.max_abs_coeff() <= 1e-12);

  const NormalFormCoeffs& c = nf.coeffs;
  CHECK(c.b0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.l1.norm() <= 1e-10);
  CHECK(c.l2.norm() <= 1e-10);
  CHECK((c.cQ - Eigen::Matrix3d::Identity()).norm() <= 1e-10);
  Eigen::Matrix3d aQ_ref = Eigen::Matrix3d::Zero();
  aQ_ref(0, 2) = aQ_ref(2, 0) = -1.0;  // B1 = -2 x z
  CHECK((c.aQ - aQ_ref).norm() <= 1e-10);
  CHECK(c.bQ.norm() <= 1e-10);
  CHECK((c.Qmat - 2.0 * Eigen::Matrix3d::Identity()).norm() <= 1e-9);
  for (const Poly3* p : {&c.C1, &c.C2, &c.C3, &c.R1, &c.R2, &c.R3})
    CHECK(p->max_abs_coeff() <= 1e-12);
  CHECK(c.delta.norm() <= 1e-12);

  // The reconstructed normal-form potential reproduces the input exactly.
  CHECK((c.A2_poly - isotropic_field().A[1]).max_abs_coeff() <= 1e-12);
  CHECK(c.A3_poly.max_abs_coeff() <= 1e-12);
}

TEST_CASE("normal form: anisotropic coefficient oracles") {
  const NormalFormResult nf = compute_normal_form(anisotropic_field());
  const NormalFormCoeffs& c = nf.coeffs;
  CHECK(c.b0 == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::Matrix3d cQ_ref = Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal();
  CHECK((c.cQ - cQ_ref).norm() <= 1e-10);
  CHECK(c.aQ(0, 2) == doctest::Approx(-3.0).epsilon(1e-10));  // B1 = -6 x z
  CHECK(c.aQ(2, 0) == doctest::Approx(-3.0).epsilon(1e-10));
  Eigen::Matrix3d Q_ref = Eigen::Vector3d(2.0, 4.0, 6.0).asDiagonal();
  CHECK((c.Qmat - Q_ref).norm() <= 1e-9);
  CHECK((c.A2_poly - anisotropic_field().A[1]).max_abs_coeff() <= 1e-12);
}

TEST_CASE("normal form: sheared field exercises the gauge step") {
  const NormalFormResult nf = compute_normal_form(sheared_field());
  // Frame is trivial (B(0) already along e3) but the gauge is not.
  CHECK((nf.frame.rotation - Eigen::Matrix3d::Identity()).norm() <= 1e-10);
  CHECK(nf.gauge_chi.max_abs_coeff() > 0.1);
  CHECK(nf.gauge_chi.coeff({1, 0, 2}) == doctest::Approx(-0.5).epsilon(1e-12));

  check_gauge_traces(nf.aligned_nf);
  CHECK(nf.coeffs.beta3() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(nf.coeffs.beta1() == doctest::Approx(0.0).epsilon(1e-10));

  // Gauge change preserves the magnetic field exactly.
  const auto B_in = curl(sheared_field());
  const auto B_nf = curl(nf.aligned_nf);
  for (int i = 0; i < 3; ++i)
    CHECK((B_in[std::size_t(i)] - B_nf[std::size_t(i)]).max_abs_coeff() <= 1e-12);
}

TEST_CASE("normal form: reconstruction identities for the Taylor field") {
  for (const PolyVecField& f :
       {isotropic_field(), anisotropic_field(), sheared_field(), tilted_field()}) {
    CAPTURE(f.name);
    const NormalFormCoeffs c = compute_normal_form(f).coeffs;
    // A2 = int_0^x B3 => d/dx A2_poly = b0 + Q3 + C3 + R3.
    Poly3 b3(c.b0);
    b3 += c.Q3;
    b3 += c.C3;
    b3 += c.R3;
    CHECK((c.A2_poly.derivative(0) - b3).max_abs_coeff() <= 1e-12);
    // d/dx A3 = -B2 (through degree 4).
    Poly3 b2;
    b2 += Poly3::variable(0) * c.l2[0];
    b2 += Poly3::variable(1) * c.l2[1];
    b2 += Poly3::variable(2) * c.l2[2];
    b2 += c.Q2;
    b2 += c.C2;
    b2 += c.R2;
    CHECK((c.A3_poly.derivative(0) + b2).max_abs_coeff() <= 1e-12);
    // The z^4 coefficients collected in delta match the quartic families.
    CHECK(c.delta[0] == doctest::Approx(c.R1.coeff({0, 0, 4})).epsilon(1e-13));
    CHECK(c.delta[2] == doctest::Approx(c.R3.coeff({0, 0, 4})).epsilon(1e-13));
  }
}

TEST_CASE("normal form: rotated and translated input recovers the frame") {
  Eigen::Matrix3d R;
  R = Eigen::AngleAxisd(0.8, Eigen::Vector3d(0.3, 1.0, 0.2).normalized()).toRotationMatrix();
  const Eigen::Vector3d x0(0.8, -0.6, 1.1);
  const PolyVecField moved = translate_field(rotate_field(anisotropic_field(), R), x0);

  const NormalFormResult nf = compute_normal_form(moved);
  CHECK((nf.frame.translation - x0).norm() <= 1e-8);
  CHECK(nf.frame.to_aligned(x0).norm() <= 1e-8);

  // The aligned z-axis points along the field at the well.
  const auto B = curl(moved);
  Eigen::Vector3d Bw(B[0].eval(x0), B[1].eval(x0), B[2].eval(x0));
  CHECK((nf.frame.rotation * Eigen::Vector3d::UnitZ() - Bw.normalized()).norm() <= 1e-8);

  // Rotation-invariant data survives the move.
  CHECK(nf.coeffs.b0 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(nf.coeffs.Qmat.determinant() == doctest::Approx(48.0).epsilon(1e-6));
  CHECK(nf.coeffs.Qmat(2, 2) == doctest::Approx(6.0).epsilon(1e-7));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(nf.coeffs.Qmat);
  CHECK(es.eigenvalues()[0] == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(es.eigenvalues()[1] == doctest::Approx(4.0).epsilon(1e-7));
  CHECK(es.eigenvalues()[2] == doctest::Approx(6.0).epsilon(1e-7));

  // Alignment conditions hold for the produced potential.
  check_gauge_traces(nf.aligned_nf);
  const auto Ba = curl(nf.aligned_nf);
  CHECK(std::abs(Ba[0].eval(Eigen::Vector3d::Zero())) <= 1e-9);
  CHECK(std::abs(Ba[1].eval(Eigen::Vector3d::Zero())) <= 1e-9);
  CHECK(Ba[2].eval(Eigen::Vector3d::Zero()) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(nf.coeffs.l1[2]) <= 1e-9);  // d B1/dz removed at the origin
}

TEST_CASE("gauge normalization: exact on arbitrary potentials") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 4; ++trial) {
    PolyVecField f = base_box("random");
    for (auto& a : f.A) a = random_poly(rng, 4);
    const GaugeNormalized g = normalize_gauge_exact(f);
    check_gauge_traces(g.potential);
    // A' = A + grad(chi), coefficient by coefficient.
    for (int i = 0; i < 3; ++i) {
      const Poly3 diff = g.potential.A[std::size_t(i)] - f.A[std::size_t(i)] -
                         g.chi.derivative(i);
      CHECK(diff.max_abs_coeff() <= 1e-12);
    }
    // The field is untouched.
    const auto B0 = curl(f), B1 = curl(g.potential);
    for (int i = 0; i < 3; ++i)
      CHECK((B0[std::size_t(i)] - B1[std::size_t(i)]).max_abs_coeff() <= 1e-11);
  }
}

TEST_CASE("taylor extraction: rejects unaligned input") {
  PolyVecField f = base_box("unaligned");
  f.A[0] = Poly3::variable(2);  // B = (0, 1, 0) at the origin
  CHECK_THROWS_AS(extract_taylor(f), ConstructionError);
}

TEST_CASE("coefficient report: deterministic JSON with stable keys") {
  const NormalFormCoeffs c = compute_normal_form(anisotropic_field()).coeffs;
  const std::string s1 = coeffs_to_json(c);
  const std::string s2 = coeffs_to_json(compute_normal_form(anisotropic_field()).coeffs);
  CHECK(s1 == s2);
  CHECK(s1.find("\"b0\"") != std::string::npos);
  CHECK(s1.find("\"Qmat\"") != std::string::npos);
}
