// The corrector chain and the three-term eigenvalue expansion: order
// equations, solvability, closed-form coefficients, effective-operator
// scaling laws, and the assembled mu(h).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "magwell/normal_form.hpp"
#include "magwell/quasimode.hpp"
#include "magwell/reduced_ops.hpp"
#include "test_fixtures.hpp"

using namespace magwell;
using namespace magwell::testing;

namespace {

struct Prepared {
  NormalFormResult nf;
  ReducedOperators ops;
};

Prepared prepare(const PolyVecField& f) {
  Prepared p{compute_normal_form(f), {}};
  p.ops = build_reduced_operators(p.nf.coeffs);
  return p;
}

}  // namespace

TEST_CASE("quasimode: every order equation certified on all model fields") {
  for (const PolyVecField& f :
       {isotropic_field(), anisotropic_field(), sheared_field(), tilted_field()}) {
    CAPTURE(f.name);
    const Prepared p = prepare(f);
    for (const QuasimodeIndices idx : {QuasimodeIndices{0, 0, 0}, QuasimodeIndices{1, 1, 1}}) {
      CAPTURE(idx.k);
      const QuasimodeBundle mode = build_quasimode(p.nf.coeffs, p.ops, idx);
      CHECK(mode.hierarchy_residual <= 1e-12);
      CHECK(mode.solvability <= 1e-10);
      CHECK(mode.extraction.fit_residual <= 1e-8);
      CHECK(mode.extraction.max_imag <= 1e-8);
      CHECK(!mode.u[0].empty());
    }
  }
}

TEST_CASE("quasimode: odd correctors appear exactly when the odd chain is active") {
  const Prepared iso = prepare(isotropic_field());
  const QuasimodeBundle m0 = build_quasimode(iso.nf.coeffs, iso.ops, {0, 0, 0});
  CHECK(m0.u[1].empty());  // mirror-symmetric field: u1 drops out

  const Prepared tilt = prepare(tilted_field());
  const QuasimodeBundle m1 = build_quasimode(tilt.nf.coeffs, tilt.ops, {0, 0, 0});
  CHECK(!m1.u[1].empty());
  CHECK(m1.u[1].norm_sq() > 1e-6);
}

TEST_CASE("quasimode: eigenvalue coefficients against hand-computed values") {
  SUBCASE("isotropic: lambda4 ladder 2, 4, 6") {
    const Prepared p = prepare(isotropic_field());
    for (int m = 0; m < 3; ++m) {
      const QuasimodeBundle mode = build_quasimode(p.nf.coeffs, p.ops, {0, 0, m});
      CHECK(mode.lambda0 == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(mode.lambda2 == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(mode.lambda4 == doctest::Approx(2.0 * (m + 1)).epsilon(1e-9));
    }
    const QuasimodeBundle k1 = build_quasimode(p.nf.coeffs, p.ops, {1, 1, 0});
    CHECK(k1.lambda0 == doctest::Approx(3.0).epsilon(1e-10));          // (2k+1) b0
    CHECK(k1.lambda2 == doctest::Approx(3.0 * std::sqrt(3.0)).epsilon(1e-10));
  }
  SUBCASE("anisotropic: transverse anisotropy shifts the slow ladder") {
    const Prepared p = prepare(anisotropic_field());
    const QuasimodeBundle m0 = build_quasimode(p.nf.coeffs, p.ops, {0, 0, 0});
    CHECK(m0.lambda2 == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));
    CHECK(m0.lambda4 == doctest::Approx(1.5 + std::sqrt(2.0)).epsilon(1e-9));
    const QuasimodeBundle m1 = build_quasimode(p.nf.coeffs, p.ops, {0, 0, 1});
    CHECK(m1.lambda4 - m0.lambda4 == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));
    const QuasimodeBundle jk = build_quasimode(p.nf.coeffs, p.ops, {1, 1, 0});
    CHECK(jk.lambda2 == doctest::Approx(9.0).epsilon(1e-10));  // (2j+1) sqrt((2k+1) a)
    CHECK(jk.lambda4 == doctest::Approx(7.5 + 3.0 * std::sqrt(2.0)).epsilon(1e-9));
  }
  SUBCASE("sheared: drift terms move the slow ground energy to 61/48") {
    const Prepared p = prepare(sheared_field());
    const QuasimodeBundle m0 = build_quasimode(p.nf.coeffs, p.ops, {0, 0, 0});
    CHECK(m0.lambda2 == doctest::Approx(std::sqrt(1.5)).epsilon(1e-10));
    CHECK(m0.lambda4 == doctest::Approx(61.0 / 48.0).epsilon(1e-9));
  }
}

TEST_CASE("quasimode: effective operator matches the quadratic closed form") {
  for (const PolyVecField& f : {isotropic_field(), anisotropic_field()}) {
    CAPTURE(f.name);
    const Prepared p = prepare(f);
    for (int k = 0; k <= 2; ++k)
      for (int j = 0; j <= 2; ++j) {
        CAPTURE(k);
        CAPTURE(j);
        const EffectiveExtraction ex = effective_for_modes(p.nf.coeffs, p.ops, j, k);
        const EffectiveOperator closed = effective_quadratic_part(p.nf.coeffs, k);
        CHECK(ex.fit_residual <= 1e-8);
        CHECK(rel_err(ex.op.A, closed.A) <= 1e-8);
        CHECK(rel_err(ex.op.B, closed.B) <= 1e-8);
        CHECK(rel_err(ex.op.C, closed.C) <= 1e-8);
      }
  }
}

TEST_CASE("quasimode: drift coefficients obey the mode scaling law") {
  // alpha and beta of the slow operator scale like sqrt(2k+1) (2j+1).
  for (const PolyVecField& f : {sheared_field(), tilted_field()}) {
    CAPTURE(f.name);
    const Prepared p = prepare(f);
    const EffectiveExtraction base = effective_for_modes(p.nf.coeffs, p.ops, 0, 0);
    const double scale0 =
        std::max(std::abs(base.op.alpha), std::abs(base.op.beta));
    REQUIRE(scale0 > 1e-12);  // these fields have active drift terms
    for (int k = 0; k <= 2; ++k)
      for (int j = 0; j <= 2; ++j) {
        CAPTURE(k);
        CAPTURE(j);
        const EffectiveExtraction ex = effective_for_modes(p.nf.coeffs, p.ops, j, k);
        const double s = std::sqrt(2.0 * k + 1.0) * (2.0 * j + 1.0);
        CHECK(std::abs(ex.op.alpha - s * base.op.alpha) <= 1e-8 * s * std::max(1.0, scale0));
        CHECK(std::abs(ex.op.beta - s * base.op.beta) <= 1e-8 * s * std::max(1.0, scale0));
      }
  }
}

TEST_CASE("quasimode: constant term fits the quadratic mode-index shape") {
  // gamma(j,k) is a combination of 1, (2j+1)^2, (2k+1)^2 and (2j+1)(2k+1).
  const Prepared p = prepare(anisotropic_field());
  std::vector<std::array<double, 4>> rows;
  std::vector<double> rhs;
  for (int k = 0; k <= 2; ++k)
    for (int j = 0; j <= 2; ++j) {
      const double J = 2.0 * j + 1.0, K = 2.0 * k + 1.0;
      rows.push_back({1.0, J * J, K * K, J * K});
      rhs.push_back(effective_for_modes(p.nf.coeffs, p.ops, j, k).op.gamma);
    }
  Eigen::MatrixXd M(9, 4);
  Eigen::VectorXd y(9);
  for (int r = 0; r < 9; ++r) {
    for (int c = 0; c < 4; ++c) M(r, c) = rows[std::size_t(r)][std::size_t(c)];
    y[r] = rhs[std::size_t(r)];
  }
  const Eigen::VectorXd fit = M.colPivHouseholderQr().solve(y);
  const double res = (M * fit - y).norm() / std::max(1.0, y.norm());
  CHECK(res <= 1e-8);
}

TEST_CASE("quasimode: chain solvers and solvability reporting") {
  const Prepared p = prepare(isotropic_field());
  const double b0 = p.nf.coeffs.b0;

  // Plant a solution w supported off the k-row and recover it.
  const int k = 1;
  TensorHermiteExpansion w = TensorHermiteExpansion::tensor(
      TensorHermiteExpansion::from_1d(Var::X, HermiteExpansion::unit(b0, k + 2, cplx(0.7, 0.2))),
      TensorHermiteExpansion::from_1d(Var::Eta, HermiteExpansion::unit(1.0, 1)));
  w.add({k - 1, 2, 0}, cplx(-0.4, 1.1));

  // rhs = (P0 - (2k+1) b0) w, with P0 acting as the pure x-oscillator.
  TensorHermiteExpansion rhs = p.ops.P0.apply(w);
  rhs += w * cplx(-(2.0 * k + 1.0) * b0);

  double kcomp = -1.0;
  const TensorHermiteExpansion got = solve_x_shifts(rhs, k, b0, &kcomp);
  CHECK(kcomp <= 1e-20);
  double dev = 0.0;
  for (const auto& [key, c] : w.coeffs()) dev = std::max(dev, std::abs(c - got.coeff(key)));
  for (const auto& [key, c] : got.coeffs()) dev = std::max(dev, std::abs(c - w.coeff(key)));
  CHECK(dev <= 1e-12);

  // A k-row component in the rhs is reported, not silently dropped.
  TensorHermiteExpansion bad = rhs;
  bad.add({k, 0, 0}, cplx(0.5, 0.0));
  solve_x_shifts(bad, k, b0, &kcomp);
  const double planted = 0.25 * HermiteBasis::weight(k) * HermiteBasis::weight(0);
  CHECK(kcomp == doctest::Approx(planted).epsilon(1e-10));

  // run_chain reports clean solvability for the ground slow profile.
  const ChainParts parts =
      run_chain(p.ops, 0, 0, b0, std::sqrt(p.nf.coeffs.Qmat(2, 2) / (2.0 * b0)),
                HermiteExpansion::unit(1.0, 0));
  CHECK(parts.solvability <= 1e-12);
  CHECK(!parts.u0.empty());
}

TEST_CASE("quasimode: assembled expansion evaluates mu(h) exactly") {
  const Prepared p = prepare(isotropic_field());
  const QuasimodeBundle mode = build_quasimode(p.nf.coeffs, p.ops, {0, 0, 0});
  // lambda0 = 1, lambda2 = 1, lambda4 = 2 gives mu(0.01) = 0.0112 exactly.
  CHECK(mode.mu(0.01) == doctest::Approx(0.0112).epsilon(1e-10));
  CHECK(mode.lambda_rescaled(0.01) == doctest::Approx(1.12).epsilon(1e-10));
  // mu is increasing in each coefficient's mode index at small h.
  const QuasimodeBundle up = build_quasimode(p.nf.coeffs, p.ops, {0, 0, 1});
  CHECK(up.mu(0.01) > mode.mu(0.01));
}
