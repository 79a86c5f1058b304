// Polynomial algebra, curl/divergence identities, well location and
// invariants, and the field-file parser.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>

#include "magwell/errors.hpp"
#include "magwell/field.hpp"
#include "magwell/poly3.hpp"
#include "test_fixtures.hpp"

using namespace magwell;
using namespace magwell::testing;

TEST_CASE("poly3: arithmetic matches pointwise evaluation") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 8; ++trial) {
    const Poly3 p = random_poly(rng, 4);
    const Poly3 q = random_poly(rng, 3);
    const Poly3 sum = p + q, diff = p - q, prod = p * q, scaled = p * 0.37;
    for (int s = 0; s < 12; ++s) {
      const Eigen::Vector3d X(u(rng), u(rng), u(rng));
      const double pv = p.eval(X), qv = q.eval(X);
      CHECK(sum.eval(X) == doctest::Approx(pv + qv).epsilon(1e-12));
      CHECK(diff.eval(X) == doctest::Approx(pv - qv).epsilon(1e-12));
      CHECK(prod.eval(X) == doctest::Approx(pv * qv).epsilon(1e-11));
      CHECK(scaled.eval(X) == doctest::Approx(0.37 * pv).epsilon(1e-12));
    }
  }
}

TEST_CASE("poly3: derivative and antiderivative are exact inverses") {
  std::mt19937 rng(11);
  for (int axis = 0; axis < 3; ++axis) {
    const Poly3 p = random_poly(rng, 5);
    // d/dt (antiderivative) == identity, coefficient by coefficient.
    const Poly3 round = p.antiderivative(axis).derivative(axis) - p;
    CHECK(round.max_abs_coeff() <= 1e-14);
    // The antiderivative vanishes on {X_axis = 0}.
    Eigen::Vector3d X(0.4, -0.3, 0.9);
    X[axis] = 0.0;
    CHECK(std::abs(p.antiderivative(axis).eval(X)) <= 1e-14);
  }
}

TEST_CASE("poly3: gradient matches finite differences") {
  std::mt19937 rng(13);
  const Poly3 p = random_poly(rng, 4);
  const Eigen::Vector3d X(0.3, -0.7, 0.5);
  const Eigen::Vector3d g = p.gradient_at(X);
  const double eps = 1e-6;
  for (int d = 0; d < 3; ++d) {
    Eigen::Vector3d Xp = X, Xm = X;
    Xp[d] += eps;
    Xm[d] -= eps;
    const double fd = (p.eval(Xp) - p.eval(Xm)) / (2 * eps);
    CHECK(std::abs(g[d] - fd) <= 1e-7 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("poly3: affine recomposition evaluates correctly and preserves degree") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Poly3 p = random_poly(rng, 4);
  Eigen::Matrix3d R;
  R = Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 2).normalized()).toRotationMatrix();
  const Eigen::Vector3d t(0.2, -0.5, 0.1);
  const Poly3 q = p.compose_affine(R, t);
  CHECK(q.total_degree() == p.total_degree());
  for (int s = 0; s < 12; ++s) {
    const Eigen::Vector3d X(u(rng), u(rng), u(rng));
    CHECK(q.eval(X) == doctest::Approx(p.eval(R * X + t)).epsilon(1e-11));
  }
}

TEST_CASE("poly3: truncation and homogeneous parts partition the polynomial") {
  std::mt19937 rng(19);
  const Poly3 p = random_poly(rng, 5);
  Poly3 sum;
  for (int d = 0; d <= 5; ++d) sum += p.homogeneous_part(d);
  CHECK((sum - p).max_abs_coeff() <= 1e-15);
  const Poly3 low = p.truncate_total_degree(2);
  CHECK(low.total_degree() <= 2);
  CHECK((low - p.homogeneous_part(0) - p.homogeneous_part(1) - p.homogeneous_part(2))
            .max_abs_coeff() <= 1e-15);
}

TEST_CASE("curl: closed form for the model fields") {
  // A = (0, x + x^3/3 + x y^2 + x z^2, 0):
  //   B1 = -dA2/dz = -2 x z,  B2 = 0,  B3 = dA2/dx = 1 + x^2 + y^2 + z^2.
  const auto B = curl(isotropic_field());
  Poly3 b1 = Poly3::monomial({1, 0, 1}, -2.0);
  Poly3 b3(1.0);
  b3 += Poly3::monomial({2, 0, 0}, 1.0);
  b3 += Poly3::monomial({0, 2, 0}, 1.0);
  b3 += Poly3::monomial({0, 0, 2}, 1.0);
  CHECK((B[0] - b1).max_abs_coeff() <= 1e-15);
  CHECK(B[1].max_abs_coeff() <= 1e-15);
  CHECK((B[2] - b3).max_abs_coeff() <= 1e-15);
}

TEST_CASE("curl: divergence of a curl vanishes identically") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    std::array<Poly3, 3> A{random_poly(rng, 4), random_poly(rng, 4), random_poly(rng, 4)};
    CHECK(divergence(curl(A)).max_abs_coeff() <= 1e-13);
  }
}

TEST_CASE("well search: invariants of the model fields") {
  SUBCASE("isotropic") {
    const WellAnalysis w = find_well(isotropic_field());
    CHECK(w.X0.norm() <= 1e-10);
    CHECK(w.b0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((w.hessB - 2.0 * Eigen::Matrix3d::Identity()).norm() <= 1e-9);
    CHECK(w.d == doctest::Approx(8.0).epsilon(1e-9));
    CHECK(w.a == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(w.eps0_margin > 0.0);
  }
  SUBCASE("anisotropic") {
    const WellAnalysis w = find_well(anisotropic_field());
    CHECK(w.X0.norm() <= 1e-10);
    CHECK(w.b0 == doctest::Approx(1.0).epsilon(1e-12));
    Eigen::Matrix3d H = Eigen::Vector3d(2.0, 4.0, 6.0).asDiagonal();
    CHECK((w.hessB - H).norm() <= 1e-9);
    CHECK(w.d == doctest::Approx(48.0).epsilon(1e-9));
    CHECK(w.a == doctest::Approx(3.0).epsilon(1e-9));
  }
  SUBCASE("sheared") {
    const WellAnalysis w = find_well(sheared_field());
    CHECK(w.b0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.d == doctest::Approx(12.0).epsilon(1e-9));
    CHECK(w.a == doctest::Approx(1.5).epsilon(1e-9));
  }
  SUBCASE("tilted") {
    const WellAnalysis w = find_well(tilted_field());
    CHECK(w.b0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.d == doctest::Approx(6.0).epsilon(1e-9));
  }
}

TEST_CASE("well search: translation moves the minimizer, not the invariants") {
  const Eigen::Vector3d x0(1.25, -0.75, 0.5);
  const WellAnalysis w = find_well(translate_field(anisotropic_field(), x0));
  CHECK((w.X0 - x0).norm() <= 1e-8);
  CHECK(w.b0 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(w.d == doctest::Approx(48.0).epsilon(1e-8));
  CHECK(w.a == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("well search: rotation preserves the invariants") {
  Eigen::Matrix3d R;
  R = Eigen::AngleAxisd(0.9, Eigen::Vector3d(1, 1, 0).normalized()).toRotationMatrix();
  const WellAnalysis w = find_well(rotate_field(isotropic_field(), R));
  CHECK(w.X0.norm() <= 1e-8);
  CHECK(w.b0 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(w.d == doctest::Approx(8.0).epsilon(1e-8));
  CHECK(w.a == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("well search: invariants_at_well agrees with the search") {
  const WellAnalysis w1 = find_well(isotropic_field());
  const WellAnalysis w2 = invariants_at_well(isotropic_field(), w1.X0);
  CHECK(w2.b0 == doctest::Approx(w1.b0).epsilon(1e-13));
  CHECK(w2.d == doctest::Approx(w1.d).epsilon(1e-12));
  CHECK(w2.a == doctest::Approx(w1.a).epsilon(1e-12));
}

TEST_CASE("well search: model-violating inputs raise typed errors") {
  SUBCASE("zero potential") {
    PolyVecField f = base_box("zero");
    CHECK_THROWS_AS(find_well(f), ZeroFieldViolation);
  }
  SUBCASE("constant field has no non-degenerate minimum") {
    PolyVecField f = base_box("constant");
    f.A[1] = Poly3::variable(0);  // B = (0, 0, 1) everywhere
    CHECK_THROWS_AS(find_well(f), NonDegenerateWellViolation);
  }
  SUBCASE("two symmetric minima are rejected") {
    // B3 = 1 + (x^2-1)^2 + y^2 + z^2 has equal minima at x = +-1.
    PolyVecField f = base_box("twin");
    Poly3 ay = Poly3::variable(0) * 2.0;
    ay += Poly3::monomial({5, 0, 0}, 0.2);
    ay += Poly3::monomial({3, 0, 0}, -2.0 / 3.0);
    ay += Poly3::monomial({1, 2, 0}, 1.0);
    ay += Poly3::monomial({1, 0, 2}, 1.0);
    f.A[1] = ay;
    CHECK_THROWS_AS(find_well(f), NonUniqueMinimum);
  }
}

TEST_CASE("parser: shipped field files round-trip through JSON") {
  const std::string dir = MAGWELL_FIELDS_DIR;
  for (const char* name : {"isotropic", "anisotropic", "sheared", "tilted"}) {
    const PolyVecField f = parse_field_file(dir + "/" + name + ".json");
    CHECK(f.name == name);
    CHECK(f.domain.min.x() == doctest::Approx(-8.0));
    CHECK(f.domain.max.z() == doctest::Approx(8.0));
    const PolyVecField g = parse_field_text(field_to_json(f));
    for (int i = 0; i < 3; ++i)
      CHECK((f.A[std::size_t(i)] - g.A[std::size_t(i)]).max_abs_coeff() <= 1e-16);
  }
  // The shipped isotropic file matches the in-code fixture.
  const PolyVecField f = parse_field_file(dir + "/isotropic.json");
  const PolyVecField ref = isotropic_field();
  for (int i = 0; i < 3; ++i)
    CHECK((f.A[std::size_t(i)] - ref.A[std::size_t(i)]).max_abs_coeff() <= 1e-15);
}

TEST_CASE("parser: malformed input raises ParseError") {
  CHECK_THROWS_AS(parse_field_text("not json"), ParseError);
  CHECK_THROWS_AS(parse_field_text("{}"), ParseError);
  CHECK_THROWS_AS(parse_field_file("/nonexistent/path.json"), ParseError);
  // Negative exponents are rejected.
  CHECK_THROWS_AS(parse_field_text(R"({"name":"bad","domain":{"min":[-1,-1,-1],"max":[1,1,1]},
      "A":[[],[{"exponents":[-1,0,0],"coeff":1.0}],[]]})"),
                  ParseError);
  // Inverted domain is rejected.
  CHECK_THROWS_AS(parse_field_text(R"({"name":"bad","domain":{"min":[1,-1,-1],"max":[-1,1,1]},
      "A":[[],[{"exponents":[1,0,0],"coeff":1.0}],[]]})"),
                  ParseError);
  // Total degree above the input cap is rejected.
  CHECK_THROWS_AS(parse_field_text(R"({"name":"bad","domain":{"min":[-1,-1,-1],"max":[1,1,1]},
      "A":[[],[{"exponents":[9,0,0],"coeff":1.0}],[]]})"),
                  ParseError);
}

TEST_CASE("reports: well report is valid JSON with stable keys") {
  const PolyVecField f = isotropic_field();
  const WellAnalysis w = find_well(f);
  const std::string r1 = well_report_json(f, w);
  const std::string r2 = well_report_json(f, find_well(f));
  CHECK(r1 == r2);  // deterministic
  CHECK(r1.find("\"b0\"") != std::string::npos);
  CHECK(r1.find("\"d\"") != std::string::npos);
  CHECK(r1.find("\"a\"") != std::string::npos);
  CHECK(r1.find("\"X0\"") != std::string::npos);
}
