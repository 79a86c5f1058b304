// Scaled Hermite algebra: the six coefficient rules are checked against an
// independent pointwise oracle (three-term recurrence + quadrature
// projection), never against themselves.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "magwell/hermite.hpp"
#include "magwell/tensor_expansion.hpp"

using namespace magwell;

namespace {

// Physicists' Hermite polynomial by the textbook three-term recurrence.
double hermite_poly(int m, double s) {
  double p0 = 1.0, p1 = 2.0 * s;
  if (m == 0) return p0;
  if (m == 1) return p1;
  for (int k = 2; k <= m; ++k) {
    const double p2 = 2.0 * s * p1 - 2.0 * (k - 1) * p0;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// h_m(t) = sqrt(l) H_m(sqrt(l) t) exp(-l t^2/2), evaluated independently.
double h_ref(double lambda, int m, double t) {
  const double s = std::sqrt(lambda) * t;
  return std::sqrt(lambda) * hermite_poly(m, s) * std::exp(-0.5 * s * s);
}

// d/dt h_m, using H_m' = 2m H_{m-1}.
double dh_ref(double lambda, int m, double t) {
  const double rl = std::sqrt(lambda);
  const double s = rl * t;
  const double part = (m > 0 ? 2.0 * m * rl * hermite_poly(m - 1, s) : 0.0) -
                      lambda * t * hermite_poly(m, s);
  return rl * part * std::exp(-0.5 * s * s);
}

struct RuleCase {
  const char* name;
  std::function<HermiteExpansion(const HermiteExpansion&)> rule;
  // Pointwise action on h_m for the quadrature oracle.
  std::function<cplx(double /*lambda*/, int /*m*/, double /*t*/)> pointwise;
  int band;  // |image mode - m| never exceeds this
};

const cplx I(0.0, 1.0);

std::vector<RuleCase> rule_cases() {
  return {
      {"t", mul_t, [](double l, int m, double t) { return cplx(t * h_ref(l, m, t)); }, 1},
      {"t^2", mul_t2,
       [](double l, int m, double t) { return cplx(t * t * h_ref(l, m, t)); }, 2},
      {"t^3", mul_t3,
       [](double l, int m, double t) { return cplx(t * t * t * h_ref(l, m, t)); }, 3},
      {"D_t", apply_dt, [](double l, int m, double t) { return -I * dh_ref(l, m, t); }, 1},
      {"D_t t^2 + t^2 D_t", apply_dt_t2_sym,
       [](double l, int m, double t) {
         return -I * (2.0 * t * h_ref(l, m, t) + 2.0 * t * t * dh_ref(l, m, t));
       },
       3},
      {"t^4 D_t + D_t t^4", apply_dt_t4_sym,
       [](double l, int m, double t) {
         const double t2 = t * t;
         return -I * (4.0 * t * t2 * h_ref(l, m, t) + 2.0 * t2 * t2 * dh_ref(l, m, t));
       },
       5},
  };
}

}  // namespace

TEST_CASE("hermite: pointwise values match an independent recurrence") {
  for (double lambda : {0.5, 1.0, 2.3}) {
    HermiteBasis basis{lambda};
    for (int m : {0, 1, 2, 5, 12, 25}) {
      for (double t = -4.0; t <= 4.0; t += 0.37) {
        const double want = h_ref(lambda, m, t);
        CHECK(basis.h(m, t) == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("hermite: weights follow 2^m m! sqrt(pi)") {
  double w = std::sqrt(std::acos(-1.0));
  for (int m = 0; m <= 25; ++m) {
    CHECK(HermiteBasis::weight(m) == doctest::Approx(w).epsilon(1e-13));
    w *= 2.0 * (m + 1);
  }
}

TEST_CASE("hermite: six rules match the quadrature oracle") {
  double worst = 0.0;
  for (double lambda : {0.5, 1.0, 2.0}) {
    for (const RuleCase& rc : rule_cases()) {
      for (int m = 0; m <= 12; ++m) {
        const HermiteExpansion got = rc.rule(HermiteExpansion::unit(lambda, m));
        const HermiteExpansion want = project_function(
            lambda, m + rc.band,
            [&](double t) { return rc.pointwise(lambda, m, t); });
        double scale = 0.0;
        for (const auto& [n, c] : want.coeffs()) scale = std::max(scale, std::abs(c));
        REQUIRE(scale > 0.0);
        for (int n = 0; n <= m + rc.band; ++n) {
          const double dev = std::abs(got.coeff(n) - want.coeff(n)) / scale;
          worst = std::max(worst, dev);
          CAPTURE(rc.name);
          CAPTURE(lambda);
          CAPTURE(m);
          CAPTURE(n);
          CHECK(dev <= 1e-10);
        }
      }
    }
  }
  MESSAGE("worst relative coefficient deviation: ", worst);
}

TEST_CASE("hermite: rules compose consistently") {
  const HermiteExpansion e = [] {
    HermiteExpansion x(1.7);
    x.add(0, cplx(0.3, -0.1));
    x.add(3, cplx(-1.0, 0.4));
    x.add(7, cplx(0.05, 1.2));
    return x;
  }();
  auto max_dev = [](const HermiteExpansion& a, const HermiteExpansion& b) {
    double dev = 0.0;
    const int top = std::max(a.max_mode(), b.max_mode());
    for (int n = 0; n <= top; ++n) dev = std::max(dev, std::abs(a.coeff(n) - b.coeff(n)));
    return dev;
  };
  // t^3 = t . t^2
  CHECK(max_dev(mul_t3(e), mul_t(mul_t2(e))) <= 1e-12);
  // D t^2 + t^2 D as a composition of primitive rules
  HermiteExpansion lhs = apply_dt(mul_t2(e));
  lhs += mul_t2(apply_dt(e));
  CHECK(max_dev(apply_dt_t2_sym(e), lhs) <= 1e-12);
  // t^4 D + D t^4 likewise
  HermiteExpansion lhs4 = apply_dt(mul_t2(mul_t2(e)));
  lhs4 += mul_t2(mul_t2(apply_dt(e)));
  CHECK(max_dev(apply_dt_t4_sym(e), lhs4) <= 1e-11);
}

TEST_CASE("hermite: inner product and norms against quadrature") {
  const double lambda = 1.3;
  HermiteExpansion a(lambda), b(lambda);
  a.add(0, cplx(1.0, 0.5));
  a.add(2, cplx(-0.3, 0.0));
  a.add(5, cplx(0.0, 2.0));
  b.add(1, cplx(0.7, 0.0));
  b.add(2, cplx(0.2, -0.4));
  b.add(5, cplx(-1.1, 0.6));

  // <a, b>_{L2(dt)} = sqrt(lambda) * inner(a, b) by orthogonality.
  const GaussHermiteRule q = gauss_hermite(120);
  cplx dot(0.0, 0.0);
  double nrm = 0.0;
  const double rl = std::sqrt(lambda);
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const double t = q.nodes[i] / rl;  // integrand Gaussians supply exp(-s^2)
    const cplx av = a.eval(t), bv = b.eval(t);
    dot += q.comp_weights[i] * av * std::conj(bv) / rl;
    nrm += q.comp_weights[i] * std::norm(av) / rl;
  }
  const cplx want = rl * inner(a, b);
  CHECK(std::abs(dot - want) <= 1e-10 * std::abs(want));
  CHECK(nrm == doctest::Approx(rl * a.norm_sq()).epsilon(1e-12));
  CHECK(inner(a, a).real() == doctest::Approx(a.norm_sq()).epsilon(1e-13));
  CHECK(std::abs(inner(a, a).imag()) <= 1e-15 * a.norm_sq());
}

TEST_CASE("hermite: projection round-trips a random expansion") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HermiteExpansion e(0.8);
  for (int m = 0; m <= 15; ++m)
    if (u(rng) > -0.5) e.add(m, cplx(u(rng), u(rng)));
  const HermiteExpansion back =
      project_function(0.8, 15, [&](double t) { return e.eval(t); });
  for (int m = 0; m <= 15; ++m)
    CHECK(std::abs(back.coeff(m) - e.coeff(m)) <= 1e-11);
}

TEST_CASE("quadrature: Gauss-Hermite moments are exact") {
  const GaussHermiteRule q = gauss_hermite(30);
  // int s^{2j} e^{-s^2} ds = (2j-1)!! sqrt(pi) / 2^j
  double want = std::sqrt(std::acos(-1.0));
  for (int j = 0; j <= 10; ++j) {
    double got = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
      got += q.weights[i] * std::pow(q.nodes[i], 2 * j);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
    want *= (2.0 * j + 1.0) / 2.0;
  }
}

TEST_CASE("quadrature: compensated weights avoid the exponential blow-up") {
  const GaussHermiteRule small = gauss_hermite(10);
  for (std::size_t i = 0; i < small.nodes.size(); ++i) {
    const double naive = small.weights[i] * std::exp(small.nodes[i] * small.nodes[i]);
    CHECK(small.comp_weights[i] == doctest::Approx(naive).epsilon(1e-11));
  }
  const GaussHermiteRule big = gauss_hermite(240);
  for (std::size_t i = 0; i < big.nodes.size(); ++i) {
    CHECK(std::isfinite(big.comp_weights[i]));
    CHECK(big.comp_weights[i] > 0.0);
  }
}

TEST_CASE("tensor expansions: structure, inner product and 1D application") {
  const TensorHermiteExpansion ax =
      TensorHermiteExpansion::from_1d(Var::X, HermiteExpansion::unit(1.0, 2));
  const TensorHermiteExpansion az =
      TensorHermiteExpansion::from_1d(Var::Z, HermiteExpansion::unit(2.0, 1, cplx(0.0, 1.0)));
  const TensorHermiteExpansion t = TensorHermiteExpansion::tensor(ax, az);

  CHECK(t.active(Var::X));
  CHECK(!t.active(Var::Eta));
  CHECK(t.active(Var::Z));
  CHECK(t.lambda(Var::Z) == doctest::Approx(2.0));
  CHECK(std::abs(t.coeff({2, 0, 1}) - cplx(0.0, 1.0)) <= 1e-15);

  // Pointwise evaluation factorizes.
  HermiteBasis bx{1.0}, bz{2.0};
  const cplx got = t.eval({0.4, 0.0, -0.7});
  const cplx want = bx.h(2, 0.4) * cplx(0.0, 1.0) * bz.h(1, -0.7);
  CHECK(std::abs(got - want) <= 1e-13);

  // norm_sq multiplies the per-variable weights.
  CHECK(t.norm_sq() ==
        doctest::Approx(HermiteBasis::weight(2) * HermiteBasis::weight(1)).epsilon(1e-13));

  // Projection peels one variable.
  const TensorHermiteExpansion pz = t.project(Var::X, 2);
  CHECK(!pz.active(Var::X));
  CHECK(std::abs(pz.coeff({0, 0, 1}) - cplx(0.0, 1.0)) <= 1e-15);
  CHECK(t.project(Var::X, 3).empty());

  // apply_along matches the 1D rule.
  const TensorHermiteExpansion tx = t.apply_along(Var::X, mul_t);
  const HermiteExpansion rx = mul_t(HermiteExpansion::unit(1.0, 2));
  for (const auto& [n, c] : rx.coeffs())
    CHECK(std::abs(tx.coeff({n, 0, 1}) - c * cplx(0.0, 1.0)) <= 1e-14);

  // tensor_with_mode inserts a fresh factor.
  const TensorHermiteExpansion t3 = t.tensor_with_mode(Var::Eta, 1.5, 4);
  CHECK(t3.active(Var::Eta));
  CHECK(std::abs(t3.coeff({2, 4, 1}) - cplx(0.0, 1.0)) <= 1e-15);

  // inner(): conjugate-linear in the second slot, consistent with norm_sq.
  CHECK(std::abs(inner(t, t).real() - t.norm_sq()) <= 1e-13 * t.norm_sq());
}
