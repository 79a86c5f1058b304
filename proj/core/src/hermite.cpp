#include "magwell/hermite.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "magwell/errors.hpp"

namespace magwell {

double HermiteBasis::h(int m, double t) const {
  double s = std::sqrt(lambda) * t;
  double gauss = std::exp(-0.5 * s * s);
  double Hprev = 0.0, H = 1.0;  // H_0
  for (int k = 0; k < m; ++k) {
    double Hnext = 2.0 * s * H - 2.0 * k * Hprev;
    Hprev = H;
    H = Hnext;
  }
  return std::sqrt(lambda) * H * gauss;
}

double HermiteBasis::weight(int m) {
  if (m < 0) return 0.0;
  if (m > kMaxMode) throw ConstructionError("Hermite mode index beyond supported range");
  double w = std::sqrt(M_PI);
  for (int k = 1; k <= m; ++k) w *= 2.0 * k;
  return w;
}

HermiteExpansion HermiteExpansion::unit(double lambda, int m, cplx c) {
  HermiteExpansion e(lambda);
  e.add(m, c);
  return e;
}

cplx HermiteExpansion::coeff(int m) const {
  auto it = c_.find(m);
  return it == c_.end() ? cplx{0.0, 0.0} : it->second;
}

void HermiteExpansion::add(int m, cplx c) {
  if (m < 0 || c == cplx{0.0, 0.0}) return;
  if (m > HermiteBasis::kMaxMode) throw ConstructionError("Hermite mode overflow");
  cplx& slot = c_[m];
  slot += c;
  if (slot == cplx{0.0, 0.0}) c_.erase(m);
}

void HermiteExpansion::set(int m, cplx c) {
  if (m < 0) throw std::invalid_argument("negative Hermite index");
  if (c == cplx{0.0, 0.0})
    c_.erase(m);
  else
    c_[m] = c;
}

void HermiteExpansion::check_same_basis(const HermiteExpansion& o) const {
  if (std::abs(basis_.lambda - o.basis_.lambda) > 1e-14 * std::abs(basis_.lambda))
    throw ConstructionError("mixing Hermite expansions with different scales");
}

HermiteExpansion HermiteExpansion::operator+(const HermiteExpansion& o) const {
  HermiteExpansion r = *this;
  r += o;
  return r;
}

HermiteExpansion& HermiteExpansion::operator+=(const HermiteExpansion& o) {
  if (c_.empty() && !o.c_.empty()) basis_ = o.basis_;
  if (!o.c_.empty()) check_same_basis(o);
  for (const auto& [m, c] : o.c_) add(m, c);
  return *this;
}

HermiteExpansion HermiteExpansion::operator-(const HermiteExpansion& o) const {
  return *this + o * cplx{-1.0, 0.0};
}

HermiteExpansion HermiteExpansion::operator*(cplx s) const {
  HermiteExpansion r(basis_.lambda);
  if (s == cplx{0.0, 0.0}) return r;
  for (const auto& [m, c] : c_) r.c_[m] = c * s;
  return r;
}

double HermiteExpansion::norm_sq() const {
  double s = 0.0;
  for (const auto& [m, c] : c_) s += std::norm(c) * HermiteBasis::weight(m);
  return s;
}

HermiteExpansion HermiteExpansion::pruned(double tol_rel) const {
  double top = 0.0;
  for (const auto& [m, c] : c_) top = std::max(top, std::abs(c));
  HermiteExpansion r(basis_.lambda);
  for (const auto& [m, c] : c_)
    if (std::abs(c) > tol_rel * top) r.c_[m] = c;
  return r;
}

cplx HermiteExpansion::eval(double t) const {
  cplx s{0.0, 0.0};
  for (const auto& [m, c] : c_) s += c * basis_.h(m, t);
  return s;
}

namespace {
using Map = std::map<int, cplx>;

template <typename Rule>
HermiteExpansion apply_rule(const HermiteExpansion& e, Rule rule) {
  HermiteExpansion out(e.lambda());
  for (const auto& [m, c] : e.coeffs()) rule(out, m, c);
  return out;
}
}  // namespace

HermiteExpansion mul_t(const HermiteExpansion& e) {
  double f = 0.5 / std::sqrt(e.lambda());
  return apply_rule(e, [f](HermiteExpansion& out, int m, cplx c) {
    out.add(m + 1, c * f);
    out.add(m - 1, c * (2.0 * m * f));
  });
}

HermiteExpansion mul_t2(const HermiteExpansion& e) {
  double f = 0.25 / e.lambda();
  return apply_rule(e, [f](HermiteExpansion& out, int m, cplx c) {
    out.add(m + 2, c * f);
    out.add(m, c * ((4.0 * m + 2.0) * f));
    out.add(m - 2, c * (4.0 * m * (m - 1.0) * f));
  });
}

HermiteExpansion mul_t3(const HermiteExpansion& e) {
  double f = 0.125 / std::pow(e.lambda(), 1.5);
  return apply_rule(e, [f](HermiteExpansion& out, int m, cplx c) {
    out.add(m + 3, c * f);
    out.add(m + 1, c * ((6.0 * m + 6.0) * f));
    out.add(m - 1, c * (12.0 * m * m * f));
    out.add(m - 3, c * (8.0 * m * (m - 1.0) * (m - 2.0) * f));
  });
}

HermiteExpansion apply_dt(const HermiteExpansion& e) {
  cplx f = cplx{0.0, 0.5} * std::sqrt(e.lambda());
  return apply_rule(e, [f](HermiteExpansion& out, int m, cplx c) {
    out.add(m + 1, c * f);
    out.add(m - 1, -c * (2.0 * m) * f);
  });
}

HermiteExpansion apply_dt_t2_sym(const HermiteExpansion& e) {
  cplx f = cplx{0.0, 0.25} / std::sqrt(e.lambda());
  return apply_rule(e, [f](HermiteExpansion& out, int m, cplx c) {
    out.add(m + 3, c * f);
    out.add(m + 1, c * (2.0 * m + 2.0) * f);
    out.add(m - 1, -c * (4.0 * m * m) * f);
    out.add(m - 3, -c * (8.0 * m * (m - 1.0) * (m - 2.0)) * f);
  });
}

HermiteExpansion apply_dt_t4_sym(const HermiteExpansion& e) {
  cplx f = cplx{0.0, 1.0 / 16.0} / std::pow(e.lambda(), 1.5);
  return apply_rule(e, [f](HermiteExpansion& out, int m, cplx c) {
    double md = m;
    out.add(m + 5, c * f);
    out.add(m + 3, c * (6.0 * md + 12.0) * f);
    out.add(m + 1, c * (4.0 * (2.0 * md * md + 4.0 * md + 3.0)) * f);
    out.add(m - 1, -c * (8.0 * (2.0 * md * md + 1.0) * md) * f);
    out.add(m - 3, -c * (48.0 * md * (md - 1.0) * (md - 1.0) * (md - 2.0)) * f);
    out.add(m - 5, -c * (32.0 * md * (md - 1.0) * (md - 2.0) * (md - 3.0) * (md - 4.0)) * f);
  });
}

cplx inner(const HermiteExpansion& a, const HermiteExpansion& b) {
  if (!a.coeffs().empty() && !b.coeffs().empty() &&
      std::abs(a.lambda() - b.lambda()) > 1e-14 * std::abs(a.lambda()))
    throw ConstructionError("inner product across different Hermite scales");
  cplx s{0.0, 0.0};
  for (const auto& [m, c] : a.coeffs()) {
    cplx d = b.coeff(m);
    if (d != cplx{0.0, 0.0}) s += c * std::conj(d) * HermiteBasis::weight(m);
  }
  return s;
}

namespace {

// Orthonormal Hermite functions hhat_{n}(x) and hhat_{n-1}(x) by the stable
// upward recurrence (all values O(1) inside the node range).
void hermite_fn_pair(int n, double x, double* hn, double* hn1) {
  double prev = 0.0;
  double cur = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
  for (int m = 0; m < n; ++m) {
    const double next =
        std::sqrt(2.0 / (m + 1)) * x * cur - std::sqrt(double(m) / (m + 1)) * prev;
    prev = cur;
    cur = next;
  }
  *hn = cur;
  *hn1 = prev;
}

}  // namespace

GaussHermiteRule gauss_hermite(int n) {
  if (n < 1) throw ConstructionError("quadrature needs at least one node");
  if (n > 640) {
    // The seed of the recurrence underflows beyond the largest node of rules
    // this size; no caller needs more resolution than this.
    throw ConstructionError("quadrature rule capped at 640 nodes");
  }
  // Eigenvalues of the Jacobi matrix seed a Newton polish on hhat_n; the
  // weights then come out in compensated form 1/(n hhat_{n-1}^2) with O(1)
  // arithmetic throughout, so nodes and weights are accurate to rounding.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  GaussHermiteRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  r.comp_weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()[i];
    double hn = 0.0, hn1 = 0.0;
    for (int iter = 0; iter < 8; ++iter) {
      hermite_fn_pair(n, x, &hn, &hn1);
      // hhat_n'(x) = -x hhat_n + sqrt(2n) hhat_{n-1}
      const double dh = -x * hn + std::sqrt(2.0 * n) * hn1;
      const double step = hn / dh;
      x -= step;
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(x))) break;
    }
    hermite_fn_pair(n, x, &hn, &hn1);
    r.nodes[i] = x;
    r.comp_weights[i] = 1.0 / (double(n) * hn1 * hn1);
    r.weights[i] = r.comp_weights[i] * std::exp(-x * x);  // may underflow far out
  }
  return r;
}

HermiteExpansion project_function(double lambda, int mmax, const std::function<cplx(double)>& f,
                                  int quad_points) {
  // Accumulate the coefficients against the L2-orthonormal functions
  // hat_h_m(s) = H_m(s) e^{-s^2/2} / sqrt(||H_m||^2) (values O(1), so the
  // quadrature noise floor stays at machine precision for every mode), then
  // rescale: c_m = I_m / (sqrt(l) sqrt(||H_m||^2)) with I_m = int f hat_h_m ds.
  GaussHermiteRule rule = gauss_hermite(quad_points);
  const double sql = std::sqrt(lambda);
  std::vector<cplx> I(std::size_t(mmax) + 1, cplx(0.0, 0.0));
  std::vector<double> col(std::size_t(mmax) + 1);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double s = rule.nodes[q];
    double prev = 0.0;
    double cur = std::pow(M_PI, -0.25) * std::exp(-0.5 * s * s);
    for (int m = 0; m <= mmax; ++m) {
      col[std::size_t(m)] = cur;
      const double next =
          std::sqrt(2.0 / (m + 1)) * s * cur - std::sqrt(double(m) / (m + 1)) * prev;
      prev = cur;
      cur = next;
    }
    const cplx fw = rule.comp_weights[q] * f(s / sql);
    for (int m = 0; m <= mmax; ++m) I[std::size_t(m)] += fw * col[std::size_t(m)];
  }
  double top = 0.0;
  for (const cplx& v : I) top = std::max(top, std::abs(v));
  HermiteExpansion out(lambda);
  for (int m = 0; m <= mmax; ++m) {
    // Drop modes at the quadrature noise floor: they are meaningless and the
    // factorial basis weights would amplify them downstream.
    if (std::abs(I[std::size_t(m)]) <= 1e-15 * top) continue;
    out.set(m, I[std::size_t(m)] / (sql * std::sqrt(HermiteBasis::weight(m))));
  }
  return out;
}

}  // namespace magwell
