#pragma once

#include <complex>
#include <functional>
#include <map>
#include <vector>

namespace magwell {

using cplx = std::complex<double>;

// Scaled Hermite functions h_m(t) = sqrt(lambda) H_m(sqrt(lambda) t) exp(-lambda t^2 / 2)
// with the physicists' H_m.  All algebra below acts exactly on the
// coefficients of finite combinations of h_m at a fixed scale.
struct HermiteBasis {
  double lambda = 1.0;
  double h(int m, double t) const;                    // pointwise value
  static double weight(int m);                        // ||H_m||^2 = 2^m m! sqrt(pi)
  static constexpr int kMaxMode = 120;                // weight stays finite in double
};

class HermiteExpansion {
public:
  HermiteExpansion() = default;
  explicit HermiteExpansion(double lambda) : basis_{lambda} {}
  static HermiteExpansion unit(double lambda, int m, cplx c = 1.0);

  const HermiteBasis& basis() const { return basis_; }
  double lambda() const { return basis_.lambda; }

  cplx coeff(int m) const;
  void add(int m, cplx c);
  void set(int m, cplx c);
  const std::map<int, cplx>& coeffs() const { return c_; }
  bool empty() const { return c_.empty(); }
  int max_mode() const { return c_.empty() ? -1 : c_.rbegin()->first; }

  HermiteExpansion operator+(const HermiteExpansion& o) const;
  HermiteExpansion operator-(const HermiteExpansion& o) const;
  HermiteExpansion operator*(cplx s) const;
  HermiteExpansion& operator+=(const HermiteExpansion& o);

  // Scale-free coefficient norm: sum |c_m|^2 ||H_m||^2.
  double norm_sq() const;
  HermiteExpansion pruned(double tol_rel) const;

  cplx eval(double t) const;

private:
  HermiteBasis basis_;
  std::map<int, cplx> c_;
  void check_same_basis(const HermiteExpansion& o) const;
};

// Exact one-mode recurrences (coefficients of the image of h_m):
//   t h_m     = (1/(2 sqrt(l))) [h_{m+1} + 2m h_{m-1}]
//   t^2 h_m   = (1/(4l)) [h_{m+2} + (4m+2) h_m + 4m(m-1) h_{m-2}]
//   t^3 h_m   = (1/(8 l^{3/2})) [h_{m+3} + (6m+6) h_{m+1} + 12 m^2 h_{m-1}
//               + 8m(m-1)(m-2) h_{m-3}]
//   D_t h_m   = (i sqrt(l)/2) [h_{m+1} - 2m h_{m-1}]
//   (D_t t^2 + t^2 D_t) h_m = (i/(4 sqrt(l))) [h_{m+3} + (2m+2) h_{m+1}
//               - 4m^2 h_{m-1} - 8m(m-1)(m-2) h_{m-3}]
//   (t^4 D_t + D_t t^4) h_m = (i/(16 l^{3/2})) [h_{m+5} + (6m+12) h_{m+3}
//               + 4(2m^2+4m+3) h_{m+1} - 8(2m^2+1)m h_{m-1}
//               - 48 m (m-1)^2 (m-2) h_{m-3} - 32 m(m-1)(m-2)(m-3)(m-4) h_{m-5}]
HermiteExpansion mul_t(const HermiteExpansion& e);
HermiteExpansion mul_t2(const HermiteExpansion& e);
HermiteExpansion mul_t3(const HermiteExpansion& e);
HermiteExpansion apply_dt(const HermiteExpansion& e);
HermiteExpansion apply_dt_t2_sym(const HermiteExpansion& e);
HermiteExpansion apply_dt_t4_sym(const HermiteExpansion& e);

// Scale-free pairing sum_m a_m conj(b_m) ||H_m||^2 (bases must match).
cplx inner(const HermiteExpansion& a, const HermiteExpansion& b);

// --- quadrature utilities --------------------------------------------------
// Gauss-Hermite nodes/weights for weight exp(-s^2) (Golub-Welsch).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  // weights[i] * exp(nodes[i]^2), evaluated without the exponential blow-up;
  // use these when the Gaussian lives in the integrand instead of the weight.
  std::vector<double> comp_weights;
};
GaussHermiteRule gauss_hermite(int n);

// Coefficients of an arbitrary function f (decaying like the basis Gaussian)
// projected on h_0..h_{mmax}: c_m = <f, h_m>_{L2} / (sqrt(l) ||H_m||^2).
HermiteExpansion project_function(double lambda, int mmax,
                                  const std::function<cplx(double)>& f, int quad_points = 240);

}  // namespace magwell
