#include "magwell/poly_diff_op.hpp"

#include <cmath>
#include <cstdio>

#include "magwell/errors.hpp"

namespace magwell {

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= double(i);
  return r;
}

// Powers of (-i).
cplx neg_i_pow(int k) {
  static const cplx table[4] = {cplx(1, 0), cplx(0, -1), cplx(-1, 0), cplx(0, 1)};
  return table[k & 3];
}

}  // namespace

void PolyDiffOp::add_term(const Key& k, cplx c) {
  if (c == cplx(0.0, 0.0)) return;
  for (int v = 0; v < 3; ++v) {
    if (k[2 * v] < 0 || k[2 * v + 1] < 0) {
      throw ConstructionError("operator term with negative power");
    }
    if (k[2 * v] > kMaxPolyPower) {
      throw ConstructionError("operator term exceeds polynomial power cap");
    }
    if (k[2 * v + 1] > kMaxDerivPower) {
      throw ConstructionError("operator term exceeds derivative power cap");
    }
  }
  cplx& slot = c_[k];
  slot += c;
  if (slot == cplx(0.0, 0.0)) c_.erase(k);
}

PolyDiffOp PolyDiffOp::identity() {
  PolyDiffOp p;
  p.c_[Key{0, 0, 0, 0, 0, 0}] = cplx(1.0, 0.0);
  return p;
}

PolyDiffOp PolyDiffOp::monomial(const Key& k, cplx c) {
  PolyDiffOp p;
  p.add_term(k, c);
  return p;
}

PolyDiffOp PolyDiffOp::position(Var v) {
  Key k{0, 0, 0, 0, 0, 0};
  k[2 * vix(v)] = 1;
  return monomial(k, cplx(1.0, 0.0));
}

PolyDiffOp PolyDiffOp::momentum(Var v) {
  Key k{0, 0, 0, 0, 0, 0};
  k[2 * vix(v) + 1] = 1;
  return monomial(k, cplx(1.0, 0.0));
}

PolyDiffOp PolyDiffOp::operator+(const PolyDiffOp& o) const {
  PolyDiffOp out = *this;
  out += o;
  return out;
}

PolyDiffOp PolyDiffOp::operator-(const PolyDiffOp& o) const {
  PolyDiffOp out = *this;
  out += o * cplx(-1.0, 0.0);
  return out;
}

PolyDiffOp& PolyDiffOp::operator+=(const PolyDiffOp& o) {
  for (const auto& [k, c] : o.c_) add_term(k, c);
  return *this;
}

PolyDiffOp PolyDiffOp::operator*(cplx s) const {
  PolyDiffOp out;
  if (s == cplx(0.0, 0.0)) return out;
  for (const auto& [k, c] : c_) out.c_[k] = c * s;
  return out;
}

PolyDiffOp PolyDiffOp::operator*(const PolyDiffOp& o) const {
  // (t^a1 D^b1)(t^a2 D^b2) per variable:
  //   sum_k C(b1,k) C(a2,k) k! (-i)^k t^(a1+a2-k) D^(b1+b2-k)
  PolyDiffOp out;
  for (const auto& [ka, ca] : c_) {
    for (const auto& [kb, cb] : o.c_) {
      // Loop over the contraction count in each variable.
      const int m0 = std::min(ka[1], kb[0]);
      const int m1 = std::min(ka[3], kb[2]);
      const int m2 = std::min(ka[5], kb[4]);
      for (int k0 = 0; k0 <= m0; ++k0) {
        const double f0 = binom(ka[1], k0) * binom(kb[0], k0) * factorial(k0);
        for (int k1 = 0; k1 <= m1; ++k1) {
          const double f1 = binom(ka[3], k1) * binom(kb[2], k1) * factorial(k1);
          for (int k2 = 0; k2 <= m2; ++k2) {
            const double f2 = binom(ka[5], k2) * binom(kb[4], k2) * factorial(k2);
            Key k{ka[0] + kb[0] - k0, ka[1] + kb[1] - k0,
                  ka[2] + kb[2] - k1, ka[3] + kb[3] - k1,
                  ka[4] + kb[4] - k2, ka[5] + kb[5] - k2};
            out.add_term(k, ca * cb * (f0 * f1 * f2) * neg_i_pow(k0 + k1 + k2));
          }
        }
      }
    }
  }
  return out;
}

PolyDiffOp& PolyDiffOp::operator*=(const PolyDiffOp& o) {
  *this = *this * o;
  return *this;
}

PolyDiffOp PolyDiffOp::adjoint() const {
  // (t^a D^b)^* = D^b t^a with the conjugate coefficient; rebuild each term
  // through the composition rule so it comes back normal-ordered.
  PolyDiffOp out;
  for (const auto& [k, c] : c_) {
    PolyDiffOp term = identity() * std::conj(c);
    for (int v = 0; v < 3; ++v) {
      Var var = static_cast<Var>(v);
      for (int i = 0; i < k[2 * v + 1]; ++i) term = term * momentum(var);
      for (int i = 0; i < k[2 * v]; ++i) term = term * position(var);
    }
    out += term;
  }
  return out;
}

TensorHermiteExpansion PolyDiffOp::apply(const TensorHermiteExpansion& u) const {
  TensorHermiteExpansion out = TensorHermiteExpansion::zero_like(u);
  for (const auto& [k, c] : c_) {
    TensorHermiteExpansion w = u;
    for (int v = 0; v < 3; ++v) {
      Var var = static_cast<Var>(v);
      // Derivatives act first, multiplications after (normal order).
      for (int i = 0; i < k[2 * v + 1]; ++i) {
        w = w.apply_along(var, [](const HermiteExpansion& e) { return apply_dt(e); });
      }
      for (int i = 0; i < k[2 * v]; ++i) {
        w = w.apply_along(var, [](const HermiteExpansion& e) { return mul_t(e); });
      }
    }
    out += w * c;
  }
  return out;
}

std::string PolyDiffOp::to_string() const {
  if (c_.empty()) return "0";
  static const char* names[6] = {"x", "Dx", "eta", "Deta", "z", "Dz"};
  std::string s;
  for (const auto& [k, c] : c_) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "(%.17g%+.17gi)", c.real(), c.imag());
    if (!s.empty()) s += " + ";
    s += buf;
    for (int i = 0; i < 6; ++i) {
      if (k[i] == 0) continue;
      s += " ";
      s += names[i];
      if (k[i] > 1) {
        std::snprintf(buf, sizeof(buf), "^%d", k[i]);
        s += buf;
      }
    }
  }
  return s;
}

}  // namespace magwell
