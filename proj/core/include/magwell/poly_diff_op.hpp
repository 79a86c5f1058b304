#pragma once

#include <array>
#include <map>
#include <string>

#include "magwell/tensor_expansion.hpp"

namespace magwell {

// Polynomial differential operator in (x, eta, z) with the semiclassical
// convention D_t = -i d/dt, kept in normal order: every term reads
//
//   c * x^k0 Dx^k1 * eta^k2 Deta^k3 * z^k4 Dz^k5
//
// with multiplications standing left of derivatives in each variable.
// Composition re-normal-orders exactly via
//   D^b t^c = sum_k C(b,k) C(c,k) k! (-i)^k t^(c-k) D^(b-k).
class PolyDiffOp {
public:
  using Key = std::array<int, 6>;  // powers of (x, Dx, eta, Deta, z, Dz)

  // Caps on any single term; exceeding them signals runaway algebra upstream.
  static constexpr int kMaxPolyPower = 8;
  static constexpr int kMaxDerivPower = 4;

  PolyDiffOp() = default;

  static PolyDiffOp identity();
  static PolyDiffOp monomial(const Key& k, cplx c);
  static PolyDiffOp position(Var v);  // multiplication by the variable
  static PolyDiffOp momentum(Var v);  // D_v

  const std::map<Key, cplx>& terms() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  std::size_t term_count() const { return c_.size(); }

  PolyDiffOp operator+(const PolyDiffOp& o) const;
  PolyDiffOp operator-(const PolyDiffOp& o) const;
  PolyDiffOp operator*(const PolyDiffOp& o) const;  // composition
  PolyDiffOp operator*(cplx s) const;
  friend PolyDiffOp operator*(cplx s, const PolyDiffOp& p) { return p * s; }
  PolyDiffOp& operator+=(const PolyDiffOp& o);
  PolyDiffOp& operator*=(const PolyDiffOp& o);

  PolyDiffOp adjoint() const;  // formal L^2(dx deta dz) adjoint

  TensorHermiteExpansion apply(const TensorHermiteExpansion& u) const;

  std::string to_string() const;

private:
  std::map<Key, cplx> c_;

  void add_term(const Key& k, cplx c);
};

}  // namespace magwell
