#pragma once

#include <array>
#include <functional>
#include <map>

#include "magwell/hermite.hpp"

namespace magwell {

// The three variables of the reduced problem, in storage order.
enum class Var : int { X = 0, Eta = 1, Z = 2 };
inline int vix(Var v) { return static_cast<int>(v); }

// Finite combination sum_K c_K prod_{v active} h_{K_v}(t_v) over per-variable
// Hermite scales.  Inactive variables are absent from the function (their key
// slot is pinned to zero), which lets the same type carry 1-, 2- and 3-variable
// objects through the solver.
class TensorHermiteExpansion {
public:
  using Key = std::array<int, 3>;

  TensorHermiteExpansion() = default;

  static TensorHermiteExpansion zero_like(const TensorHermiteExpansion& proto);
  static TensorHermiteExpansion from_1d(Var v, const HermiteExpansion& e);
  // Outer product; active variable sets must be disjoint.
  static TensorHermiteExpansion tensor(const TensorHermiteExpansion& a,
                                       const TensorHermiteExpansion& b);

  bool active(Var v) const { return active_[vix(v)]; }
  const std::array<bool, 3>& active_mask() const { return active_; }
  double lambda(Var v) const { return lambda_[vix(v)]; }

  cplx coeff(const Key& k) const;
  void add(const Key& k, cplx c);
  const std::map<Key, cplx>& coeffs() const { return c_; }
  bool empty() const { return c_.empty(); }
  int max_index(Var v) const;

  TensorHermiteExpansion operator+(const TensorHermiteExpansion& o) const;
  TensorHermiteExpansion operator-(const TensorHermiteExpansion& o) const;
  TensorHermiteExpansion operator*(cplx s) const;
  TensorHermiteExpansion& operator+=(const TensorHermiteExpansion& o);

  double norm_sq() const;  // scale-free: sum |c_K|^2 prod weights
  TensorHermiteExpansion pruned(double tol_abs) const;

  // Applies a one-variable coefficient map (e.g. mul_t / apply_dt) along v.
  TensorHermiteExpansion apply_along(
      Var v, const std::function<HermiteExpansion(const HermiteExpansion&)>& op1d) const;

  // Coefficient of basis mode `mode` in variable v, as an expansion over the
  // remaining variables (== <., h_mode>_v / ||h_mode||^2 by orthogonality).
  TensorHermiteExpansion project(Var v, int mode) const;

  // Multiplies by h_mode in a currently inactive variable v.
  TensorHermiteExpansion tensor_with_mode(Var v, double lambda, int mode) const;

  cplx eval(const std::array<double, 3>& t) const;

private:
  std::array<double, 3> lambda_{1.0, 1.0, 1.0};
  std::array<bool, 3> active_{false, false, false};
  std::map<Key, cplx> c_;

  void check_compatible(const TensorHermiteExpansion& o) const;
};

cplx inner(const TensorHermiteExpansion& a, const TensorHermiteExpansion& b);

// Converts an expansion whose only active variable is v into a 1D expansion.
HermiteExpansion to_1d(const TensorHermiteExpansion& e, Var v);

}  // namespace magwell
