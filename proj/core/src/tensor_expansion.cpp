#include "magwell/tensor_expansion.hpp"

#include <cmath>
#include <cstdlib>

#include "magwell/errors.hpp"

namespace magwell {

TensorHermiteExpansion TensorHermiteExpansion::zero_like(const TensorHermiteExpansion& proto) {
  TensorHermiteExpansion out;
  out.lambda_ = proto.lambda_;
  out.active_ = proto.active_;
  return out;
}

TensorHermiteExpansion TensorHermiteExpansion::from_1d(Var v, const HermiteExpansion& e) {
  TensorHermiteExpansion out;
  out.active_[vix(v)] = true;
  out.lambda_[vix(v)] = e.lambda();
  for (const auto& [m, c] : e.coeffs()) {
    Key k{0, 0, 0};
    k[vix(v)] = m;
    out.c_[k] = c;
  }
  return out;
}

TensorHermiteExpansion TensorHermiteExpansion::tensor(const TensorHermiteExpansion& a,
                                                      const TensorHermiteExpansion& b) {
  for (int i = 0; i < 3; ++i) {
    if (a.active_[i] && b.active_[i]) {
      throw ConstructionError("tensor: overlapping active variables");
    }
  }
  TensorHermiteExpansion out;
  for (int i = 0; i < 3; ++i) {
    out.active_[i] = a.active_[i] || b.active_[i];
    out.lambda_[i] = a.active_[i] ? a.lambda_[i] : b.lambda_[i];
  }
  for (const auto& [ka, ca] : a.c_) {
    for (const auto& [kb, cb] : b.c_) {
      Key k;
      for (int i = 0; i < 3; ++i) k[i] = ka[i] + kb[i];
      cplx v = ca * cb;
      if (v != cplx(0.0, 0.0)) out.c_[k] += v;
    }
  }
  return out;
}

cplx TensorHermiteExpansion::coeff(const Key& k) const {
  auto it = c_.find(k);
  return it == c_.end() ? cplx(0.0, 0.0) : it->second;
}

void TensorHermiteExpansion::add(const Key& k, cplx c) {
  for (int i = 0; i < 3; ++i) {
    if (!active_[i] && k[i] != 0) {
      throw ConstructionError("add: nonzero index in inactive variable");
    }
    if (k[i] < 0) return;  // annihilated by a lowering rule
  }
  cplx& slot = c_[k];
  slot += c;
  if (slot == cplx(0.0, 0.0)) c_.erase(k);
}

int TensorHermiteExpansion::max_index(Var v) const {
  int m = 0;
  for (const auto& [k, c] : c_) {
    (void)c;
    if (k[vix(v)] > m) m = k[vix(v)];
  }
  return m;
}

void TensorHermiteExpansion::check_compatible(const TensorHermiteExpansion& o) const {
  if (c_.empty()) return;
  if (o.c_.empty()) return;
  for (int i = 0; i < 3; ++i) {
    if (active_[i] != o.active_[i]) {
      throw ConstructionError("tensor expansion variable sets differ");
    }
    if (active_[i] && std::abs(lambda_[i] - o.lambda_[i]) >
                          1e-12 * (std::abs(lambda_[i]) + std::abs(o.lambda_[i]))) {
      throw ConstructionError("tensor expansion scales differ");
    }
  }
}

TensorHermiteExpansion TensorHermiteExpansion::operator+(const TensorHermiteExpansion& o) const {
  TensorHermiteExpansion out = *this;
  out += o;
  return out;
}

TensorHermiteExpansion TensorHermiteExpansion::operator-(const TensorHermiteExpansion& o) const {
  TensorHermiteExpansion out = *this;
  out += o * cplx(-1.0, 0.0);
  return out;
}

TensorHermiteExpansion TensorHermiteExpansion::operator*(cplx s) const {
  TensorHermiteExpansion out = zero_like(*this);
  if (s == cplx(0.0, 0.0)) return out;
  for (const auto& [k, c] : c_) out.c_[k] = c * s;
  return out;
}

TensorHermiteExpansion& TensorHermiteExpansion::operator+=(const TensorHermiteExpansion& o) {
  if (c_.empty() && o.c_.empty()) return *this;
  if (c_.empty()) {
    lambda_ = o.lambda_;
    active_ = o.active_;
  }
  check_compatible(o);
  for (const auto& [k, c] : o.c_) {
    cplx& slot = c_[k];
    slot += c;
    if (slot == cplx(0.0, 0.0)) c_.erase(k);
  }
  return *this;
}

double TensorHermiteExpansion::norm_sq() const {
  double acc = 0.0;
  for (const auto& [k, c] : c_) {
    double w = 1.0;
    for (int i = 0; i < 3; ++i) {
      if (active_[i]) w *= HermiteBasis::weight(k[i]);
    }
    acc += std::norm(c) * w;
  }
  return acc;
}

TensorHermiteExpansion TensorHermiteExpansion::pruned(double tol_abs) const {
  TensorHermiteExpansion out = zero_like(*this);
  for (const auto& [k, c] : c_) {
    if (std::abs(c) > tol_abs) out.c_[k] = c;
  }
  return out;
}

TensorHermiteExpansion TensorHermiteExpansion::apply_along(
    Var v, const std::function<HermiteExpansion(const HermiteExpansion&)>& op1d) const {
  if (!active_[vix(v)]) {
    throw ConstructionError("apply_along: variable is inactive");
  }
  TensorHermiteExpansion out = zero_like(*this);
  for (const auto& [k, c] : c_) {
    HermiteExpansion e = HermiteExpansion::unit(lambda_[vix(v)], k[vix(v)], c);
    HermiteExpansion r = op1d(e);
    for (const auto& [m, cm] : r.coeffs()) {
      Key kk = k;
      kk[vix(v)] = m;
      out.add(kk, cm);
    }
  }
  return out;
}

TensorHermiteExpansion TensorHermiteExpansion::project(Var v, int mode) const {
  if (!active_[vix(v)]) {
    throw ConstructionError("project: variable is inactive");
  }
  TensorHermiteExpansion out;
  out.lambda_ = lambda_;
  out.active_ = active_;
  out.active_[vix(v)] = false;
  for (const auto& [k, c] : c_) {
    if (k[vix(v)] != mode) continue;
    Key kk = k;
    kk[vix(v)] = 0;
    out.c_[kk] += c;
  }
  return out;
}

TensorHermiteExpansion TensorHermiteExpansion::tensor_with_mode(Var v, double lambda,
                                                                int mode) const {
  if (active_[vix(v)]) {
    throw ConstructionError("tensor_with_mode: variable already active");
  }
  TensorHermiteExpansion out;
  out.lambda_ = lambda_;
  out.active_ = active_;
  out.active_[vix(v)] = true;
  out.lambda_[vix(v)] = lambda;
  for (const auto& [k, c] : c_) {
    Key kk = k;
    kk[vix(v)] = mode;
    out.c_[kk] = c;
  }
  return out;
}

cplx TensorHermiteExpansion::eval(const std::array<double, 3>& t) const {
  std::array<HermiteBasis, 3> bases{HermiteBasis(lambda_[0]), HermiteBasis(lambda_[1]),
                                    HermiteBasis(lambda_[2])};
  cplx acc(0.0, 0.0);
  for (const auto& [k, c] : c_) {
    double w = 1.0;
    for (int i = 0; i < 3; ++i) {
      if (active_[i]) w *= bases[i].h(k[i], t[i]);
    }
    acc += c * w;
  }
  return acc;
}

HermiteExpansion to_1d(const TensorHermiteExpansion& e, Var v) {
  for (int i = 0; i < 3; ++i) {
    const bool should = (i == vix(v));
    if (e.active_mask()[i] != should) {
      throw ConstructionError("to_1d: expansion is not one-dimensional in the requested variable");
    }
  }
  HermiteExpansion out(e.lambda(v));
  for (const auto& [k, c] : e.coeffs()) out.add(k[vix(v)], c);
  return out;
}

cplx inner(const TensorHermiteExpansion& a, const TensorHermiteExpansion& b) {
  if (!a.empty() && !b.empty() && a.active_mask() != b.active_mask()) {
    throw ConstructionError("inner: tensor expansion variable sets differ");
  }
  cplx acc(0.0, 0.0);
  const auto& ca = a.coeffs();
  for (const auto& [k, c] : ca) {
    cplx cb = b.coeff(k);
    if (cb == cplx(0.0, 0.0)) continue;
    double w = 1.0;
    for (int i = 0; i < 3; ++i) {
      if (a.active(static_cast<Var>(i))) w *= HermiteBasis::weight(k[i]);
    }
    acc += c * std::conj(cb) * w;
  }
  return acc;
}

}  // namespace magwell
