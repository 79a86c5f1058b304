#pragma once

// Shared model fields and small helpers for the test suite.
//
// All four fields place a non-degenerate magnetic well at the origin with
// |B| = 1 there, so closed-form invariants are easy to state:
//
//   isotropic    A = (0, x + x^3/3 + x y^2 + x z^2, 0)
//                |B| ~ 1 + x^2 + y^2 + z^2,  Hess = 2I, d = 8, a = 1
//   anisotropic  A = (0, x + x^3/3 + 2 x y^2 + 3 x z^2, 0)
//                Hess = diag(2,4,6), d = 48, a = 3
//   sheared      isotropic + A_1 = z^2/2 (adds B_2 = z, so beta3 = 1)
//                Hess = diag(2,2,3), d = 12, a = 3/2
//   tilted       isotropic + x^2 z / 2 in A_2 (tilts the Hessian in x-z)
//                Hess = [[2,0,1],[0,2,0],[1,0,2]], d = 6
//
// The tilted field activates the odd corrector chain (u_1 != 0); the sheared
// field activates the gauge-normalization step (chi != 0).

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <random>

#include "magwell/field.hpp"
#include "magwell/poly3.hpp"

namespace magwell::testing {

inline PolyVecField base_box(const char* name) {
  PolyVecField f;
  f.name = name;
  f.domain.min = Eigen::Vector3d(-8.0, -8.0, -8.0);
  f.domain.max = Eigen::Vector3d(8.0, 8.0, 8.0);
  return f;
}

inline PolyVecField isotropic_field() {
  PolyVecField f = base_box("isotropic");
  Poly3 ay = Poly3::variable(0);
  ay += Poly3::monomial({3, 0, 0}, 1.0 / 3.0);
  ay += Poly3::monomial({1, 2, 0}, 1.0);
  ay += Poly3::monomial({1, 0, 2}, 1.0);
  f.A[1] = ay;
  return f;
}

inline PolyVecField anisotropic_field() {
  PolyVecField f = base_box("anisotropic");
  Poly3 ay = Poly3::variable(0);
  ay += Poly3::monomial({3, 0, 0}, 1.0 / 3.0);
  ay += Poly3::monomial({1, 2, 0}, 2.0);
  ay += Poly3::monomial({1, 0, 2}, 3.0);
  f.A[1] = ay;
  return f;
}

inline PolyVecField sheared_field() {
  PolyVecField f = isotropic_field();
  f.name = "sheared";
  f.A[0] = Poly3::monomial({0, 0, 2}, 0.5);
  return f;
}

inline PolyVecField tilted_field() {
  PolyVecField f = isotropic_field();
  f.name = "tilted";
  f.A[1] += Poly3::monomial({2, 0, 1}, 0.5);
  return f;
}

// A'(X) = R A(R^T X): the potential seen after rotating the lab frame by R.
inline PolyVecField rotate_field(const PolyVecField& f, const Eigen::Matrix3d& R) {
  PolyVecField g = f;
  const Eigen::Matrix3d Rt = R.transpose();
  for (int i = 0; i < 3; ++i) {
    Poly3 ai;
    for (int j = 0; j < 3; ++j) {
      if (R(i, j) != 0.0) ai += f.A[std::size_t(j)].compose_affine(Rt, Eigen::Vector3d::Zero()) * R(i, j);
    }
    g.A[std::size_t(i)] = ai.pruned(0.0);
  }
  return g;
}

// A'(X) = A(X - x0): moves the well from the origin to x0.
inline PolyVecField translate_field(const PolyVecField& f, const Eigen::Vector3d& x0) {
  PolyVecField g = f;
  for (auto& a : g.A) a = a.compose_affine(Eigen::Matrix3d::Identity(), -x0);
  return g;
}

// Deterministic random polynomial of total degree <= dmax.
inline Poly3 random_poly(std::mt19937& rng, int dmax) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Poly3 p;
  for (int i = 0; i <= dmax; ++i)
    for (int j = 0; i + j <= dmax; ++j)
      for (int k = 0; i + j + k <= dmax; ++k)
        if (u(rng) > 0.2) p.add_term({i, j, k}, u(rng));
  return p;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace magwell::testing
