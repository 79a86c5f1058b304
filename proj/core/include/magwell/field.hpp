#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>

#include "magwell/poly3.hpp"

namespace magwell {

struct DomainBox {
  Eigen::Vector3d min{-1.0, -1.0, -1.0};
  Eigen::Vector3d max{1.0, 1.0, 1.0};
  Eigen::Vector3d extent() const { return max - min; }
  DomainBox shrunk(double keep_fraction) const;
  bool contains(const Eigen::Vector3d& X) const;
};

// Polynomial vector potential A : R^3 -> R^3 together with the box the
// analysis is confined to.
struct PolyVecField {
  std::array<Poly3, 3> A;
  DomainBox domain;
  std::string name;

  Eigen::Vector3d eval(const Eigen::Vector3d& X) const {
    return {A[0].eval(X), A[1].eval(X), A[2].eval(X)};
  }
  int max_degree() const;
};

// B = rot A, computed by exact coefficient differentiation.
std::array<Poly3, 3> curl(const PolyVecField& f);
std::array<Poly3, 3> curl(const std::array<Poly3, 3>& A);
Poly3 divergence(const std::array<Poly3, 3>& F);

struct WellAnalysis {
  Eigen::Vector3d X0 = Eigen::Vector3d::Zero();
  double b0 = 0.0;                      // |B(X0)|
  Eigen::Matrix3d hessB = Eigen::Matrix3d::Zero();  // Hess |B| at X0
  double d = 0.0;                       // det hessB
  double a = 0.0;                       // (hessB B, B)/(2 b0^2) at X0
  double eps0_margin = 0.0;             // min_{boundary of the shrunk box} |B| - b0
  DomainBox localization_box;           // the shrunk box the margin refers to
};

struct WellSearchOptions {
  int scan_points_per_axis = 33;
  double shrink_fraction = 0.8;   // localization box = domain shrunk to this fraction
  int max_newton_iterations = 100;
  // Distinct polished minima closer in value than this (relative) trip the
  // non-uniqueness error.
  double value_tie_rel_tol = 1e-8;
};

// Locates the non-degenerate minimum of |B| inside the domain box by grid
// scan + damped Newton on |B|^2, and computes the well invariants.
// Throws ZeroFieldViolation / NonDegenerateWellViolation / NonUniqueMinimum.
WellAnalysis find_well(const PolyVecField& field, const WellSearchOptions& opt = {});

// Recomputes (b0, hessB, d, a) at a given point without the search.
WellAnalysis invariants_at_well(const PolyVecField& field, const Eigen::Vector3d& X0);

// --- structured text input ----------------------------------------------
// Field files are JSON documents:
//   { "name": "...", "domain": {"min": [..], "max": [..]},
//     "A": [ [ {"exponents":[i,j,k], "coeff": c}, ... ], [...], [...] ] }
PolyVecField parse_field_file(const std::string& path);
PolyVecField parse_field_text(const std::string& text);
std::string field_to_json(const PolyVecField& f);
std::string well_report_json(const PolyVecField& f, const WellAnalysis& w);

}  // namespace magwell
