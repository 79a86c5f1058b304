#include "magwell/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "magwell/errors.hpp"

namespace magwell {

DomainBox DomainBox::shrunk(double keep_fraction) const {
  Eigen::Vector3d c = 0.5 * (min + max);
  Eigen::Vector3d h = 0.5 * keep_fraction * (max - min);
  return DomainBox{c - h, c + h};
}

bool DomainBox::contains(const Eigen::Vector3d& X) const {
  for (int a = 0; a < 3; ++a)
    if (X[a] < min[a] || X[a] > max[a]) return false;
  return true;
}

int PolyVecField::max_degree() const {
  return std::max({A[0].total_degree(), A[1].total_degree(), A[2].total_degree()});
}

std::array<Poly3, 3> curl(const std::array<Poly3, 3>& A) {
  return {A[2].derivative(1) - A[1].derivative(2),
          A[0].derivative(2) - A[2].derivative(0),
          A[1].derivative(0) - A[0].derivative(1)};
}

std::array<Poly3, 3> curl(const PolyVecField& f) {
  if (f.max_degree() > Poly3::kInputDegreeCap)
    throw ParseError("potential degree " + std::to_string(f.max_degree()) +
                     " exceeds the supported cap " + std::to_string(Poly3::kInputDegreeCap));
  return curl(f.A);
}

Poly3 divergence(const std::array<Poly3, 3>& F) {
  return F[0].derivative(0) + F[1].derivative(1) + F[2].derivative(2);
}

namespace {

struct WellProblem {
  std::array<Poly3, 3> B;
  Poly3 S;                       // |B|^2
  std::array<Poly3, 3> gradS;
  std::array<std::array<Poly3, 3>, 3> hessS;

  explicit WellProblem(const PolyVecField& f) {
    B = curl(f);
    S = B[0] * B[0] + B[1] * B[1] + B[2] * B[2];
    for (int i = 0; i < 3; ++i) gradS[i] = S.derivative(i);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) hessS[i][j] = gradS[i].derivative(j);
  }

  double value(const Eigen::Vector3d& X) const { return S.eval(X); }
  Eigen::Vector3d grad(const Eigen::Vector3d& X) const {
    return {gradS[0].eval(X), gradS[1].eval(X), gradS[2].eval(X)};
  }
  Eigen::Matrix3d hess(const Eigen::Vector3d& X) const {
    Eigen::Matrix3d H;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) H(i, j) = hessS[i][j].eval(X);
    return H;
  }
};

// Damped Newton descent on |B|^2 from a seed; returns the polished point.
Eigen::Vector3d polish_minimum(const WellProblem& P, Eigen::Vector3d X, const DomainBox& box,
                               int max_iter) {
  double f = P.value(X);
  for (int it = 0; it < max_iter; ++it) {
    Eigen::Vector3d g = P.grad(X);
    if (g.norm() <= 1e-16 * std::max(1.0, std::abs(f))) break;
    Eigen::Matrix3d H = P.hess(X);
    // Regularize indefinite Hessians toward gradient descent.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(H);
    double lmin = es.eigenvalues().minCoeff();
    double shift = lmin <= 0 ? (-lmin + 1e-8 * std::max(1.0, std::abs(lmin))) : 0.0;
    Eigen::Matrix3d Hr = H + shift * Eigen::Matrix3d::Identity();
    Eigen::Vector3d step = Hr.ldlt().solve(-g);
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      Eigen::Vector3d Xn = X + t * step;
      double fn = P.value(Xn);
      if (fn < f) {
        X = Xn;
        f = fn;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    if (!box.contains(X)) break;
  }
  return X;
}

Eigen::Matrix3d hess_abs_B(const WellProblem& P, const Eigen::Vector3d& X, double b0) {
  // |B| = sqrt(S):  Hess|B| = HessS/(2|B|) - (gradS gradS^T)/(4 S^{3/2}).
  double S = P.value(X);
  Eigen::Vector3d g = P.grad(X);
  Eigen::Matrix3d H = P.hess(X);
  (void)b0;
  return H / (2.0 * std::sqrt(S)) - g * g.transpose() / (4.0 * std::pow(S, 1.5));
}

WellAnalysis analyze_at(const WellProblem& P, const PolyVecField& field,
                        const Eigen::Vector3d& X0, double shrink_fraction, int boundary_samples) {
  WellAnalysis w;
  w.X0 = X0;
  double S0 = P.value(X0);
  double scaleS = std::max(1.0, P.S.max_abs_coeff());
  if (S0 <= 1e-24 * scaleS)
    throw ZeroFieldViolation("field vanishes at the located minimum; |B(X0)|^2 = " +
                             std::to_string(S0));
  w.b0 = std::sqrt(S0);
  w.hessB = hess_abs_B(P, X0, w.b0);
  w.d = w.hessB.determinant();
  Eigen::Vector3d Bv{P.B[0].eval(X0), P.B[1].eval(X0), P.B[2].eval(X0)};
  w.a = Bv.dot(w.hessB * Bv) / (2.0 * w.b0 * w.b0);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(w.hessB);
  double tr = es.eigenvalues().cwiseAbs().sum();
  if (es.eigenvalues().minCoeff() <= 1e-10 * std::max(1.0, tr))
    throw NonDegenerateWellViolation(
        "Hessian of |B| at the minimum is not positive definite (eigenvalues " +
        std::to_string(es.eigenvalues()[0]) + ", " + std::to_string(es.eigenvalues()[1]) + ", " +
        std::to_string(es.eigenvalues()[2]) + ")");

  // Margin of the well depth against the boundary of the shrunk box.
  w.localization_box = field.domain.shrunk(shrink_fraction);
  const DomainBox& L = w.localization_box;
  double minB = std::numeric_limits<double>::infinity();
  int n = std::max(boundary_samples, 9);
  auto probe = [&](const Eigen::Vector3d& X) {
    minB = std::min(minB, std::sqrt(std::max(0.0, P.value(X))));
  };
  for (int face = 0; face < 6; ++face) {
    int axis = face / 2;
    double val = (face % 2 == 0) ? L.min[axis] : L.max[axis];
    int u = (axis + 1) % 3, v = (axis + 2) % 3;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Eigen::Vector3d X;
        X[axis] = val;
        X[u] = L.min[u] + (L.max[u] - L.min[u]) * i / double(n - 1);
        X[v] = L.min[v] + (L.max[v] - L.min[v]) * j / double(n - 1);
        probe(X);
      }
  }
  w.eps0_margin = minB - w.b0;
  return w;
}

}  // namespace

WellAnalysis find_well(const PolyVecField& field, const WellSearchOptions& opt) {
  WellProblem P(field);
  double scaleS = P.S.max_abs_coeff();
  if (scaleS == 0.0) throw ZeroFieldViolation("curl of the potential is identically zero");

  const DomainBox& box = field.domain;
  int n = std::max(opt.scan_points_per_axis, 5);
  std::vector<double> vals(static_cast<std::size_t>(n) * n * n);
  auto at = [&](int i, int j, int k) -> double& {
    return vals[(static_cast<std::size_t>(i) * n + j) * n + k];
  };
  auto node = [&](int i, int j, int k) {
    return Eigen::Vector3d{box.min[0] + (box.max[0] - box.min[0]) * i / double(n - 1),
                           box.min[1] + (box.max[1] - box.min[1]) * j / double(n - 1),
                           box.min[2] + (box.max[2] - box.min[2]) * k / double(n - 1)};
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) at(i, j, k) = P.value(node(i, j, k));

  // Local minima of the scan (26-neighborhood, ties allowed) seed the polish.
  std::vector<Eigen::Vector3d> seeds;
  double global_min = *std::min_element(vals.begin(), vals.end());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = at(i, j, k);
        bool is_min = true;
        for (int di = -1; di <= 1 && is_min; ++di)
          for (int dj = -1; dj <= 1 && is_min; ++dj)
            for (int dk = -1; dk <= 1 && is_min; ++dk) {
              if (di == 0 && dj == 0 && dk == 0) continue;
              int ii = i + di, jj = j + dj, kk = k + dk;
              if (ii < 0 || jj < 0 || kk < 0 || ii >= n || jj >= n || kk >= n) continue;
              if (at(ii, jj, kk) < v) is_min = false;
            }
        // Only chase minima that could plausibly compete with the global one.
        if (is_min && v <= global_min + 0.25 * (scaleS - global_min) + 1e-30)
          seeds.push_back(node(i, j, k));
      }
  if (seeds.empty()) seeds.push_back(0.5 * (box.min + box.max));
  if (seeds.size() > 64) seeds.resize(64);

  struct Candidate {
    Eigen::Vector3d X;
    double value;
  };
  std::vector<Candidate> minima;
  double diam = box.extent().norm();
  for (const auto& s : seeds) {
    Eigen::Vector3d X = polish_minimum(P, s, box, opt.max_newton_iterations);
    if (!box.contains(X)) continue;
    double v = P.value(X);
    bool merged = false;
    for (auto& c : minima)
      if ((c.X - X).norm() < 1e-6 * diam) {
        if (v < c.value) c = {X, v};
        merged = true;
        break;
      }
    if (!merged) minima.push_back({X, v});
  }
  if (minima.empty()) throw ConvergenceError("minimum search did not converge inside the domain");

  std::sort(minima.begin(), minima.end(),
            [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
  const Candidate& best = minima.front();

  // Gradient certificate: grad|B| = gradS/(2|B|).
  double b0 = std::sqrt(std::max(0.0, best.value));
  if (b0 > 0.0) {
    double gradB = P.grad(best.X).norm() / (2.0 * b0);
    if (gradB > 1e-12 * b0)
      throw ConvergenceError("polished minimum fails the gradient certificate: |grad|B||/b0 = " +
                             std::to_string(gradB / b0));
  }

  // Degeneracy is diagnosed before uniqueness: a flat family of minima is a
  // degenerate well, not a tie between isolated wells.
  WellAnalysis w = analyze_at(P, field, best.X, opt.shrink_fraction, 33);

  for (std::size_t m = 1; m < minima.size(); ++m) {
    if ((minima[m].X - best.X).norm() < 1e-5 * diam) continue;
    if (minima[m].value <= best.value + opt.value_tie_rel_tol * std::max(1.0, best.value))
      throw NonUniqueMinimum("two competing minima of |B|: value " + std::to_string(best.value) +
                             " at distance " + std::to_string((minima[m].X - best.X).norm()));
  }
  return w;
}

WellAnalysis invariants_at_well(const PolyVecField& field, const Eigen::Vector3d& X0) {
  WellProblem P(field);
  return analyze_at(P, field, X0, 0.8, 33);
}

}  // namespace magwell
