#include "magwell/oscillator1d.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "magwell/errors.hpp"

namespace magwell {

std::vector<double> osc1d_eigenvalues(const Oscillator1D& op, double L, int n, int count) {
  if (!(op.A > 0.0)) throw ConstructionError("oscillator: leading coefficient must be positive");
  if (n < 3 || count < 1 || count > n) throw ConstructionError("oscillator: bad grid request");
  const double dx = 2.0 * L / double(n + 1);
  auto t_at = [&](int j) { return -L + dx * double(j + 1); };  // j = 0..n-1 interior

  // Hermitian tridiagonal entries:
  //   diag_j    = 2A/dx^2 + C t_j^2 + alpha t_j + gamma
  //   off_j     = -A/dx^2 - i (B m_j + beta/2) / dx,   m_j = (t_j + t_{j+1})/2
  // A diagonal phase similarity turns off_j into |off_j| without moving the
  // spectrum, leaving a real symmetric tridiagonal problem.
  Eigen::VectorXd diag(n), sub(n - 1);
  for (int j = 0; j < n; ++j) {
    const double t = t_at(j);
    diag[j] = 2.0 * op.A / (dx * dx) + op.C * t * t + op.alpha * t + op.gamma;
  }
  for (int j = 0; j + 1 < n; ++j) {
    const double m = 0.5 * (t_at(j) + t_at(j + 1));
    const std::complex<double> off(-op.A / (dx * dx), -(op.B * m + 0.5 * op.beta) / dx);
    sub[j] = std::abs(off);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw ConvergenceError("oscillator: tridiagonal eigensolver failed");
  }
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = es.eigenvalues()[i];
  return out;
}

std::vector<double> osc1d_eigenvalues_richardson(const Oscillator1D& op, double L, int n,
                                                 int count) {
  std::vector<double> coarse = osc1d_eigenvalues(op, L, n, count);
  std::vector<double> fine = osc1d_eigenvalues(op, L, 2 * n + 1, count);
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
  return out;
}

}  // namespace magwell
