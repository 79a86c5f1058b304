#pragma once

#include <vector>

namespace magwell {

// Constant-coefficient 1D operator
//   A Dt^2 + B (Dt t + t Dt) + C t^2 + alpha t + beta Dt + gamma,
// with D_t = -i d/dt.  Requires A > 0; self-adjoint on L^2(R) whenever the
// coefficients are real and C - B^2/A > 0 (harmonic confinement).
struct Oscillator1D {
  double A = 1.0;
  double B = 0.0;
  double C = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

// Lowest `count` eigenvalues of the Dirichlet finite-difference restriction to
// [-L, L] with n interior points.  The complex Hermitian tridiagonal matrix is
// reduced to a real symmetric one by a diagonal phase similarity.
std::vector<double> osc1d_eigenvalues(const Oscillator1D& op, double L, int n, int count);

// Same, with one Richardson step (grids n and 2n+1) removing the O(dx^2) term.
std::vector<double> osc1d_eigenvalues_richardson(const Oscillator1D& op, double L, int n,
                                                 int count);

}  // namespace magwell
