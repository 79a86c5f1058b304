#pragma once

#include <vector>

#include "magwell/discrete_op.hpp"

namespace magwell {

struct EigenPair {
  double value = 0.0;
  std::vector<zval> vector;
  double residual = 0.0;  // ||H v - value v|| / ||v||
};

struct LobpcgOptions {
  int count = 1;
  // Backward-error tolerance: converged when ||H v - theta v|| <= tol * scale,
  // where scale is the largest stencil diagonal (a cheap ||H|| estimate).
  // Absolute tolerances below scale * 1e-12 are unreachable in doubles.
  double tol = 1e-7;
  int max_iterations = 600;
  int block_extra = 4;   // block size = count + block_extra
  unsigned seed = 12345;  // deterministic start-vector fill
  int threads = 0;
  // Optional warm starts (e.g. rendered quasimodes); extra columns are
  // deterministic pseudo-random vectors.
  const std::vector<std::vector<zval>>* initial_guess = nullptr;
};

// Lowest eigenpairs of the Hermitian operator by a block preconditioned
// conjugate-direction iteration (diagonal preconditioner, per-iteration
// re-orthogonalization, Rayleigh-Ritz over the [X W P] subspace).
std::vector<EigenPair> lowest_eigenpairs(const DiscreteH& H, const LobpcgOptions& opt);
std::vector<EigenPair> lowest_eigenpairs(const DiscreteH& H, int count, double tol);

}  // namespace magwell
