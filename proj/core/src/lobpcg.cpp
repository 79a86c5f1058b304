#include "magwell/lobpcg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "magwell/errors.hpp"

namespace magwell {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

void block_matvec(const DiscreteH& H, const Mat& X, Mat& Y, int threads) {
  Y.resize(X.rows(), X.cols());
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    H.matvec(X.col(c).data(), Y.col(c).data(), threads);
  }
}

// Orthonormalizes the columns of X in place (Cholesky QR with an
// eigendecomposition fallback); returns the number of kept columns.
Eigen::Index ortho_columns(Mat& X) {
  if (X.cols() == 0) return 0;
  Mat G = X.adjoint() * X;
  G = 0.5 * (G + G.adjoint()).eval();
  Eigen::LLT<Mat> llt(G);
  if (llt.info() == Eigen::Success) {
    const double cond_floor = 1e-12 * G.diagonal().real().maxCoeff();
    if (G.diagonal().real().minCoeff() > cond_floor) {
      Mat L = llt.matrixL();
      X = X * L.adjoint().inverse();
      return X.cols();
    }
  }
  // SVQB-style fallback: drop directions with tiny Gram eigenvalues.
  Eigen::SelfAdjointEigenSolver<Mat> es(G);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double cut = std::max(ev.maxCoeff(), 0.0) * 1e-10;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > cut) keep.push_back(i);
  }
  if (keep.empty()) return 0;
  Mat T(G.rows(), Eigen::Index(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    T.col(Eigen::Index(i)) = es.eigenvectors().col(keep[i]) / std::sqrt(ev[keep[i]]);
  }
  X = (X * T).eval();
  return X.cols();
}

}  // namespace

std::vector<EigenPair> lowest_eigenpairs(const DiscreteH& H, int count, double tol) {
  LobpcgOptions opt;
  opt.count = count;
  opt.tol = tol;
  return lowest_eigenpairs(H, opt);
}

std::vector<EigenPair> lowest_eigenpairs(const DiscreteH& H, const LobpcgOptions& opt) {
  const std::size_t N = H.dim();
  const int count = opt.count;
  if (count < 1 || count > 20) throw ConstructionError("eigensolver: count must be in [1,20]");
  if (std::size_t(count) > N) throw ConstructionError("eigensolver: count exceeds dimension");
  const Eigen::Index n = Eigen::Index(N);
  const Eigen::Index B =
      std::min<Eigen::Index>(n, Eigen::Index(count + std::max(0, opt.block_extra)));

  // Real positive diagonal for the Jacobi preconditioner.
  Eigen::VectorXd diag(n);
  for (std::size_t r = 0; r < N; ++r) {
    double d = 0.0;
    for (std::int64_t p = H.row_ptr[r]; p < H.row_ptr[r + 1]; ++p) {
      if (std::size_t(H.col[std::size_t(p)]) == r) d = H.val[std::size_t(p)].real();
    }
    diag[Eigen::Index(r)] = (d > 0.0 ? d : 1.0);
  }
  // Norm estimate scaling the convergence test (backward error, not absolute).
  const double scale = std::max(1.0, diag.maxCoeff());

  // Deterministic start block: provided guesses, then seeded pseudo-random.
  Mat X(n, B);
  Eigen::Index filled = 0;
  if (opt.initial_guess) {
    for (const auto& g : *opt.initial_guess) {
      if (filled >= B) break;
      if (g.size() != N) throw ConstructionError("eigensolver: guess dimension mismatch");
      for (Eigen::Index i = 0; i < n; ++i) X(i, filled) = g[std::size_t(i)];
      ++filled;
    }
  }
  std::mt19937 rng(opt.seed);
  auto unit_uniform = [&rng]() {
    // Raw 32-bit draws mapped to [-1,1]: identical across platforms.
    return 2.0 * (double(rng()) / 4294967295.0) - 1.0;
  };
  for (Eigen::Index c = filled; c < B; ++c) {
    for (Eigen::Index i = 0; i < n; ++i) X(i, c) = zval(unit_uniform(), unit_uniform());
  }
  if (ortho_columns(X) < B) {
    throw ConstructionError("eigensolver: start block is rank deficient");
  }

  Mat HX;
  block_matvec(H, X, HX, opt.threads);
  Mat P(n, 0), HP(n, 0);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(B);
  Eigen::VectorXd resid = Eigen::VectorXd::Constant(B, 1e300);
  bool converged = false;

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    // Rayleigh-Ritz on the current block.
    Mat M = X.adjoint() * HX;
    M = 0.5 * (M + M.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    theta = es.eigenvalues();
    X = (X * es.eigenvectors()).eval();
    HX = (HX * es.eigenvectors()).eval();

    Mat R = HX - X * theta.asDiagonal();
    for (Eigen::Index c = 0; c < B; ++c) resid[c] = R.col(c).norm();
    converged = true;
    for (int c = 0; c < count; ++c) converged = converged && (resid[c] <= opt.tol * scale);
    if (converged) break;

    // Preconditioned residuals, re-orthogonalized against X and P.
    Mat W = R;
    for (Eigen::Index c = 0; c < B; ++c) {
      W.col(c).array() /= diag.array();
    }
    W -= X * (X.adjoint() * W).eval();
    if (P.cols() > 0) W -= P * (P.adjoint() * W).eval();
    const Eigen::Index wk = ortho_columns(W);
    if (wk == 0) break;  // stagnation: residuals live inside span(X,P)
    Mat HW;
    block_matvec(H, W, HW, opt.threads);

    // Rayleigh-Ritz over S = [X W P] with Gram regularization.
    const Eigen::Index sb = B + wk + P.cols();
    Mat S(n, sb), HS(n, sb);
    S.leftCols(B) = X;
    S.middleCols(B, wk) = W;
    HS.leftCols(B) = HX;
    HS.middleCols(B, wk) = HW;
    if (P.cols() > 0) {
      S.rightCols(P.cols()) = P;
      HS.rightCols(P.cols()) = HP;
    }
    Mat Gs = S.adjoint() * S;
    Gs = 0.5 * (Gs + Gs.adjoint()).eval();
    Mat Ms = S.adjoint() * HS;
    Ms = 0.5 * (Ms + Ms.adjoint()).eval();

    Eigen::SelfAdjointEigenSolver<Mat> gs(Gs);
    const Eigen::VectorXd gev = gs.eigenvalues();
    const double cut = gev.maxCoeff() * 1e-10;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < gev.size(); ++i) {
      if (gev[i] > cut) keep.push_back(i);
    }
    if (Eigen::Index(keep.size()) < B) break;  // subspace collapsed; report current best
    Mat T(sb, Eigen::Index(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
      T.col(Eigen::Index(i)) = gs.eigenvectors().col(keep[i]) / std::sqrt(gev[keep[i]]);
    }
    Mat Mr = T.adjoint() * Ms * T;
    Mr = 0.5 * (Mr + Mr.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> er(Mr);
    Mat Y = T * er.eigenvectors().leftCols(B);

    // New X and the conjugate-direction block (W/P components of Y).
    Mat Yp = Y;
    Yp.topRows(B).setZero();
    Mat Xn = S * Y;
    Mat HXn = HS * Y;
    P = S * Yp;
    HP = HS * Yp;
    X = std::move(Xn);
    HX = std::move(HXn);
  }

  if (!converged) {
    char buf[160];
    std::string msg = "eigensolver: not converged; residuals:";
    for (int c = 0; c < count; ++c) {
      std::snprintf(buf, sizeof(buf), " %.3e", resid[c]);
      msg += buf;
    }
    throw ConvergenceError(msg);
  }

  std::vector<EigenPair> out;
  out.resize(std::size_t(count));
  for (int c = 0; c < count; ++c) {
    out[std::size_t(c)].value = theta[c];
    out[std::size_t(c)].residual = resid[c];
    out[std::size_t(c)].vector.resize(N);
    for (Eigen::Index i = 0; i < n; ++i) out[std::size_t(c)].vector[std::size_t(i)] = X(i, c);
  }
  return out;
}

}  // namespace magwell
