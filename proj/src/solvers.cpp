#include "magnon/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "magnon/errors.hpp"

namespace magnon {

namespace {

using Eigen::Index;
using Eigen::MatrixXcd;

MatrixXcd random_block(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXcd m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(gauss(rng), gauss(rng));
  }
  return m;
}

// Orthonormalizes the columns of w against basis[:, :count] and each other
// (classical Gram-Schmidt, applied twice). Columns that collapse are refilled
// with random directions so the block keeps its width.
void orthonormalize_against(const MatrixXcd& basis, Index count, MatrixXcd& w, std::mt19937_64& rng) {
  const Index n = w.rows();
  for (Index j = 0; j < w.cols(); ++j) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      const double scale = std::max(w.col(j).norm(), 1e-300);
      for (int pass = 0; pass < 2; ++pass) {
        if (count > 0) w.col(j) -= basis.leftCols(count) * (basis.leftCols(count).adjoint() * w.col(j));
        for (Index i = 0; i < j; ++i) w.col(j) -= w.col(i) * w.col(i).dot(w.col(j));
      }
      const double norm = w.col(j).norm();
      if (norm > 1e-10 * scale && norm > 1e-200) {
        w.col(j) /= norm;
        break;
      }
      w.col(j) = random_block(n, 1, rng);
    }
  }
}

}  // namespace

HermitianOperator as_operator(const SparseHermitian& h) {
  auto matrix = std::make_shared<Eigen::SparseMatrix<Complex, Eigen::RowMajor>>(h.to_sparse());
  HermitianOperator op;
  op.dim = static_cast<Index>(h.dim);
  op.norm_bound = h.norm_bound();
  op.apply = [matrix](const Eigen::Ref<const MatrixXcd>& x, Eigen::Ref<MatrixXcd> y) { y.noalias() = *matrix * x; };
  return op;
}

HermitianOperator as_operator(const MatrixXcd& h) {
  auto matrix = std::make_shared<MatrixXcd>(h);
  HermitianOperator op;
  op.dim = h.rows();
  op.apply = [matrix](const Eigen::Ref<const MatrixXcd>& x, Eigen::Ref<MatrixXcd> y) { y.noalias() = *matrix * x; };
  return op;
}

EigenSystem eig_dense(const MatrixXcd& h, const DenseOptions& options) {
  if (h.rows() != h.cols()) throw ValidationError("eig_dense: matrix must be square");
  if (h.rows() > options.max_dim) {
    throw ValidationError("eig_dense: dimension " + std::to_string(h.rows()) + " exceeds the dense cap " +
                          std::to_string(options.max_dim) + "; use eig_lowest");
  }
  EigenSystem out;
  if (h.rows() == 0) return out;
  if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.real());
    if (solver.info() != Eigen::Success) throw ConvergenceError("eig_dense: real solver failed", 0.0);
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) throw ConvergenceError("eig_dense: complex solver failed", 0.0);
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
  }
  return out;
}

Eigen::VectorXd eigenvalues_dense(const MatrixXcd& h, const DenseOptions& options) {
  if (h.rows() != h.cols()) throw ValidationError("eigenvalues_dense: matrix must be square");
  if (h.rows() > options.max_dim) {
    throw ValidationError("eigenvalues_dense: dimension " + std::to_string(h.rows()) + " exceeds the dense cap " +
                          std::to_string(options.max_dim));
  }
  if (h.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceError("eigenvalues_dense: solver failed", 0.0);
  return solver.eigenvalues();
}

EigenSystem eig_dense(const SparseHermitian& h, const DenseOptions& options) {
  if (static_cast<Index>(h.dim) > options.max_dim) {
    throw ValidationError("eig_dense: dimension " + std::to_string(h.dim) + " exceeds the dense cap " +
                          std::to_string(options.max_dim) + "; use eig_lowest");
  }
  return eig_dense(h.to_dense(), options);
}

EigenSystem eig_lowest(const HermitianOperator& op, Index m, const LanczosOptions& options) {
  const Index n = op.dim;
  if (m < 1 || m > n) {
    throw ValidationError("eig_lowest: need 1 <= m <= dim, got m=" + std::to_string(m) + ", dim=" + std::to_string(n));
  }
  const Index block = std::clamp<Index>(options.block_size, 1, m);
  const Index keep_target = m + std::max(options.extra_vectors, 1);
  Index max_basis = options.max_basis > 0 ? options.max_basis : 2 * keep_target + 2 * block;
  max_basis = std::max(max_basis, keep_target + block);

  if (n <= 2 * max_basis || n <= 128) {
    MatrixXcd dense(n, n);
    op.apply(MatrixXcd::Identity(n, n), dense);
    EigenSystem full = eig_dense(MatrixXcd((dense + dense.adjoint()) / 2.0), DenseOptions{n});
    full.values.conservativeResize(m);
    full.vectors.conservativeResize(Eigen::NoChange, m);
    return full;
  }

  std::mt19937_64 rng(options.seed);
  MatrixXcd V(n, max_basis + block);
  MatrixXcd AV(n, max_basis + block);
  MatrixXcd P = random_block(n, block, rng);
  orthonormalize_against(V, 0, P, rng);
  Index count = 0;
  double last_residual = 0.0;

  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    while (count + block <= max_basis) {
      V.middleCols(count, block) = P;
      op.apply(P, AV.middleCols(count, block));
      count += block;
      P = AV.middleCols(count - block, block);
      orthonormalize_against(V, count, P, rng);
    }

    MatrixXcd G = V.leftCols(count).adjoint() * AV.leftCols(count);
    G = (G + G.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> rr(G);
    const Eigen::VectorXd& theta = rr.eigenvalues();
    const MatrixXcd& S = rr.eigenvectors();

    const MatrixXcd ritz = V.leftCols(count) * S.leftCols(m);
    const MatrixXcd images = AV.leftCols(count) * S.leftCols(m);
    double scale = op.norm_bound;
    scale = std::max({scale, std::abs(theta(0)), std::abs(theta(count - 1)), 1e-300});
    last_residual = 0.0;
    for (Index i = 0; i < m; ++i) {
      last_residual = std::max(last_residual, (images.col(i) - theta(i) * ritz.col(i)).norm());
    }
    if (last_residual <= options.tol * scale) {
      EigenSystem out;
      out.values = theta.head(m);
      out.vectors = ritz;
      return out;
    }

    // Thick restart: residuals of the kept Ritz vectors lie in span(P), so the
    // Krylov continuation is simply P.
    const Index keep = std::min(count, keep_target);
    const MatrixXcd s_keep = S.leftCols(keep);
    V.leftCols(keep) = (V.leftCols(count) * s_keep).eval();
    AV.leftCols(keep) = (AV.leftCols(count) * s_keep).eval();
    count = keep;
  }
  throw ConvergenceError("eig_lowest: no convergence after " + std::to_string(options.max_restarts) + " restarts",
                         last_residual);
}

EigenSystem eig_lowest(const SparseHermitian& h, Index m, const LanczosOptions& options) {
  return eig_lowest(as_operator(h), m, options);
}

EigenSystem eig_lowest(const MatrixXcd& h, Index m, const LanczosOptions& options) {
  return eig_lowest(as_operator(h), m, options);
}

double spectral_upper_bound(const HermitianOperator& op, int steps) {
  const Index n = op.dim;
  std::mt19937_64 rng(7);
  MatrixXcd v = random_block(n, 1, rng);
  v /= v.norm();
  MatrixXcd previous = MatrixXcd::Zero(n, 1);
  MatrixXcd w(n, 1);
  std::vector<double> alpha;
  std::vector<double> beta;
  for (int j = 0; j < std::min<Index>(steps, n); ++j) {
    op.apply(v, w);
    alpha.push_back(v.col(0).dot(w.col(0)).real());
    w -= alpha.back() * v + (beta.empty() ? 0.0 : beta.back()) * previous;
    const double b = w.norm();
    beta.push_back(b);
    if (b < 1e-12) break;
    previous = v;
    v = w / b;
  }
  const auto k = static_cast<Index>(alpha.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
  for (Index i = 0; i < k; ++i) {
    t(i, i) = alpha[static_cast<std::size_t>(i)];
    if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t);
  // largest Ritz value plus the residual norm of its Ritz vector
  const double tail = std::abs(solver.eigenvectors()(k - 1, k - 1)) * beta.back();
  return solver.eigenvalues()(k - 1) + tail + 1e-12 * std::abs(solver.eigenvalues()(k - 1));
}

EigenSystem eig_lowest_filtered(const HermitianOperator& op, Index m, const FilterOptions& options,
                                double* next_estimate) {
  const Index n = op.dim;
  if (m < 1 || m > n) {
    throw ValidationError("eig_lowest_filtered: need 1 <= m <= dim, got m=" + std::to_string(m) + ", dim=" +
                          std::to_string(n));
  }
  const Index width = std::min<Index>(n, m + (options.extra_vectors > 0 ? options.extra_vectors : std::max<Index>(8, m / 5)));
  if (n <= 3 * width || n <= 128) {
    MatrixXcd dense(n, n);
    op.apply(MatrixXcd::Identity(n, n), dense);
    EigenSystem full = eig_dense(MatrixXcd((dense + dense.adjoint()) / 2.0), DenseOptions{n});
    if (next_estimate) *next_estimate = m < n ? full.values(m) : INFINITY;
    full.values.conservativeResize(m);
    full.vectors.conservativeResize(Eigen::NoChange, m);
    return full;
  }

  const double upper = spectral_upper_bound(op);
  std::mt19937_64 rng(options.seed);
  MatrixXcd x = random_block(n, width, rng);
  MatrixXcd ax(n, width);
  MatrixXcd y(n, width);
  MatrixXcd y_prev(n, width);
  double last_residual = 0.0;

  for (int sweep = 0; sweep <= options.max_sweeps; ++sweep) {
    x = Eigen::HouseholderQR<MatrixXcd>(x).householderQ() * MatrixXcd::Identity(n, width);
    op.apply(x, ax);
    MatrixXcd g = x.adjoint() * ax;
    g = (g + g.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> rr(g);
    const Eigen::VectorXd& theta = rr.eigenvalues();
    x = (x * rr.eigenvectors()).eval();
    ax = (ax * rr.eigenvectors()).eval();

    const double scale = std::max({std::abs(upper), std::abs(theta(0)), op.norm_bound, 1e-300});
    last_residual = 0.0;
    for (Index i = 0; i < m; ++i) last_residual = std::max(last_residual, (ax.col(i) - theta(i) * x.col(i)).norm());
    if (last_residual <= options.tol * scale) {
      EigenSystem out;
      out.values = theta.head(m);
      out.vectors = x.leftCols(m);
      if (next_estimate) {
        *next_estimate = m < width ? theta(m) - (ax.col(m) - theta(m) * x.col(m)).norm() : INFINITY;
      }
      return out;
    }
    if (sweep == options.max_sweeps) break;

    // Damp [cut, upper] with a scaled Chebyshev recurrence (the scaling keeps
    // the wanted end of the spectrum at O(1)).
    const double cut = theta(width - 1);
    const double e = (upper - cut) / 2.0;
    const double c = (upper + cut) / 2.0;
    if (e <= 0.0) break;
    const double a0 = theta(0);
    double sigma = e / (a0 - c);
    const double tau = 2.0 / sigma;
    y = (ax - c * x) * (sigma / e);
    y_prev = x;
    for (int d = 2; d <= options.degree; ++d) {
      const double sigma_next = 1.0 / (tau - sigma);
      op.apply(y, ax);
      MatrixXcd next = (ax - c * y) * (2.0 * sigma_next / e) - (sigma * sigma_next) * y_prev;
      y_prev = std::move(y);
      y = std::move(next);
      sigma = sigma_next;
    }
    x = y;
  }
  throw ConvergenceError("eig_lowest_filtered: no convergence after " + std::to_string(options.max_sweeps) + " sweeps",
                         last_residual);
}

double max_residual(const HermitianOperator& op, const EigenSystem& system) {
  MatrixXcd image(op.dim, system.vectors.cols());
  op.apply(system.vectors, image);
  double worst = 0.0;
  for (Index i = 0; i < system.values.size(); ++i) {
    worst = std::max(worst, (image.col(i) - system.values(i) * system.vectors.col(i)).norm());
  }
  return worst;
}

}  // namespace magnon
