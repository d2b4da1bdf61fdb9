#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "magnon/model.hpp"

namespace magnon {

/// Ascending eigenvalues with orthonormal eigenvectors in matching columns.
struct EigenSystem {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;

  Eigen::Index size() const { return values.size(); }
};

/// Hermitian operator known only through its action on blocks of vectors.
struct HermitianOperator {
  Eigen::Index dim = 0;
  std::function<void(const Eigen::Ref<const Eigen::MatrixXcd>&, Eigen::Ref<Eigen::MatrixXcd>)> apply;
  /// Optional upper bound on the spectral norm; 0 means "estimate".
  double norm_bound = 0.0;
};

HermitianOperator as_operator(const SparseHermitian& h);
HermitianOperator as_operator(const Eigen::MatrixXcd& h);

struct DenseOptions {
  Eigen::Index max_dim = 6000;
};

struct LanczosOptions {
  double tol = 1e-10;          // residual <= tol * ||H|| for every returned pair
  int block_size = 2;          // > 1 resolves exact degeneracies
  int extra_vectors = 16;      // Ritz vectors kept beyond m on restart
  int max_basis = 0;           // 0: choose from m and block_size
  int max_restarts = 500;
  std::uint64_t seed = 20170523;
};

EigenSystem eig_dense(const Eigen::MatrixXcd& h, const DenseOptions& options = {});
EigenSystem eig_dense(const SparseHermitian& h, const DenseOptions& options = {});
/// Ascending eigenvalues only; skips the eigenvector back-transformation.
Eigen::VectorXd eigenvalues_dense(const Eigen::MatrixXcd& h, const DenseOptions& options = {});

/// The m lowest eigenpairs. Falls back to dense diagonalization when the
/// Krylov space would span most of the operator anyway.
EigenSystem eig_lowest(const HermitianOperator& op, Eigen::Index m, const LanczosOptions& options = {});
EigenSystem eig_lowest(const SparseHermitian& h, Eigen::Index m, const LanczosOptions& options = {});
EigenSystem eig_lowest(const Eigen::MatrixXcd& h, Eigen::Index m, const LanczosOptions& options = {});

struct FilterOptions {
  double tol = 1e-10;     // residual <= tol * ||H|| for every returned pair
  int degree = 12;        // Chebyshev filter degree per sweep
  int extra_vectors = 0;  // 0: max(8, m / 5)
  int max_sweeps = 200;
  std::uint64_t seed = 20170523;
};

/// The m lowest eigenpairs by Chebyshev-filtered subspace iteration. Much
/// faster than the Krylov path when the wanted states form a wide cluster
/// split off from the rest of the spectrum (bound pair bands).
/// If next_estimate is given it receives theta_m - ||r_m||, the Ritz estimate
/// of eigenvalue m+1 lowered by its residual (used for gap checks without
/// converging a continuum state).
EigenSystem eig_lowest_filtered(const HermitianOperator& op, Eigen::Index m, const FilterOptions& options = {},
                                double* next_estimate = nullptr);

/// Upper bound on the largest eigenvalue from a short Lanczos run.
double spectral_upper_bound(const HermitianOperator& op, int steps = 30);

/// max_i ||H v_i - E_i v_i||.
double max_residual(const HermitianOperator& op, const EigenSystem& system);

}  // namespace magnon
