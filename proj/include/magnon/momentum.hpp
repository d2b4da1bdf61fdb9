#pragma once

// Two-magnon cotranslation orbits and the Bloch blocks H(k, delta).
//
// A Bloch eigenstate obeys psi(T_q(tau) s) = exp(i k tau q) psi(s). Writing
// psi(s) = exp(i k X(s)) phi(s) with X the centre of mass, phi is constant on
// each orbit and the eigenproblem reduces to one q(L-1)/2 dimensional block
// per quantized k = 2 pi alpha / L.

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "magnon/model.hpp"
#include "magnon/solvers.hpp"

namespace magnon {

/// Position of a basis state within the orbit decomposition:
/// state = cotranslate(reps[orbit], shift, q, L).
struct OrbitLocation {
  std::size_t orbit;
  int shift;
};

class OrbitBasis {
 public:
  OrbitBasis(int L, int q);

  int sites() const { return L_; }
  int period() const { return q_; }
  int periods() const { return L_ / q_; }
  std::size_t size() const { return reps_.size(); }

  const std::vector<BasisState>& reps() const { return reps_; }
  const MagnonBasis& pair_basis() const { return pairs_; }
  OrbitLocation orbit_of(const BasisState& state) const;
  OrbitLocation orbit_of_index(std::size_t pair_index) const { return location_[pair_index]; }
  /// Centre of mass of rep a in its compact representation (see pair_center).
  double center(std::size_t orbit) const { return centers_[orbit]; }

  /// Displacement X(rep_b) + shift*q - X(rep_a), folded into (-L/2, L/2].
  double displacement(std::size_t from_orbit, OrbitLocation to) const;

 private:
  int L_;
  int q_;
  MagnonBasis pairs_;
  std::vector<BasisState> reps_;
  std::vector<double> centers_;
  std::vector<OrbitLocation> location_;
};

/// Centre of mass of a pair taken the short way around the ring: (l1+l2)/2
/// when l2 - l1 <= L/2, otherwise (l1+l2+L)/2.
double pair_center(const BasisState& pair, int L);

OrbitBasis build_orbit_basis(int L, int q);

struct BlochBlock {
  double k = 0.0;
  double delta = 0.0;
  Eigen::MatrixXcd matrix;
  std::shared_ptr<const OrbitBasis> basis;
};

/// Precomputed hop structure of the two-magnon block; assembling H(k, delta)
/// afterwards costs O(dim). Immutable and shareable across grid points.
class BlochModel {
 public:
  explicit BlochModel(const ModelParams& params);

  const ModelParams& params() const { return params_; }
  const std::shared_ptr<const OrbitBasis>& basis() const { return basis_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(basis_->size()); }

  /// Diagonal potential of each orbit representative at modulation phase delta.
  Eigen::VectorXd potentials(double delta) const;
  BlochBlock block(double k, double delta) const;
  /// Matrix-free application of H(k, delta).
  HermitianOperator op(double k, double delta) const;

 private:
  struct Hop {
    Eigen::Index from;
    Eigen::Index to;
    double displacement;
  };

  ModelParams params_;
  std::shared_ptr<const OrbitBasis> basis_;
  std::vector<Hop> hops_;
};

/// The m lowest eigenpairs of H(k, delta): dense up to dimension 128, otherwise
/// Chebyshev-filtered subspace iteration on the matrix-free operator. If next
/// is given it receives E_{m+1} (dense) or its Ritz estimate.
EigenSystem lowest_block_states(const BlochModel& model, double k, double delta, Eigen::Index m,
                                double* next = nullptr);

BlochBlock build_bloch_block(const ModelParams& params, double k, std::optional<double> delta_override = {});

/// Bloch block of an arbitrary cotranslation-invariant two-magnon operator.
Eigen::MatrixXcd project_to_block(const SparseHermitian& h, const OrbitBasis& basis, double k);

/// D_a = exp(-i (2 pi / q) X_a); D H(k) D^dagger = H(k + 2 pi / q).
Eigen::VectorXcd covariance_unitary(const OrbitBasis& basis);

/// Quantized momenta 2 pi alpha / L, alpha = 1..L/q.
std::vector<double> momentum_grid(int L, int q);

/// Largest gap between the sorted union of all block spectra and the dense
/// full-space spectrum.
double verify_block_decomposition(const ModelParams& params);

}  // namespace magnon
