#pragma once

// Second-order effective model of the bound pair band: a single particle on
// the bond lattice m = 1..L (ring) or 1..L-1 (open chain) with
//
//   H_eff = -J_eff sum_m (b+_m b_{m+1} + h.c.) + sum_m mu_m b+_m b_m,
//   J_eff = J^2 / Delta,  mu_m = lambda' cos(2 pi beta m + delta'),
//
// lambda' = 2 lambda cos(pi beta), delta' = delta + pi beta. The open chain
// carries an extra +J_eff on its two end bonds.

#include <vector>

#include <Eigen/Dense>

#include "magnon/chern.hpp"
#include "magnon/model.hpp"
#include "magnon/solvers.hpp"

namespace magnon {

struct HarperParams {
  double J_eff = 0.0;
  double lambda_prime = 0.0;
  double delta_prime = 0.0;
  Rational beta;
  std::vector<double> mu;   // mu[m - 1] for bond m = 1..L

  double onsite(int m) const;   // lambda' cos(2 pi beta m + delta') for any m
};

HarperParams harper_params(const ModelParams& params);

/// L x L (periodic) or (L-1) x (L-1) (open) effective Hamiltonian.
Eigen::MatrixXd build_effective(const ModelParams& params);

struct EffectiveBlock {
  Eigen::MatrixXcd matrix;
  Eigen::VectorXd values;
};

/// q x q Bloch block on bonds m = 1..q with hops -J_eff e^{+ik} from m to m+1.
EffectiveBlock effective_bloch(const HarperParams& hp, double k, int q);

/// Subband Chern numbers of the effective model on the same (k, delta) grid
/// as the two-magnon calculation.
ChernResult effective_chern(const ModelParams& params, const ChernOptions& options = {});

struct BandComparison {
  std::vector<double> exact;       // L (ring) or L-1 (open) lowest two-magnon energies
  std::vector<double> effective;   // effective spectrum shifted by -Delta - 2 J^2 / Delta
  std::vector<double> deviations;  // |exact_i - effective_i| in sorted order
  double max_abs_deviation = 0.0;
};

/// No continuum-gap check is applied: at Delta ~ J the bound band and the
/// continuum overlap and the comparison simply takes the lowest states.
BandComparison compare_bound_band(const ModelParams& params);

}  // namespace magnon
