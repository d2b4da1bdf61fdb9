#pragma once

// Interpolation H^A(eta) = H + eta (H_eff - H) between the two-magnon ring
// and its effective model embedded on the bound-pair states |m, m+1>.

#include <vector>

#include "magnon/model.hpp"

namespace magnon {

/// H_eff on the two-magnon space: onsite mu_m - Delta - 2 J^2 / Delta on
/// |m, m+1> (|1, L> for m = L), hopping -J^2 / Delta between neighbouring
/// pair states, zero on every other basis state. Periodic rings only.
SparseHermitian embed_effective(const ModelParams& params);

/// Requires 0 <= eta <= 1; the endpoints return the two matrices unchanged.
SparseHermitian auxiliary_hamiltonian(const ModelParams& params, double eta);

struct GapTrace {
  std::vector<double> eta_grid;
  std::vector<std::vector<double>> gaps;   // per eta: delta E_{j,j+1}, j = 1..q-1
  double min_gap = 0.0;
  double max_symmetry_defect = 0.0;        // max over eta of ||[T_q, H^A]||_max
  double difference_norm = 0.0;            // upper bound on ||H_eff - H||
  /// Largest |gap(eta_{i+1}) - gap(eta_i)| and the Lipschitz bound it must
  /// respect, 2 ||H_eff - H|| d_eta (each eigenvalue moves by at most
  /// ||H_eff - H|| d_eta, a difference of two by twice that).
  double max_gap_step = 0.0;
  double step_bound = 0.0;
};

GapTrace gap_trace(const ModelParams& params, int n_eta, int n_delta);

}  // namespace magnon
