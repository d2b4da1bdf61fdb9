#pragma once

// Bound-band extraction, observables, delta sweeps, the butterfly and the
// open-chain edge-state scan.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "magnon/model.hpp"
#include "magnon/solvers.hpp"

namespace magnon {

/// The q bound subbands of a periodic two-magnon ring at one delta.
struct BandSet {
  std::vector<double> k_grid;
  std::vector<Eigen::VectorXd> energies;   // per k: q ascending values
  std::vector<Eigen::MatrixXcd> vectors;   // per k: orbit-basis eigenvectors, one column per band
  double continuum_gap = 0.0;              // min over k of E_{q+1} - E_q
};

struct BandOptions {
  double gap_floor = 1.0;   // in units of J
};

BandSet bound_band(const ModelParams& params, double delta, const BandOptions& options = {});

/// Analytic energy of the bound-pair band centre, -Delta - 2 J^2 / Delta.
double bound_band_offset(const ModelParams& params);

/// Number of bound pair states: L on a ring, L - 1 on an open chain.
int bound_state_count(const ModelParams& params);

/// The bound_state_count lowest eigenpairs of the full two-magnon space.
/// Uses the Krylov solver and checks that the next state lies more than
/// gap_floor higher; a negative gap_floor disables the check.
EigenSystem bound_states(const ModelParams& params, double gap_floor = 1.0);

std::vector<double> density_profile(const Eigen::VectorXcd& state, const MagnonBasis& basis);

/// Gamma_{qr} = <S+_q S+_r S-_r S-_q>; 1-based sites map to row/col q-1, r-1.
Eigen::MatrixXd correlation_matrix(const Eigen::VectorXcd& state, const MagnonBasis& basis);

struct DeltaSweep {
  std::vector<double> deltas;
  std::vector<std::vector<double>> energies;   // per delta, ascending
};

struct SweepOptions {
  /// Keep only the bound band (q lowest per block, or the L / L-1 lowest
  /// states of an open chain) instead of the whole two-magnon spectrum.
  bool bound_only = false;
};

/// Spectra on delta_j = 2 pi j / n_delta, j = 0..n_delta-1.
DeltaSweep delta_sweep(const ModelParams& params, int n_delta, const SweepOptions& options = {});

struct ButterflyPoint {
  int p = 0;
  int q = 1;
  double lambda = 0.0;
  double energy = 0.0;   // shifted by Delta + 2 J^2 / Delta
};

/// lambda = J^2 / (Delta cos(pi beta)), or 0 at beta = 1/2.
double butterfly_lambda(const ModelParams& params, int p, int q);

/// Every p/q in [0, 1] with q <= max_q (0/1 and 1/1 included, the latter kept
/// as a separate column because lambda differs). Sites, J, Delta, delta and
/// bc come from the template.
std::vector<ButterflyPoint> butterfly(const ModelParams& tmpl, int max_q);

enum class EdgeSide { Left, Right, Bulk };
std::string to_string(EdgeSide side);

struct BoundStateInfo {
  double energy = 0.0;
  double left_weight = 0.0;    // sum_{l <= w} n_l / N
  double right_weight = 0.0;   // sum_{l > L - w} n_l / N
  bool in_gap = false;
  EdgeSide side = EdgeSide::Bulk;
  double localization() const { return std::max(left_weight, right_weight); }
};

struct EdgeScan {
  std::vector<BoundStateInfo> states;                  // every open-chain bound state, ascending
  std::vector<std::pair<double, double>> bulk_gaps;    // open intervals between reference subbands
  int reference_length = 0;
};

struct EdgeOptions {
  int edge_window = 5;
  double threshold = 0.9;
  int k_refinement = 4;   // reference k points per quantized momentum
};

EdgeScan scan_bound_states(const ModelParams& params, double delta, const EdgeOptions& options = {});

struct EdgeState {
  double energy = 0.0;
  EdgeSide side = EdgeSide::Bulk;
  double localization = 0.0;
};

/// In-gap bound states whose density sits in one edge window.
std::vector<EdgeState> find_edge_states(const ModelParams& params, double delta, const EdgeOptions& options = {});

}  // namespace magnon
