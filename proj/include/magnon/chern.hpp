#pragma once

// Subband Chern numbers on the (k, delta) torus from normalized overlap link
// variables (Fukui-Hatsugai-Suzuki). The k direction spans one reciprocal
// period 2 pi / q; its seam column is the first column rotated by the
// covariance unitary D, so the plaquette sum is an integer on any grid.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "magnon/model.hpp"
#include "magnon/solvers.hpp"

namespace magnon {

struct BZGrid {
  std::vector<double> k_points;       // k_alpha, alpha = 1..M
  std::vector<double> delta_points;   // delta_j = 2 pi j / n_delta, j = 1..n_delta
  int n_delta = 0;
};

struct ChernResult {
  std::vector<int> cherns;              // per subband, lowest first
  std::vector<Eigen::MatrixXd> field;   // per subband: M x n_delta plaquette phases
  std::vector<double> residuals;        // |sum F / 2 pi - chern|
  BZGrid grid;
  double min_subband_gap = 0.0;
  double min_continuum_gap = 0.0;
};

struct ChernOptions {
  int n_delta = 30;
  double overlap_floor = 1e-8;
  double residual_tol = 1e-6;
  /// Smallest admissible E_{n+1} - E_n inside the band set, relative to the
  /// block norm; anything below counts as a touching.
  double gap_tol = 1e-9;
  /// Required separation between the top subband and the next state, in J.
  /// Negative disables the check.
  double continuum_floor = 0.0;
  /// Multiply every eigenvector by an independent random phase (gauge test).
  std::optional<std::uint64_t> gauge_seed;
};

/// Normalized overlap <a|b> / |<a|b>|.
Complex berry_link(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, double overlap_floor = 1e-8);

/// -Im ln(U12 U23 U34 U41) on the principal branch (-pi, pi].
double plaquette_field(const Eigen::VectorXcd& v1, const Eigen::VectorXcd& v2, const Eigen::VectorXcd& v3,
                       const Eigen::VectorXcd& v4, double overlap_floor = 1e-8);

/// Eigenpairs at one grid point: at least `bands` lowest pairs, plus an
/// estimate of the next eigenvalue (INFINITY if there is none).
struct GridSolution {
  EigenSystem system;
  double next = INFINITY;
};

/// A Bloch family H(k, delta) on one reciprocal period.
struct BlochFamily {
  int bands = 0;
  std::vector<double> k_points;
  Eigen::VectorXcd seam;   // D with D H(k) D^dagger = H(k + period)
  double scale = 1.0;      // energy scale for relative gap checks
  std::function<GridSolution(double k, double delta)> solve;
};

ChernResult chern_from_family(const BlochFamily& family, const ChernOptions& options = {});

ChernResult chern_numbers(const ModelParams& params, const ChernOptions& options = {});

struct ChernColumn {
  Rational beta;
  int L1 = 0;
  int L2 = 0;
  std::vector<int> cherns;          // at L1
  std::vector<int> cherns_check;    // at L2
  bool converged = false;           // identical at both sizes
  double max_residual = 0.0;
  std::string error;                // non-empty if the column failed
};

/// Every p/q with 0 < p/q < 1/2, gcd(p, q) = 1, for each odd q in q_list.
/// Lattice sizes are L1 = s1 q and L2 = s2 q (odd s1 < s2).
std::vector<ChernColumn> chern_table(const std::vector<int>& q_list, const ModelParams& tmpl,
                                     const ChernOptions& options = {}, int s1 = 21, int s2 = 23);

}  // namespace magnon
