#include "magnon/chern.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "magnon/errors.hpp"
#include "magnon/momentum.hpp"

namespace magnon {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string point_name(double k, double delta) {
  std::ostringstream os;
  os.precision(6);
  os << "(k=" << k << ", delta=" << delta << ")";
  return os.str();
}

}  // namespace

Complex berry_link(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, double overlap_floor) {
  const Complex overlap = a.dot(b);
  const double modulus = std::abs(overlap);
  if (!(modulus > overlap_floor)) {
    throw DegenerateLinkError("link overlap " + std::to_string(modulus) + " below floor " +
                              std::to_string(overlap_floor));
  }
  return overlap / modulus;
}

double plaquette_field(const Eigen::VectorXcd& v1, const Eigen::VectorXcd& v2, const Eigen::VectorXcd& v3,
                       const Eigen::VectorXcd& v4, double overlap_floor) {
  const Complex loop = berry_link(v1, v2, overlap_floor) * berry_link(v2, v3, overlap_floor) *
                       berry_link(v3, v4, overlap_floor) * berry_link(v4, v1, overlap_floor);
  // std::arg is in [-pi, pi]; move -pi onto the principal branch end +pi.
  double phase = std::arg(loop);
  if (phase == -std::numbers::pi) phase = std::numbers::pi;
  return -phase;
}

ChernResult chern_from_family(const BlochFamily& family, const ChernOptions& options) {
  const int M = static_cast<int>(family.k_points.size());
  const int nd = options.n_delta;
  if (M < 3) throw ValidationError("Chern grid needs at least 3 k points, got " + std::to_string(M));
  if (nd < 3) throw ValidationError("n_delta must be at least 3, got " + std::to_string(nd));
  if (family.bands < 1) throw ValidationError("Chern family needs at least one band");

  ChernResult result;
  result.grid.k_points = family.k_points;
  result.grid.n_delta = nd;
  for (int j = 1; j <= nd; ++j) result.grid.delta_points.push_back(kTwoPi * j / nd);
  result.min_subband_gap = INFINITY;
  result.min_continuum_gap = INFINITY;

  std::mt19937_64 rng(options.gauge_seed.value_or(0));
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);

  // states[a * nd + j]: band eigenvectors at (k_a, delta_j)
  std::vector<Eigen::MatrixXcd> states(static_cast<std::size_t>(M) * nd);
  for (int a = 0; a < M; ++a) {
    for (int j = 0; j < nd; ++j) {
      const double k = family.k_points[static_cast<std::size_t>(a)];
      const double delta = result.grid.delta_points[static_cast<std::size_t>(j)];
      GridSolution sol = family.solve(k, delta);
      const Eigen::VectorXd& e = sol.system.values;
      for (int n = 0; n + 1 < family.bands; ++n) {
        const double gap = e(n + 1) - e(n);
        result.min_subband_gap = std::min(result.min_subband_gap, gap);
        if (gap <= options.gap_tol * family.scale) {
          throw TopologicalObstructionError("subbands " + std::to_string(n + 1) + " and " + std::to_string(n + 2) +
                                            " touch at " + point_name(k, delta) + " (gap " + std::to_string(gap) + ")");
        }
      }
      const double continuum = sol.next - e(family.bands - 1);
      result.min_continuum_gap = std::min(result.min_continuum_gap, continuum);
      if (options.continuum_floor >= 0.0 &&
          continuum <= std::max(options.continuum_floor, options.gap_tol * family.scale)) {
        throw BandOverlapError("top subband meets the continuum at " + point_name(k, delta) + " (gap " +
                               std::to_string(continuum) + ")");
      }
      Eigen::MatrixXcd v = sol.system.vectors.leftCols(family.bands);
      if (options.gauge_seed) {
        for (int n = 0; n < family.bands; ++n) v.col(n) *= std::polar(1.0, angle(rng));
      }
      states[static_cast<std::size_t>(a) * nd + j] = std::move(v);
    }
  }

  auto state = [&](int a, int j, int n) -> Eigen::VectorXcd {
    j %= nd;
    if (a == M) return family.seam.cwiseProduct(states[static_cast<std::size_t>(j)].col(n));
    return states[static_cast<std::size_t>(a) * nd + j].col(n);
  };

  for (int n = 0; n < family.bands; ++n) {
    Eigen::MatrixXd field(M, nd);
    double total = 0.0;
    for (int a = 0; a < M; ++a) {
      for (int j = 0; j < nd; ++j) {
        try {
          field(a, j) = plaquette_field(state(a, j, n), state(a + 1, j, n), state(a + 1, j + 1, n), state(a, j + 1, n),
                                        options.overlap_floor);
        } catch (const DegenerateLinkError& e) {
          throw DegenerateLinkError("band " + std::to_string(n + 1) + ", plaquette at " +
                                    point_name(family.k_points[static_cast<std::size_t>(a)],
                                               result.grid.delta_points[static_cast<std::size_t>(j)]) +
                                    ": " + e.what());
        }
        total += field(a, j);
      }
    }
    const double c = total / kTwoPi;
    const double rounded = std::round(c);
    const double residual = std::abs(c - rounded);
    if (residual >= options.residual_tol) {
      throw ResolutionError("band " + std::to_string(n + 1) + ": plaquette sum / 2pi = " + std::to_string(c) +
                            " is not an integer; increase n_delta or L");
    }
    result.cherns.push_back(static_cast<int>(rounded));
    result.residuals.push_back(residual);
    result.field.push_back(std::move(field));
  }
  return result;
}

ChernResult chern_numbers(const ModelParams& params, const ChernOptions& options) {
  params.validate_momentum_blocks();
  auto model = std::make_shared<const BlochModel>(params);
  const int q = params.beta.q;

  BlochFamily family;
  family.bands = q;
  family.k_points = momentum_grid(params.L, q);
  family.seam = covariance_unitary(*model->basis());
  family.scale = std::abs(params.Delta) + 2.0 * std::abs(params.lambda) + 4.0 * std::abs(params.J);
  family.solve = [model, q](double k, double delta) {
    GridSolution sol;
    sol.system = lowest_block_states(*model, k, delta, q, &sol.next);
    return sol;
  };
  return chern_from_family(family, options);
}

std::vector<ChernColumn> chern_table(const std::vector<int>& q_list, const ModelParams& tmpl,
                                     const ChernOptions& options, int s1, int s2) {
  for (int q : q_list) {
    if (q < 3 || q % 2 == 0) throw ValidationError("chern_table: q must be odd and >= 3, got " + std::to_string(q));
  }
  if (s1 % 2 == 0 || s2 % 2 == 0 || s1 >= s2 || s1 < 3) {
    throw ValidationError("chern_table: lattice multiples must be odd with 3 <= s1 < s2");
  }
  std::vector<ChernColumn> table;
  for (int q : q_list) {
    for (int p = 1; 2 * p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      ChernColumn column;
      column.beta = Rational{p, q};
      column.L1 = s1 * q;
      column.L2 = s2 * q;
      try {
        ModelParams params = tmpl;
        params.beta = column.beta;
        params.N = 2;
        params.bc = Boundary::Periodic;
        params.L = column.L1;
        ChernResult first = chern_numbers(params, options);
        params.L = column.L2;
        ChernResult second = chern_numbers(params, options);
        column.cherns = first.cherns;
        column.cherns_check = second.cherns;
        column.converged = first.cherns == second.cherns;
        for (double r : first.residuals) column.max_residual = std::max(column.max_residual, r);
        for (double r : second.residuals) column.max_residual = std::max(column.max_residual, r);
      } catch (const Error& e) {
        column.error = e.what();
      }
      table.push_back(std::move(column));
    }
  }
  return table;
}

}  // namespace magnon
