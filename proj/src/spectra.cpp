#include "magnon/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>

#include "magnon/errors.hpp"
#include "magnon/momentum.hpp"

namespace magnon {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool blocks_available(const ModelParams& p) {
  if (p.bc != Boundary::Periodic || p.N != 2 || p.L % p.beta.q != 0) return false;
  return (p.L / p.beta.q) % 2 == 1;
}

std::vector<double> sorted(const Eigen::VectorXd& v) {
  std::vector<double> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

BandSet bound_band(const ModelParams& params, double delta, const BandOptions& options) {
  params.validate_momentum_blocks();
  const BlochModel model(params);
  const int q = params.beta.q;
  BandSet out;
  out.continuum_gap = INFINITY;
  for (double k : momentum_grid(params.L, q)) {
    double next = INFINITY;
    const EigenSystem es = lowest_block_states(model, k, delta, q, &next);
    out.k_grid.push_back(k);
    out.energies.push_back(es.values);
    out.vectors.push_back(es.vectors);
    out.continuum_gap = std::min(out.continuum_gap, next - es.values(q - 1));
  }
  if (out.continuum_gap <= options.gap_floor * params.J) {
    throw BandOverlapError("bound band is not separated from the continuum: gap " +
                           std::to_string(out.continuum_gap) + " <= floor " +
                           std::to_string(options.gap_floor * params.J) + " (Delta too small)");
  }
  return out;
}

double bound_band_offset(const ModelParams& params) {
  if (params.Delta == 0.0) throw ValidationError("Delta: the bound band offset needs Delta != 0");
  return -params.Delta - 2.0 * params.J * params.J / params.Delta;
}

int bound_state_count(const ModelParams& params) {
  return params.bc == Boundary::Periodic ? params.L : params.L - 1;
}

EigenSystem bound_states(const ModelParams& params, double gap_floor) {
  params.validate();
  if (params.N != 2) throw ValidationError("N: bound states are defined for two magnons");
  const Eigen::Index m = bound_state_count(params);
  double next = INFINITY;
  EigenSystem es = eig_lowest_filtered(as_operator(build_hamiltonian(params)), m, {}, &next);
  if (gap_floor >= 0.0 && next - es.values(m - 1) <= gap_floor * params.J) {
    throw BandOverlapError("bound band is not separated from the continuum: gap " +
                           std::to_string(next - es.values(m - 1)) + " <= floor " +
                           std::to_string(gap_floor * params.J));
  }
  return es;
}

namespace {

void require_normalized(const Eigen::VectorXcd& state, const MagnonBasis& basis) {
  if (static_cast<std::size_t>(state.size()) != basis.size()) {
    throw ValidationError("state dimension " + std::to_string(state.size()) + " does not match the basis");
  }
  if (std::abs(state.norm() - 1.0) > 1e-8) {
    throw ValidationError("state is not normalized (norm " + std::to_string(state.norm()) + ")");
  }
}

}  // namespace

std::vector<double> density_profile(const Eigen::VectorXcd& state, const MagnonBasis& basis) {
  require_normalized(state, basis);
  std::vector<double> n(static_cast<std::size_t>(basis.sites()), 0.0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double w = std::norm(state(static_cast<Eigen::Index>(i)));
    for (int site : basis[i]) n[static_cast<std::size_t>(site - 1)] += w;
  }
  return n;
}

Eigen::MatrixXd correlation_matrix(const Eigen::VectorXcd& state, const MagnonBasis& basis) {
  if (basis.magnons() != 2) throw ValidationError("correlation_matrix supports two magnons only");
  require_normalized(state, basis);
  const int L = basis.sites();
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(L, L);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double w = std::norm(state(static_cast<Eigen::Index>(i)));
    gamma(basis[i][0] - 1, basis[i][1] - 1) = w;
    gamma(basis[i][1] - 1, basis[i][0] - 1) = w;
  }
  return gamma;
}

DeltaSweep delta_sweep(const ModelParams& params, int n_delta, const SweepOptions& options) {
  params.validate();
  if (n_delta < 1) throw ValidationError("n_delta must be at least 1");
  DeltaSweep out;
  const bool use_blocks = blocks_available(params);
  std::optional<BlochModel> model;
  if (use_blocks) model.emplace(params);
  const int q = params.beta.q;

  for (int j = 0; j < n_delta; ++j) {
    const double delta = kTwoPi * j / n_delta;
    std::vector<double> energies;
    if (use_blocks) {
      for (double k : momentum_grid(params.L, q)) {
        const Eigen::VectorXd v = options.bound_only ? lowest_block_states(*model, k, delta, q).values
                                                     : eigenvalues_dense(model->block(k, delta).matrix);
        energies.insert(energies.end(), v.begin(), v.end());
      }
      std::sort(energies.begin(), energies.end());
    } else {
      ModelParams shifted = params;
      shifted.delta = delta;
      energies = options.bound_only ? sorted(bound_states(shifted, -1.0).values)
                                    : sorted(eig_dense(build_hamiltonian(shifted)).values);
    }
    out.deltas.push_back(delta);
    out.energies.push_back(std::move(energies));
  }
  return out;
}

double butterfly_lambda(const ModelParams& params, int p, int q) {
  if (params.Delta == 0.0) throw ValidationError("Delta: the butterfly lambda rule needs Delta != 0");
  if (2 * p == q) return 0.0;
  return params.J * params.J / (params.Delta * std::cos(std::numbers::pi * p / q));
}

std::vector<ButterflyPoint> butterfly(const ModelParams& tmpl, int max_q) {
  if (max_q < 1) throw ValidationError("max_q must be positive");
  std::vector<ButterflyPoint> out;
  for (int q = 1; q <= max_q; ++q) {
    for (int p = 0; p <= q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      ModelParams params = tmpl;
      params.N = 2;
      params.beta = Rational::reduced(p, q);
      params.lambda = butterfly_lambda(tmpl, p, q);
      const double shift = -bound_band_offset(params);
      const EigenSystem es = bound_states(params);
      for (double e : es.values) out.push_back(ButterflyPoint{p, q, params.lambda, e + shift});
    }
  }
  return out;
}

std::string to_string(EdgeSide side) {
  switch (side) {
    case EdgeSide::Left:
      return "left";
    case EdgeSide::Right:
      return "right";
    case EdgeSide::Bulk:
      break;
  }
  return "bulk";
}

EdgeScan scan_bound_states(const ModelParams& params, double delta, const EdgeOptions& options) {
  params.validate();
  if (params.bc != Boundary::Open) throw ValidationError("bc: edge states need open boundaries");
  if (params.N != 2) throw ValidationError("N: edge scan is defined for two magnons");
  if (options.edge_window < 1 || 2 * options.edge_window > params.L) {
    throw ValidationError("edge_window must lie in [1, L/2]");
  }

  // Bulk reference: a ring with an odd number of periods close to L.
  const int q = params.beta.q;
  int s = std::max(3, static_cast<int>(std::lround(static_cast<double>(params.L) / q)));
  if (s % 2 == 0) ++s;
  ModelParams ring = params;
  ring.bc = Boundary::Periodic;
  ring.L = q * s;
  ring.delta = delta;
  EdgeScan scan;
  scan.reference_length = ring.L;
  try {
    ring.validate_momentum_blocks();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("no periodic reference for the edge scan: ") + e.what());
  }
  const BlochModel model(ring);
  const int samples = std::max(1, options.k_refinement) * s;
  Eigen::VectorXd lowest = Eigen::VectorXd::Constant(q, INFINITY);
  Eigen::VectorXd highest = Eigen::VectorXd::Constant(q, -INFINITY);
  for (int i = 1; i <= samples; ++i) {
    const double k = kTwoPi / q * i / samples;
    const Eigen::VectorXd e = lowest_block_states(model, k, delta, q).values;
    lowest = lowest.cwiseMin(e);
    highest = highest.cwiseMax(e);
  }
  for (int j = 0; j + 1 < q; ++j) {
    if (lowest(j + 1) > highest(j)) scan.bulk_gaps.emplace_back(highest(j), lowest(j + 1));
  }

  ModelParams chain = params;
  chain.delta = delta;
  const MagnonBasis basis(chain.L, 2);
  const EigenSystem es = bound_states(chain);
  const int w = options.edge_window;
  for (Eigen::Index i = 0; i < es.size(); ++i) {
    BoundStateInfo info;
    info.energy = es.values(i);
    const std::vector<double> n = density_profile(es.vectors.col(i).normalized(), basis);
    for (int l = 0; l < w; ++l) {
      info.left_weight += n[static_cast<std::size_t>(l)] / 2.0;
      info.right_weight += n[static_cast<std::size_t>(chain.L - 1 - l)] / 2.0;
    }
    for (const auto& [lo, hi] : scan.bulk_gaps) info.in_gap = info.in_gap || (info.energy > lo && info.energy < hi);
    if (info.localization() >= options.threshold) {
      info.side = info.left_weight >= info.right_weight ? EdgeSide::Left : EdgeSide::Right;
    }
    scan.states.push_back(info);
  }
  return scan;
}

std::vector<EdgeState> find_edge_states(const ModelParams& params, double delta, const EdgeOptions& options) {
  std::vector<EdgeState> out;
  for (const BoundStateInfo& s : scan_bound_states(params, delta, options).states) {
    if (s.in_gap && s.side != EdgeSide::Bulk) out.push_back(EdgeState{s.energy, s.side, s.localization()});
  }
  return out;
}

}  // namespace magnon
