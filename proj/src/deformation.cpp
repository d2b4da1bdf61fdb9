#include "magnon/deformation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "magnon/errors.hpp"
#include "magnon/harper.hpp"
#include "magnon/momentum.hpp"
#include "magnon/spectra.hpp"

namespace magnon {

namespace {

SparseHermitian combine(const SparseHermitian& a, double wa, const SparseHermitian& b, double wb) {
  std::map<std::pair<std::size_t, std::size_t>, Complex> sum;
  for (const auto& e : a.entries) sum[{e.row, e.col}] += wa * e.value;
  for (const auto& e : b.entries) sum[{e.row, e.col}] += wb * e.value;
  SparseHermitian out;
  out.dim = a.dim;
  out.entries.reserve(sum.size());
  for (const auto& [key, value] : sum) out.entries.push_back({key.first, key.second, value});
  return out;
}

}  // namespace

SparseHermitian embed_effective(const ModelParams& params) {
  params.validate();
  if (params.bc != Boundary::Periodic) throw ValidationError("bc: the embedded effective model is defined on rings");
  if (params.N != 2) throw ValidationError("N: the embedded effective model lives in the two-magnon space");
  const HarperParams hp = harper_params(params);
  const double offset = bound_band_offset(params);
  const int L = params.L;
  const MagnonBasis basis(L, 2);
  auto pair_index = [&](int m) {
    const int a = (m - 1) % L + 1;
    const int b = m % L + 1;
    return basis.index_of(a < b ? BasisState{a, b} : BasisState{b, a});
  };

  std::map<std::pair<std::size_t, std::size_t>, Complex> entries;
  for (int m = 1; m <= L; ++m) {
    const std::size_t i = pair_index(m);
    entries[{i, i}] += hp.mu[static_cast<std::size_t>(m - 1)] + offset;
    if (L > 2) {
      const std::size_t j = pair_index(m + 1);
      entries[{std::min(i, j), std::max(i, j)}] += -hp.J_eff;
    }
  }
  SparseHermitian out;
  out.dim = basis.size();
  for (const auto& [key, value] : entries) out.entries.push_back({key.first, key.second, value});
  return out;
}

SparseHermitian auxiliary_hamiltonian(const ModelParams& params, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw ValidationError("eta must lie in [0, 1], got " + std::to_string(eta));
  }
  if (eta == 0.0) return build_hamiltonian(params);
  if (eta == 1.0) return embed_effective(params);
  return combine(build_hamiltonian(params), 1.0 - eta, embed_effective(params), eta);
}

GapTrace gap_trace(const ModelParams& params, int n_eta, int n_delta) {
  params.validate_momentum_blocks();
  if (n_eta < 2) throw ValidationError("n_eta must be at least 2");
  if (n_delta < 1) throw ValidationError("n_delta must be at least 1");
  const int q = params.beta.q;
  const BlochModel model(params);
  const std::vector<double> ks = momentum_grid(params.L, q);

  GapTrace trace;
  for (int i = 0; i < n_eta; ++i) trace.eta_grid.push_back(static_cast<double>(i) / (n_eta - 1));
  trace.gaps.assign(static_cast<std::size_t>(n_eta), std::vector<double>(static_cast<std::size_t>(q - 1), INFINITY));

  const MagnonBasis basis(params.L, 2);
  for (double eta : trace.eta_grid) {
    const double defect = cotranslation_defect(auxiliary_hamiltonian(params, eta), basis, q);
    trace.max_symmetry_defect = std::max(trace.max_symmetry_defect, defect);
  }
  const double scale = build_hamiltonian(params).max_abs();
  if (trace.max_symmetry_defect > 1e-12 * scale) {
    throw Error("auxiliary Hamiltonian breaks cotranslation symmetry (defect " +
                std::to_string(trace.max_symmetry_defect) + "): construction bug");
  }

  // Both blocks are linear in eta, so each (k, delta) pair is assembled once.
  for (int j = 1; j <= n_delta; ++j) {
    ModelParams at = params;
    at.delta = 2.0 * std::numbers::pi * j / n_delta;
    const SparseHermitian h = build_hamiltonian(at);
    const SparseHermitian heff = embed_effective(at);
    trace.difference_norm = std::max(trace.difference_norm, combine(heff, 1.0, h, -1.0).norm_bound());
    for (double k : ks) {
      const Eigen::MatrixXcd a = model.block(k, at.delta).matrix;
      const Eigen::MatrixXcd b = project_to_block(heff, *model.basis(), k);
      for (std::size_t i = 0; i < trace.eta_grid.size(); ++i) {
        const double eta = trace.eta_grid[i];
        Eigen::MatrixXcd mix;
        if (eta == 0.0) {
          mix = a;
        } else if (eta == 1.0) {
          mix = b;
        } else {
          mix = (1.0 - eta) * a + eta * b;
        }
        const Eigen::VectorXd e = eigenvalues_dense(mix);
        for (int n = 0; n + 1 < q; ++n) {
          trace.gaps[i][static_cast<std::size_t>(n)] = std::min(trace.gaps[i][static_cast<std::size_t>(n)], e(n + 1) - e(n));
        }
      }
    }
  }

  trace.min_gap = INFINITY;
  for (const auto& row : trace.gaps) {
    for (double g : row) trace.min_gap = std::min(trace.min_gap, g);
  }
  const double d_eta = 1.0 / (n_eta - 1);
  trace.step_bound = 2.0 * trace.difference_norm * d_eta;
  for (std::size_t i = 0; i + 1 < trace.gaps.size(); ++i) {
    for (std::size_t n = 0; n < trace.gaps[i].size(); ++n) {
      trace.max_gap_step = std::max(trace.max_gap_step, std::abs(trace.gaps[i + 1][n] - trace.gaps[i][n]));
    }
  }
  return trace;
}

}  // namespace magnon
