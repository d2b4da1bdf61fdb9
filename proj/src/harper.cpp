#include "magnon/harper.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "magnon/errors.hpp"
#include "magnon/momentum.hpp"
#include "magnon/spectra.hpp"

namespace magnon {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

double HarperParams::onsite(int m) const {
  return lambda_prime * std::cos(2.0 * kPi * beta.value() * m + delta_prime);
}

HarperParams harper_params(const ModelParams& params) {
  params.validate();
  if (params.Delta == 0.0) throw ValidationError("Delta: the effective model needs Delta != 0");
  HarperParams hp;
  hp.J_eff = params.J * params.J / params.Delta;
  hp.beta = params.beta;
  hp.lambda_prime = 2.0 * params.lambda * std::cos(kPi * params.beta.value());
  hp.delta_prime = params.delta + kPi * params.beta.value();
  for (int m = 1; m <= params.L; ++m) hp.mu.push_back(hp.onsite(m));
  return hp;
}

Eigen::MatrixXd build_effective(const ModelParams& params) {
  const HarperParams hp = harper_params(params);
  const bool ring = params.bc == Boundary::Periodic;
  const int n = ring ? params.L : params.L - 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int m = 0; m < n; ++m) {
    h(m, m) = hp.mu[static_cast<std::size_t>(m)];
    if (m + 1 < n) h(m, m + 1) = h(m + 1, m) = -hp.J_eff;
  }
  if (ring && n > 2) h(0, n - 1) = h(n - 1, 0) = -hp.J_eff;
  if (ring && n == 2) h(0, 1) = h(1, 0) = -2.0 * hp.J_eff;
  if (!ring) {
    h(0, 0) += hp.J_eff;
    h(n - 1, n - 1) += hp.J_eff;
  }
  return h;
}

EffectiveBlock effective_bloch(const HarperParams& hp, double k, int q) {
  if (q < 1) throw ValidationError("effective_bloch: q must be positive");
  EffectiveBlock out;
  out.matrix = Eigen::MatrixXcd::Zero(q, q);
  const Complex hop = -hp.J_eff * std::polar(1.0, k);
  for (int m = 0; m < q; ++m) {
    out.matrix(m, m) += hp.onsite(m + 1);
    const int next = (m + 1) % q;
    out.matrix(m, next) += hop;
    out.matrix(next, m) += std::conj(hop);
  }
  out.values = eigenvalues_dense(out.matrix);
  return out;
}

ChernResult effective_chern(const ModelParams& params, const ChernOptions& options) {
  const HarperParams base = harper_params(params);
  const int q = params.beta.q;
  if (params.L % q != 0) {
    throw CommensurabilityError("L: " + std::to_string(params.L) + " is not a multiple of q = " + std::to_string(q));
  }
  BlochFamily family;
  family.bands = q;
  family.k_points = momentum_grid(params.L, q);
  family.seam.resize(q);
  for (int m = 0; m < q; ++m) family.seam(m) = std::polar(1.0, -2.0 * kPi * (m + 1) / q);
  family.scale = 2.0 * std::abs(base.J_eff) + std::abs(base.lambda_prime);
  const double delta_shift = kPi * params.beta.value();
  family.solve = [base, q, delta_shift](double k, double delta) {
    HarperParams hp = base;
    hp.delta_prime = delta + delta_shift;
    GridSolution sol;
    sol.system = eig_dense(effective_bloch(hp, k, q).matrix);
    return sol;
  };
  ChernOptions opts = options;
  opts.continuum_floor = -1.0;
  return chern_from_family(family, opts);
}

BandComparison compare_bound_band(const ModelParams& params) {
  params.validate();
  if (params.N != 2) throw ValidationError("N: the effective model describes two magnons");
  const int count = bound_state_count(params);
  BandComparison out;

  const bool blocks = params.bc == Boundary::Periodic && params.L % params.beta.q == 0 &&
                      (params.L / params.beta.q) % 2 == 1;
  if (blocks) {
    const BlochModel model(params);
    for (double k : momentum_grid(params.L, params.beta.q)) {
      const Eigen::VectorXd v = eigenvalues_dense(model.block(k, params.delta).matrix);
      out.exact.insert(out.exact.end(), v.begin(), v.end());
    }
    std::sort(out.exact.begin(), out.exact.end());
    out.exact.resize(static_cast<std::size_t>(count));
  } else {
    const EigenSystem es = bound_states(params, -1.0);
    out.exact.assign(es.values.begin(), es.values.end());
  }

  const double offset = bound_band_offset(params);
  const Eigen::VectorXd eff = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(build_effective(params),
                                                                              Eigen::EigenvaluesOnly)
                                  .eigenvalues();
  for (double e : eff) out.effective.push_back(e + offset);
  for (std::size_t i = 0; i < out.exact.size(); ++i) {
    out.deviations.push_back(std::abs(out.exact[i] - out.effective[i]));
    out.max_abs_deviation = std::max(out.max_abs_deviation, out.deviations.back());
  }
  return out;
}

}  // namespace magnon
