#include "magnon/momentum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "magnon/errors.hpp"

namespace magnon {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double fold(double d, int L) { return d - L * std::ceil((d - 0.5 * L) / L); }

}  // namespace

double pair_center(const BasisState& pair, int L) {
  const int separation = pair[1] - pair[0];
  if (2 * separation <= L) return 0.5 * (pair[0] + pair[1]);
  return 0.5 * (pair[0] + pair[1] + L);
}

OrbitBasis::OrbitBasis(int L, int q) : L_(L), q_(q), pairs_(L, 2) {
  if (q < 1 || L % q != 0) {
    throw CommensurabilityError("orbit basis needs L mod q = 0, got L=" + std::to_string(L) + ", q=" + std::to_string(q));
  }
  const int s = L / q;
  if (s % 2 == 0) {
    throw CommensurabilityError("orbit basis needs an odd number of periods L/q, got " + std::to_string(s));
  }

  constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);
  location_.assign(pairs_.size(), OrbitLocation{kUnassigned, 0});
  // Visiting states in lexicographic order makes the first unassigned member
  // of each orbit its lexicographic minimum.
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (location_[i].orbit != kUnassigned) continue;
    const std::size_t orbit = reps_.size();
    reps_.push_back(pairs_[i]);
    centers_.push_back(pair_center(pairs_[i], L));
    for (int tau = 0; tau < s; ++tau) {
      const std::size_t member = pairs_.index_of(cotranslate(pairs_[i], tau, q, L));
      if (location_[member].orbit != kUnassigned) {
        throw CommensurabilityError("cotranslation orbit of size < L/q encountered");
      }
      location_[member] = OrbitLocation{orbit, tau};
    }
  }
}

OrbitLocation OrbitBasis::orbit_of(const BasisState& state) const { return location_[pairs_.index_of(state)]; }

double OrbitBasis::displacement(std::size_t from_orbit, OrbitLocation to) const {
  return fold(centers_[to.orbit] + static_cast<double>(to.shift) * q_ - centers_[from_orbit], L_);
}

OrbitBasis build_orbit_basis(int L, int q) { return OrbitBasis(L, q); }

BlochModel::BlochModel(const ModelParams& params) : params_(params) {
  params_.validate_momentum_blocks();
  basis_ = std::make_shared<const OrbitBasis>(params_.L, params_.beta.q);
  const int L = params_.L;
  const auto& reps = basis_->reps();
  for (std::size_t a = 0; a < reps.size(); ++a) {
    for (int j = 0; j < 2; ++j) {
      for (int step : {-1, +1}) {
        BasisState moved = reps[a];
        moved[j] = ((moved[j] - 1 + step) % L + L) % L + 1;
        if (moved[0] == moved[1]) continue;
        std::sort(moved.begin(), moved.end());
        const OrbitLocation to = basis_->orbit_of(moved);
        hops_.push_back(Hop{static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(to.orbit), basis_->displacement(a, to)});
      }
    }
  }
}

Eigen::VectorXd BlochModel::potentials(double delta) const {
  ModelParams shifted = params_;
  shifted.delta = delta;
  const auto& reps = basis_->reps();
  Eigen::VectorXd v(static_cast<Eigen::Index>(reps.size()));
  for (std::size_t a = 0; a < reps.size(); ++a) v(static_cast<Eigen::Index>(a)) = potential_energy(reps[a], shifted);
  return v;
}

BlochBlock BlochModel::block(double k, double delta) const {
  BlochBlock out;
  out.k = k;
  out.delta = delta;
  out.basis = basis_;
  out.matrix = potentials(delta).cast<Complex>().asDiagonal();
  for (const Hop& hop : hops_) {
    out.matrix(hop.from, hop.to) += -params_.J * std::polar(1.0, k * hop.displacement);
  }
  return out;
}

HermitianOperator BlochModel::op(double k, double delta) const {
  struct Terms {
    Eigen::VectorXd diagonal;
    std::vector<Eigen::Index> from;
    std::vector<Eigen::Index> to;
    std::vector<Complex> value;
  };
  auto terms = std::make_shared<Terms>();
  terms->diagonal = potentials(delta);
  terms->from.reserve(hops_.size());
  terms->to.reserve(hops_.size());
  terms->value.reserve(hops_.size());
  for (const Hop& hop : hops_) {
    terms->from.push_back(hop.from);
    terms->to.push_back(hop.to);
    terms->value.push_back(-params_.J * std::polar(1.0, k * hop.displacement));
  }

  HermitianOperator op;
  op.dim = dim();
  op.norm_bound = terms->diagonal.cwiseAbs().maxCoeff() + 4.0 * std::abs(params_.J);
  op.apply = [terms](const Eigen::Ref<const Eigen::MatrixXcd>& x, Eigen::Ref<Eigen::MatrixXcd> y) {
    y.noalias() = terms->diagonal.asDiagonal() * x;
    for (std::size_t h = 0; h < terms->value.size(); ++h) y.row(terms->from[h]) += terms->value[h] * x.row(terms->to[h]);
  };
  return op;
}

EigenSystem lowest_block_states(const BlochModel& model, double k, double delta, Eigen::Index m, double* next) {
  if (model.dim() <= 128) {
    EigenSystem es = eig_dense(model.block(k, delta).matrix);
    if (next) *next = m < es.size() ? es.values(m) : INFINITY;
    es.values.conservativeResize(m);
    es.vectors.conservativeResize(Eigen::NoChange, m);
    return es;
  }
  return eig_lowest_filtered(model.op(k, delta), m, {}, next);
}

BlochBlock build_bloch_block(const ModelParams& params, double k, std::optional<double> delta_override) {
  const BlochModel model(params);
  return model.block(k, delta_override.value_or(params.delta));
}

Eigen::MatrixXcd project_to_block(const SparseHermitian& h, const OrbitBasis& basis, double k) {
  if (h.dim != basis.pair_basis().size()) throw ValidationError("project_to_block: operator is not on the two-magnon space");
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  auto accumulate = [&](std::size_t row, std::size_t col, Complex value) {
    const OrbitLocation from = basis.orbit_of_index(row);
    if (from.shift != 0) return;  // only representative rows enter the block
    const OrbitLocation to = basis.orbit_of_index(col);
    m(static_cast<Eigen::Index>(from.orbit), static_cast<Eigen::Index>(to.orbit)) +=
        value * std::polar(1.0, k * basis.displacement(from.orbit, to));
  };
  for (const auto& e : h.entries) {
    accumulate(e.row, e.col, e.value);
    if (e.row != e.col) accumulate(e.col, e.row, std::conj(e.value));
  }
  return m;
}

Eigen::VectorXcd covariance_unitary(const OrbitBasis& basis) {
  Eigen::VectorXcd d(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t a = 0; a < basis.size(); ++a) {
    d(static_cast<Eigen::Index>(a)) = std::polar(1.0, -kTwoPi / basis.period() * basis.center(a));
  }
  return d;
}

std::vector<double> momentum_grid(int L, int q) {
  std::vector<double> ks;
  for (int alpha = 1; alpha <= L / q; ++alpha) ks.push_back(kTwoPi * alpha / L);
  return ks;
}

double verify_block_decomposition(const ModelParams& params) {
  const BlochModel model(params);
  const EigenSystem full = eig_dense(build_hamiltonian(params));

  std::vector<double> merged;
  merged.reserve(static_cast<std::size_t>(full.values.size()));
  for (double k : momentum_grid(params.L, params.beta.q)) {
    const EigenSystem part = eig_dense(model.block(k, params.delta).matrix);
    merged.insert(merged.end(), part.values.begin(), part.values.end());
  }
  if (merged.size() != static_cast<std::size_t>(full.values.size())) {
    throw Error("block decomposition lost states: " + std::to_string(merged.size()) + " vs " +
                std::to_string(full.values.size()));
  }
  std::sort(merged.begin(), merged.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < merged.size(); ++i) worst = std::max(worst, std::abs(merged[i] - full.values(static_cast<Eigen::Index>(i))));
  return worst;
}

}  // namespace magnon
