#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "magnon/errors.hpp"
#include "magnon/harper.hpp"
#include "magnon/momentum.hpp"
#include "magnon/spectra.hpp"
#include "oracles.hpp"

using namespace magnon;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams fig1(int L, Boundary bc = Boundary::Periodic) {
  ModelParams p;
  p.Delta = 100.0;
  p.lambda = 0.04;
  p.beta = {1, 3};
  p.delta = kPi / 6;
  p.L = L;
  p.bc = bc;
  return p;
}

Eigen::VectorXcd basis_vector(const MagnonBasis& b, const BasisState& s) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(b.size()));
  v(static_cast<Eigen::Index>(b.index_of(s))) = 1.0;
  return v;
}

}  // namespace

TEST_CASE("filtered subspace iteration agrees with dense diagonalization") {
  for (double Delta : {100.0, 2.0}) {
    ModelParams p = fig1(40, Boundary::Open);
    p.Delta = Delta;
    const SparseHermitian h = build_hamiltonian(p);
    const EigenSystem dense = eig_dense(h);
    double next = 0.0;
    const EigenSystem part = eig_lowest_filtered(as_operator(h), 39, {}, &next);
    for (Eigen::Index i = 0; i < 39; ++i) CHECK(std::abs(part.values(i) - dense.values(i)) < 1e-8 * h.norm_bound());
    CHECK(max_residual(as_operator(h), part) < 1e-8 * h.norm_bound());
    CHECK((part.vectors.adjoint() * part.vectors - Eigen::MatrixXcd::Identity(39, 39)).norm() < 1e-10);
    CHECK(next <= dense.values(39) + 1e-9);
  }
}

TEST_CASE("bound band at the reference parameters") {
  const ModelParams p = fig1(99);
  const BandSet bands = bound_band(p, p.delta);
  REQUIRE(bands.k_grid.size() == 33);
  const double offset = bound_band_offset(p);
  for (const auto& e : bands.energies) {
    REQUIRE(e.size() == 3);
    for (Eigen::Index n = 0; n < 3; ++n) CHECK(std::abs(e(n) - offset) < 0.1);
  }
  CHECK(bands.continuum_gap > 90.0);
  // Bloch vectors are orthonormal eigenvectors of their blocks
  const BlochModel model(p);
  for (std::size_t a = 0; a < bands.k_grid.size(); a += 8) {
    const Eigen::MatrixXcd h = model.block(bands.k_grid[a], p.delta).matrix;
    const Eigen::MatrixXcd& v = bands.vectors[a];
    CHECK((h * v - v * bands.energies[a].asDiagonal()).norm() < 1e-9);
  }
}

TEST_CASE("weak binding trips the continuum-gap floor") {
  ModelParams p = fig1(33);
  p.Delta = 0.5;
  CHECK_THROWS_AS(bound_band(p, 0.0), BandOverlapError);
  CHECK_THROWS_AS(bound_states(p), BandOverlapError);
}

TEST_CASE("without modulation the bound band has the effective width") {
  ModelParams p = fig1(99);
  p.lambda = 0.0;
  const BandSet bands = bound_band(p, 0.0);
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto& e : bands.energies) {
    lo = std::min(lo, e.minCoeff());
    hi = std::max(hi, e.maxCoeff());
  }
  const double J_eff = 1.0 / 100.0;
  // quantized ring momenta reach 4 J_eff (1 - O(1/L^2)); corrections are O(J^4/Delta^3)
  CHECK(hi - lo == doctest::Approx(4.0 * J_eff * std::pow(std::cos(kPi / 99 / 2), 2)).epsilon(1e-3));
}

TEST_CASE("open-chain bound states agree with dense diagonalization") {
  const ModelParams p = fig1(30, Boundary::Open);
  const EigenSystem es = bound_states(p);
  REQUIRE(es.size() == 29);
  std::vector<double> field;
  for (int l = 1; l <= p.L; ++l) field.push_back(p.field(l));
  auto reference = oracle::sorted_eigenvalues(oracle::two_boson_hamiltonian(p.L, false, p.J, p.Delta, field));
  reference.resize(29);
  CHECK(oracle::max_distance({es.values.begin(), es.values.end()}, reference) < 1e-8);
}

TEST_CASE("density profile and correlations") {
  const MagnonBasis b(6, 2);
  const Eigen::VectorXcd s34 = basis_vector(b, {3, 4});
  const auto n = density_profile(s34, b);
  CHECK(n == std::vector<double>{0, 0, 1, 1, 0, 0});
  const Eigen::MatrixXd g = correlation_matrix(s34, b);
  CHECK(g(2, 3) == 1.0);
  CHECK(g(3, 2) == 1.0);
  CHECK(g.sum() == 2.0);

  const Eigen::VectorXcd mix = (basis_vector(b, {1, 2}) + basis_vector(b, {2, 3})) / std::sqrt(2.0);
  const auto m = density_profile(mix, b);
  CHECK(m[1] == doctest::Approx(1.0));
  CHECK(m[0] == doctest::Approx(0.5));
  CHECK(m[2] == doctest::Approx(0.5));

  CHECK_THROWS_AS(density_profile(2.0 * s34, b), ValidationError);
  CHECK_THROWS_AS(correlation_matrix(Eigen::VectorXcd::Zero(20).eval(), MagnonBasis(6, 3)), ValidationError);
}

TEST_CASE("bound and scattering eigenstates have contrasting correlations") {
  const ModelParams p = fig1(24, Boundary::Open);
  const MagnonBasis b(p.L, 2);
  const EigenSystem es = eig_dense(build_hamiltonian(p, b));
  auto minor_diagonal = [&](Eigen::Index i) {
    const Eigen::MatrixXd g = correlation_matrix(es.vectors.col(i), b);
    double sum = 0.0;
    double peak = 0.0;
    for (int l = 0; l + 1 < p.L; ++l) {
      sum += g(l, l + 1);
      peak = std::max(peak, g(l, l + 1));
    }
    CHECK(g.sum() / 2.0 == doctest::Approx(1.0).epsilon(1e-10));
    const auto n = density_profile(es.vectors.col(i), b);
    double total = 0.0;
    for (double x : n) total += x;
    CHECK(total == doctest::Approx(2.0).epsilon(1e-10));
    return std::pair{sum, peak};
  };
  CHECK(minor_diagonal(0).first >= 0.99);
  CHECK(minor_diagonal(es.size() - 1).second < 0.01);
}

TEST_CASE("periodic spectra repeat with period 2 pi / q in delta") {
  const ModelParams p = fig1(21);
  const DeltaSweep s = delta_sweep(p, 60);
  REQUIRE(s.deltas.size() == 60);
  const double scale = build_hamiltonian(p).norm_bound();
  for (std::size_t j = 0; j < 40; ++j) {
    CHECK(oracle::max_distance(s.energies[j], s.energies[j + 20]) < 1e-9 * scale);
  }
  CHECK(delta_sweep(p, 1).deltas.size() == 1);
  CHECK_THROWS_AS(delta_sweep(p, 0), ValidationError);
}

TEST_CASE("open-chain sweep uses the full space or the bound band") {
  const ModelParams p = fig1(12, Boundary::Open);
  const DeltaSweep full = delta_sweep(p, 4);
  CHECK(full.energies[0].size() == 66);
  const DeltaSweep bound = delta_sweep(p, 4, {true});
  CHECK(bound.energies[0].size() == 11);
  for (std::size_t i = 0; i < 11; ++i) CHECK(bound.energies[2][i] == doctest::Approx(full.energies[2][i]));
}

TEST_CASE("butterfly lambda rule") {
  const ModelParams p = fig1(30, Boundary::Open);
  CHECK(butterfly_lambda(p, 1, 3) == doctest::Approx(0.02));
  CHECK(butterfly_lambda(p, 1, 2) == 0.0);
  CHECK(butterfly_lambda(p, 1, 1) == doctest::Approx(-0.01));
}

TEST_CASE("butterfly points stay inside the effective Gershgorin envelope") {
  ModelParams p = fig1(30, Boundary::Open);
  const auto points = butterfly(p, 4);
  std::set<std::pair<int, int>> fractions;
  for (const auto& pt : points) {
    fractions.insert({pt.p, pt.q});
    const double J_eff = p.J * p.J / p.Delta;
    const double envelope = 2 * J_eff * (1 + std::abs(1 / std::cos(kPi * pt.p / pt.q)));
    if (2 * pt.p != pt.q) CHECK(std::abs(pt.energy) <= envelope);
  }
  // 0/1, 1/1, 1/2, 1/3, 2/3, 1/4, 3/4 with L - 1 bound states each
  CHECK(fractions.size() == 7);
  CHECK(points.size() == 7 * 29);
}

TEST_CASE("edge states on the 100-site open chain") {
  const ModelParams p = fig1(100, Boundary::Open);
  const EdgeScan scan = scan_bound_states(p, p.delta);
  CHECK(scan.states.size() == 99);
  CHECK(scan.bulk_gaps.size() == 2);
  const auto edges = find_edge_states(p, p.delta);
  REQUIRE(edges.size() == 2);
  std::set<EdgeSide> sides{edges[0].side, edges[1].side};
  CHECK(sides == std::set<EdgeSide>{EdgeSide::Left, EdgeSide::Right});
  for (const auto& e : edges) CHECK(e.localization >= 0.9);

  // a state from the middle of the lowest band is extended
  const BoundStateInfo& bulk = scan.states[16];
  CHECK_FALSE(bulk.in_gap);
  CHECK(bulk.localization() < 0.9);
  CHECK(bulk.side == EdgeSide::Bulk);
}

TEST_CASE("no modulation, no edge states") {
  ModelParams p = fig1(60, Boundary::Open);
  p.lambda = 0.0;
  CHECK(find_edge_states(p, 0.3).empty());
  p.bc = Boundary::Periodic;
  CHECK_THROWS_AS(find_edge_states(p, 0.3), ValidationError);
}
