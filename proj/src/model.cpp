#include "magnon/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "magnon/errors.hpp"

namespace magnon {

namespace {

constexpr std::uint64_t kMaxBasisSize = 50'000'000;

int wrap_site(int site, int L) { return ((site - 1) % L + L) % L + 1; }

}  // namespace

std::string to_string(Boundary bc) { return bc == Boundary::Periodic ? "periodic" : "open"; }

Boundary parse_boundary(const std::string& text) {
  if (text == "periodic" || text == "pbc") return Boundary::Periodic;
  if (text == "open" || text == "obc") return Boundary::Open;
  throw ValidationError("bc: expected 'periodic' or 'open', got '" + text + "'");
}

Rational Rational::reduced(int p, int q) {
  if (q <= 0) throw ValidationError("beta: denominator must be positive");
  p = ((p % q) + q) % q;
  const int g = std::gcd(p, q);
  return Rational{p / g, q / g};
}

void ModelParams::validate() const {
  auto finite = [](double v, const char* name) {
    if (!std::isfinite(v)) throw ValidationError(std::string(name) + ": must be finite");
  };
  finite(J, "J");
  finite(Delta, "Delta");
  finite(lambda, "lambda");
  finite(delta, "delta");
  finite(B0, "B0");
  if (beta.q < 1) throw ValidationError("beta_q: must be >= 1");
  if (beta.p < 0 || beta.p >= beta.q) throw ValidationError("beta_p: must satisfy 0 <= p < q");
  if (std::gcd(beta.p, beta.q) != 1) {
    throw ValidationError("beta: p/q = " + std::to_string(beta.p) + "/" + std::to_string(beta.q) +
                          " is not reduced (gcd(p, q) != 1)");
  }
  if (L < 2) throw ValidationError("L: lattice needs at least two sites");
  if (N < 1 || N > L) throw ValidationError("N: magnon number must satisfy 1 <= N <= L");
}

void ModelParams::validate_momentum_blocks() const {
  validate();
  if (bc != Boundary::Periodic) throw ValidationError("bc: momentum blocks need periodic boundaries");
  if (N != 2) throw ValidationError("N: momentum blocks are implemented for two magnons");
  if (L % beta.q != 0) {
    throw CommensurabilityError("L: " + std::to_string(L) + " is not a multiple of q = " +
                                std::to_string(beta.q));
  }
  if ((L / beta.q) % 2 == 0) {
    throw CommensurabilityError("L: L/q = " + std::to_string(L / beta.q) +
                                " is even, so pairs at separation L/2 are fixed by a partial "
                                "cotranslation; choose an odd number of periods");
  }
}

double ModelParams::field(int site) const {
  return lambda * std::cos(2.0 * std::numbers::pi * beta.value() * site + delta);
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t factor = static_cast<std::uint64_t>(n - k + i);
    // result * factor / i stays exact because result*factor is divisible by i.
    if (result > std::numeric_limits<std::uint64_t>::max() / factor) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    result = result * factor / static_cast<std::uint64_t>(i);
  }
  return result;
}

MagnonBasis::MagnonBasis(int L, int N) : L_(L), N_(N) {
  if (N < 1 || N > L) {
    throw ValidationError("invalid dimension: need 1 <= N <= L, got L=" + std::to_string(L) +
                          ", N=" + std::to_string(N));
  }
  const std::uint64_t count = binomial(L, N);
  if (count > kMaxBasisSize) {
    throw ValidationError("invalid dimension: C(" + std::to_string(L) + ", " + std::to_string(N) +
                          ") exceeds the basis size cap");
  }

  states_.reserve(count);
  BasisState state(N);
  std::iota(state.begin(), state.end(), 1);
  while (true) {
    states_.push_back(state);
    int i = N - 1;
    while (i >= 0 && state[i] == L - N + i + 1) --i;
    if (i < 0) break;
    ++state[i];
    for (int j = i + 1; j < N; ++j) state[j] = state[j - 1] + 1;
  }

  // Lexicographic rank: sum_i sum_{v = c_{i-1}+1}^{c_i - 1} C(L - v, N - i - 1).
  offsets_.assign(N, std::vector<std::uint64_t>(L + 2, 0));
  for (int i = 0; i < N; ++i) {
    for (int l = 2; l <= L + 1; ++l) {
      offsets_[i][l] = offsets_[i][l - 1] + binomial(L - (l - 1), N - i - 1);
    }
  }
}

std::optional<std::size_t> MagnonBasis::find(const BasisState& state) const {
  if (static_cast<int>(state.size()) != N_) return std::nullopt;
  std::uint64_t rank = 0;
  int previous = 0;
  for (int i = 0; i < N_; ++i) {
    const int site = state[i];
    if (site <= previous || site > L_) return std::nullopt;
    rank += offsets_[i][site] - offsets_[i][previous + 1];
    previous = site;
  }
  return static_cast<std::size_t>(rank);
}

std::size_t MagnonBasis::index_of(const BasisState& state) const {
  if (auto index = find(state)) return *index;
  throw ValidationError("state is not in the " + std::to_string(N_) + "-magnon basis of " +
                        std::to_string(L_) + " sites");
}

MagnonBasis build_basis(int L, int N) { return MagnonBasis(L, N); }

Eigen::MatrixXcd SparseHermitian::to_dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& e : entries) {
    m(e.row, e.col) += e.value;
    if (e.row != e.col) m(e.col, e.row) += std::conj(e.value);
  }
  return m;
}

Eigen::SparseMatrix<Complex> SparseHermitian::to_sparse() const {
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(2 * entries.size());
  for (const auto& e : entries) {
    triplets.emplace_back(e.row, e.col, e.value);
    if (e.row != e.col) triplets.emplace_back(e.col, e.row, std::conj(e.value));
  }
  Eigen::SparseMatrix<Complex> m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

bool SparseHermitian::is_real() const {
  return std::all_of(entries.begin(), entries.end(), [](const Entry& e) { return e.value.imag() == 0.0; });
}

double SparseHermitian::max_abs() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, std::abs(e.value));
  return m;
}

double SparseHermitian::norm_bound() const {
  std::vector<double> rows(dim, 0.0);
  for (const auto& e : entries) {
    rows[e.row] += std::abs(e.value);
    if (e.row != e.col) rows[e.col] += std::abs(e.value);
  }
  return rows.empty() ? 0.0 : *std::max_element(rows.begin(), rows.end());
}

void SparseHermitian::apply(const Eigen::Ref<const Eigen::MatrixXcd>& x, Eigen::Ref<Eigen::MatrixXcd> y) const {
  y.setZero();
  for (const auto& e : entries) {
    y.row(e.row) += e.value * x.row(e.col);
    if (e.row != e.col) y.row(e.col) += std::conj(e.value) * x.row(e.row);
  }
}

double potential_energy(const BasisState& state, const ModelParams& params) {
  const int n = static_cast<int>(state.size());
  double v = 0.0;
  for (int j = 0; j + 1 < n; ++j) {
    if (state[j] + 1 == state[j + 1]) v -= params.Delta;
  }
  if (params.bc == Boundary::Periodic && n > 0 && state.front() == 1 && state.back() == params.L) {
    v -= params.Delta;
  }
  for (int site : state) v += params.field(site);
  return v;
}

SparseHermitian build_hamiltonian(const ModelParams& params, const MagnonBasis& basis) {
  const int L = params.L;
  SparseHermitian h;
  h.dim = basis.size();
  h.entries.reserve(basis.size() * (1 + params.N));

  std::vector<std::pair<std::size_t, double>> row;
  BasisState moved;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const BasisState& state = basis[i];
    h.entries.push_back({i, i, Complex(potential_energy(state, params), 0.0)});

    row.clear();
    for (std::size_t j = 0; j < state.size(); ++j) {
      for (int step : {-1, +1}) {
        int target = state[j] + step;
        if (params.bc == Boundary::Periodic) {
          target = wrap_site(target, L);
        } else if (target < 1 || target > L) {
          continue;
        }
        // Hard-core: S+ on an occupied site annihilates the state.
        if (std::find(state.begin(), state.end(), target) != state.end()) continue;
        moved = state;
        moved[j] = target;
        std::sort(moved.begin(), moved.end());
        const std::size_t t = basis.index_of(moved);
        if (t > i) row.emplace_back(t, -params.J);
      }
    }
    std::sort(row.begin(), row.end());
    for (std::size_t r = 0; r < row.size(); ++r) {
      double value = row[r].second;
      while (r + 1 < row.size() && row[r + 1].first == row[r].first) value += row[++r].second;
      h.entries.push_back({i, row[r].first, Complex(value, 0.0)});
    }
  }
  return h;
}

SparseHermitian build_hamiltonian(const ModelParams& params) {
  params.validate();
  return build_hamiltonian(params, MagnonBasis(params.L, params.N));
}

BasisState cotranslate(const BasisState& state, int tau, int q, int L) {
  if (q < 1 || L % q != 0) {
    throw CommensurabilityError("cotranslation needs L mod q = 0, got L=" + std::to_string(L) +
                                ", q=" + std::to_string(q));
  }
  const long long shift = static_cast<long long>(tau) * q;
  BasisState out(state.size());
  for (std::size_t j = 0; j < state.size(); ++j) {
    out[j] = static_cast<int>(((state[j] - 1 + shift) % L + L) % L) + 1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

double check_cotranslation_symmetry(const ModelParams& params) {
  params.validate();
  if (params.bc != Boundary::Periodic) {
    throw ValidationError("bc: cotranslation symmetry is only defined for periodic boundaries");
  }
  const int q = params.beta.q;
  if (params.L % q != 0) {
    throw CommensurabilityError("L: " + std::to_string(params.L) + " is not a multiple of q = " +
                                std::to_string(q));
  }
  const MagnonBasis basis(params.L, params.N);
  return cotranslation_defect(build_hamiltonian(params, basis), basis, q);
}

double cotranslation_defect(const SparseHermitian& op, const MagnonBasis& basis, int q) {
  const int L = basis.sites();
  if (op.dim != basis.size()) throw ValidationError("cotranslation_defect: operator and basis sizes differ");
  const Eigen::SparseMatrix<Complex> h = op.to_sparse();

  std::vector<std::size_t> forward(basis.size());
  std::vector<std::size_t> backward(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    forward[i] = basis.index_of(cotranslate(basis[i], 1, q, L));
    backward[forward[i]] = i;
  }

  // (T^-1 H T)_{ij} = H_{T(i) T(j)}; visiting the nonzeros of both H and
  // T^-1 H T covers every entry of the difference.
  double worst = 0.0;
  for (int col = 0; col < h.outerSize(); ++col) {
    for (Eigen::SparseMatrix<Complex>::InnerIterator it(h, col); it; ++it) {
      const auto i = static_cast<std::size_t>(it.row());
      const auto j = static_cast<std::size_t>(it.col());
      const Complex conjugated = h.coeff(static_cast<Eigen::Index>(forward[i]), static_cast<Eigen::Index>(forward[j]));
      const Complex pulled_back = h.coeff(static_cast<Eigen::Index>(backward[i]), static_cast<Eigen::Index>(backward[j]));
      worst = std::max({worst, std::abs(conjugated - it.value()), std::abs(pulled_back - it.value())});
    }
  }
  return worst;
}

SpinCouplings map_bose_hubbard(double t_up, double t_dn, double U_uu, double U_dd, double U_ud) {
  if (U_uu == 0.0 || U_dd == 0.0 || U_ud == 0.0) {
    throw ValidationError("Bose-Hubbard mapping: interaction strengths must be nonzero");
  }
  SpinCouplings c{};
  c.J = 2.0 * t_up * t_dn / U_ud;
  c.Delta = 4.0 * t_up * t_up / U_uu + 4.0 * t_dn * t_dn / U_dd - 2.0 * (t_up * t_up + t_dn * t_dn) / U_ud;
  return c;
}

}  // namespace magnon
