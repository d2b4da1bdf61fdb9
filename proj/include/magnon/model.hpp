#pragma once

// N-magnon sector of the periodically modulated XXZ chain:
//
//   H = -sum_l [ J (S+_l S-_{l+1} + h.c.) + Delta Sz_l Sz_{l+1} ]
//       + sum_l B_l Sz_l + B0 sum_l Sz_l,    B_l = lambda cos(2 pi beta l + delta)
//
// Sites are 1-based. Within a fixed magnon number the uniform field and the
// vacuum energy are constants and are dropped from every stored matrix.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace magnon {

using Complex = std::complex<double>;

enum class Boundary { Periodic, Open };

std::string to_string(Boundary bc);
Boundary parse_boundary(const std::string& text);

/// Modulation frequency beta = p/q, kept reduced with 0 <= p < q.
struct Rational {
  int p = 0;
  int q = 1;

  /// Reduces p/q and folds it into [0, 1). Throws ValidationError for q <= 0.
  static Rational reduced(int p, int q);
  double value() const { return static_cast<double>(p) / q; }
  bool operator==(const Rational&) const = default;
};

struct ModelParams {
  double J = 1.0;
  double Delta = 0.0;
  double lambda = 0.0;
  Rational beta{};
  double delta = 0.0;
  double B0 = 0.0;
  int L = 2;
  int N = 2;
  Boundary bc = Boundary::Periodic;

  /// Checks the type invariants; throws ValidationError naming the field.
  void validate() const;

  /// Additionally requires periodic BC, N = 2, L mod q = 0 and an odd
  /// number L/q of modulation periods (free cotranslation orbits).
  void validate_momentum_blocks() const;

  /// B_l for 1-based site l.
  double field(int site) const;

  int periods() const { return L / beta.q; }
};

/// Strictly increasing 1-based magnon positions.
using BasisState = std::vector<int>;

/// All N-magnon configurations of L sites in lexicographic order. Lookup is a
/// combinatorial rank, so it is O(N) and needs no hash table.
class MagnonBasis {
 public:
  MagnonBasis(int L, int N);

  int sites() const { return L_; }
  int magnons() const { return N_; }
  std::size_t size() const { return states_.size(); }
  const std::vector<BasisState>& states() const { return states_; }
  const BasisState& operator[](std::size_t i) const { return states_[i]; }

  /// Index of a valid state; nullopt if the tuple is not a basis state.
  std::optional<std::size_t> find(const BasisState& state) const;
  /// Index of a state known to be valid; throws ValidationError otherwise.
  std::size_t index_of(const BasisState& state) const;

 private:
  int L_;
  int N_;
  std::vector<BasisState> states_;
  // offsets_[i][l]: number of states whose i-th magnon sits left of l while
  // magnons 0..i-1 are fixed; see rank computation in model.cpp.
  std::vector<std::vector<std::uint64_t>> offsets_;
};

MagnonBasis build_basis(int L, int N);

/// Binomial coefficient, saturating at UINT64_MAX.
std::uint64_t binomial(int n, int k);

/// Hermitian matrix stored as its upper triangle (row <= col).
struct SparseHermitian {
  struct Entry {
    std::size_t row;
    std::size_t col;
    Complex value;
  };

  std::size_t dim = 0;
  std::vector<Entry> entries;

  /// Full matrix with the lower triangle filled in.
  Eigen::MatrixXcd to_dense() const;
  Eigen::SparseMatrix<Complex> to_sparse() const;
  /// True when every stored value has zero imaginary part.
  bool is_real() const;
  /// Largest |H_ij| over the stored entries.
  double max_abs() const;
  /// Row-sum bound on the spectral norm.
  double norm_bound() const;
  /// y = H x with the Hermitian closure applied.
  void apply(const Eigen::Ref<const Eigen::MatrixXcd>& x, Eigen::Ref<Eigen::MatrixXcd> y) const;
};

double potential_energy(const BasisState& state, const ModelParams& params);

SparseHermitian build_hamiltonian(const ModelParams& params, const MagnonBasis& basis);
SparseHermitian build_hamiltonian(const ModelParams& params);

/// Shifts every magnon by tau*q sites around the ring and re-sorts.
BasisState cotranslate(const BasisState& state, int tau, int q, int L);

/// max-norm of T^-1 H T - H for the unit cotranslation T = T_q(1).
double check_cotranslation_symmetry(const ModelParams& params);

/// Same measure for an arbitrary operator on the sector spanned by basis.
double cotranslation_defect(const SparseHermitian& h, const MagnonBasis& basis, int q);

struct SpinCouplings {
  double J;
  double Delta;
};

/// Exchange couplings of the two-component Bose-Hubbard Mott insulator.
SpinCouplings map_bose_hubbard(double t_up, double t_dn, double U_uu, double U_dd, double U_ud);

}  // namespace magnon
