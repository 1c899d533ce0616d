#pragma once

// Finite N-particle model: product momentum grids, free Hamiltonian, embedded
// pair potentials, Green's functions and embedded two-body solutions.
//
// Basis ordering is row-major over particles: for grid sizes (n_0, ..., n_{N-1})
// the tuple (i_0, ..., i_{N-1}) maps to
//   i_0 * n_1 * ... * n_{N-1} + ... + i_{N-2} * n_{N-1} + i_{N-1}.
// The pair block of alpha = (m, n) uses the same rule on (i_m, i_n), so a pair
// potential for (m, n) is a (n_m n_n) x (n_m n_n) matrix indexed by
// i_m * n_n + i_n.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fewbody/operator.hpp"

namespace fewbody {

/// Spectral parameter z = e0 + i eps with eps > 0.
class ComplexEnergy {
 public:
  ComplexEnergy(double e0, double eps);

  double e0() const noexcept { return e0_; }
  double eps() const noexcept { return eps_; }
  Complex z() const noexcept { return {e0_, eps_}; }
  Complex z_conj() const noexcept { return {e0_, -eps_}; }

  /// Same regulator, real part lowered by `delta` (spectator kinetic energy).
  ComplexEnergy shifted_down(double delta) const { return {e0_ - delta, eps_}; }

  friend bool operator==(const ComplexEnergy&, const ComplexEnergy&) = default;

 private:
  double e0_;
  double eps_;
};

/// Interacting pair alpha = (m, n), stored zero-based with m < n.
struct PairIndex {
  int m = 0;
  int n = 1;

  /// One-based label such as "12".
  std::string label() const;
  static PairIndex from_label(std::string_view label);

  friend auto operator<=>(const PairIndex&, const PairIndex&) = default;
};

/// Every pair of an N-particle system in lexicographic order; N(N-1)/2 items.
std::vector<PairIndex> all_pairs(int n_particles);

struct ModelSpec {
  int n_particles = 3;
  std::vector<double> masses;
  std::vector<std::vector<double>> grids;
  std::map<PairIndex, Matrix> pair_potentials;

  /// Throws ModelError on any violated invariant.
  void validate() const;

  Index dimension() const;
  Index pair_dimension(PairIndex alpha) const;
  /// Keys of pair_potentials, in order.
  std::vector<PairIndex> interacting_pairs() const;
};

/// Full-space operator together with the energy it was built at (if any).
struct FewBodyOperator {
  OperatorMatrix op;
  std::optional<ComplexEnergy> energy;

  const Matrix& matrix() const noexcept { return op.matrix(); }
  Role role() const noexcept { return op.role(); }
};

/// Mixed-radix index arithmetic over the per-particle grids.
class ProductLayout {
 public:
  explicit ProductLayout(std::vector<Index> sizes);

  Index size() const noexcept { return total_; }
  int rank() const noexcept { return static_cast<int>(sizes_.size()); }
  Index extent(int axis) const { return sizes_.at(axis); }
  Index stride(int axis) const { return strides_.at(axis); }

  Index flatten(std::span<const Index> labels) const;
  std::vector<Index> unflatten(Index flat) const;

 private:
  std::vector<Index> sizes_;
  std::vector<Index> strides_;
  Index total_ = 1;
};

ProductLayout layout_of(const ModelSpec& spec);

/// Diagonal real operator with entries sum_l q_l^2 / (2 m_l).
FewBodyOperator build_h0(const ModelSpec& spec);

/// Diagonal of H0 as a real vector (same ordering as build_h0).
RealVector h0_diagonal(const ModelSpec& spec);

/// v_alpha acting on the (m, n) factors, Kronecker delta on all spectators.
FewBodyOperator embed_pair_potential(const ModelSpec& spec, PairIndex alpha);

/// V = sum over interacting pairs of embed_pair_potential.
FewBodyOperator build_v(const ModelSpec& spec);

struct GreenFunctions {
  FewBodyOperator g0;  // (z - H0)^-1
  FewBodyOperator g1;  // anti-Hermitian part
  FewBodyOperator g2;  // Hermitian part
};

/// G0, G1, G2 at z. G0 is assembled from the G1 and G2 entries so that
/// G1 + G2 == G0 holds bit for bit.
GreenFunctions green_functions(const ModelSpec& spec, const ComplexEnergy& z);

enum class TwoBodyKind { t_matrix, k_matrix };

/// Block-diagonal embedding of the two-body t (or k) solution for pair alpha.
///
/// Each spectator tuple gets its own pair block, solved by direct inversion
/// at the shifted energy z' = z - (spectator kinetic energy):
///   t = v + v g0(z') t,   k = v + v g2(z') k.
FewBodyOperator embed_two_body_solution(const ModelSpec& spec, PairIndex alpha,
                                        const ComplexEnergy& z,
                                        TwoBodyKind kind);

/// Largest |eigenvalue| of the pair kinetic energy q_m^2/2m_m + q_n^2/2m_n
/// over all interacting pairs. Sweep energies are quoted in these units.
double pair_spectral_radius(const ModelSpec& spec);

/// |min(0, lowest eigenvalue of h_pair + v_pair)| over all interacting pairs.
/// The finite-model stand-in for the minimum binding energy.
double binding_scale(const ModelSpec& spec);

/// Median of the H0 spectrum.
double h0_median(const ModelSpec& spec);

// Pair potential families on a pair's product grid. The relative momentum of
// the grid tuple (q_m, q_n) is p = (m_n q_m - m_m q_n) / (m_m + m_n).

/// lambda f(p) f(p'), f(p) = 1 / (p^2 + beta^2).
Matrix separable_pair_potential(const ModelSpec& spec, PairIndex alpha,
                                double strength, double range);

/// lambda exp(-(p - p')^2 / (2 range^2)).
Matrix gaussian_pair_potential(const ModelSpec& spec, PairIndex alpha,
                               double strength, double range);

/// Hermitian matrix with entries uniform in the unit square, scaled so the
/// Frobenius norm is `strength`. Deterministic in `seed` on every platform.
Matrix random_hermitian(Index dim, double strength, std::uint64_t seed);

/// Seeded reference model: N = 3, unit masses, four grid points per particle
/// {0.25, 0.75, 1.25, 1.75}, random Hermitian potentials on all three pairs.
ModelSpec reference_model(std::uint64_t seed = 20240607, double strength = 1.0);

/// Reference sweep regulator.
inline constexpr double kReferenceEps = 0.1;

}  // namespace fewbody
