#pragma once

// Exact and high-energy asymptotic N-body scattering equations on a finite
// model. Notation follows the operator identities
//
//   T = V + V G0 T                                   (Lippmann-Schwinger)
//   T = sum_a T^a,  T^a = T_a + T_a G0 sum_{b!=a} T^b (Faddeev)
//   K = V + V G2 K,  T = K + K G1 T                  (Heitler)
//   K ~ K_imp = sum_a K_a                            (impulse approximation)
//   T^a = T_a + T_a G1 sum_{b!=a} T^b                (asymptotic system)
//   T ~ sum_a T_a (1 + G1 sum_{b!=a} T_b)            (finite sum)
//
// where T_a, K_a are the pair operators of a single pair potential v_a.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fewbody/model.hpp"
#include "fewbody/operator.hpp"

namespace fewbody {

enum class PairMode {
  heitler_pair,  // T_a = (1 - K_a G1)^-1 K_a with K_a = v_a + v_a G2 K_a
  g1_approx,     // T_a = v_a + v_a G1 T_a
};
std::string_view to_string(PairMode mode);
PairMode parse_pair_mode(std::string_view text);

enum class KMode { direct, faddeev_decomposed };

enum class SolutionMethod { exact_faddeev, exact_heitler, asym_system, finite_sum, ls_direct };
std::string_view to_string(SolutionMethod method);

struct FaddeevSolution {
  std::map<PairIndex, FewBodyOperator> components;
  FewBodyOperator total;  // exact entrywise sum of components
  SolutionMethod method;
  ComplexEnergy energy;
};

/// Result of the two-stage Heitler solve.
struct HeitlerSolution {
  FewBodyOperator k;  // Hermitian
  FewBodyOperator t;
  /// The K^a components when K was obtained from the decomposed system.
  std::optional<FaddeevSolution> k_components;
};

/// Every full-space quantity needed at one energy, built once.
struct EnergyContext {
  ComplexEnergy energy;
  std::vector<PairIndex> pairs;
  Matrix v;   // sum of embedded pair potentials
  Matrix g0;
  Matrix g1;
  Matrix g2;
  std::map<PairIndex, Matrix> v_pair;  // embedded v_a
  std::map<PairIndex, Matrix> t_pair;  // exact T_a = v_a + v_a G0 T_a
  std::map<PairIndex, Matrix> k_pair;  // K_a = v_a + v_a G2 K_a

  Index dim() const noexcept { return v.rows(); }
};

EnergyContext make_context(const ModelSpec& spec, const ComplexEnergy& z);

/// T = (1 - V G0)^-1 V.
FewBodyOperator solve_ls_exact(const ModelSpec& spec, const ComplexEnergy& z);
Matrix solve_ls_exact(const EnergyContext& ctx);

/// Solves X^a = X_a + X_a G sum_{b!=a} X^b as one stacked linear system of
/// dimension (pair count) * dim.
std::map<PairIndex, Matrix> solve_coupled_components(
    const std::map<PairIndex, Matrix>& pair_ops, const Matrix& green);

FaddeevSolution solve_faddeev_system(const ModelSpec& spec, const ComplexEnergy& z);
FaddeevSolution solve_faddeev_system(const EnergyContext& ctx);

HeitlerSolution solve_heitler_exact(const ModelSpec& spec, const ComplexEnergy& z,
                                    KMode k_mode = KMode::direct);
HeitlerSolution solve_heitler_exact(const EnergyContext& ctx, KMode k_mode);

/// K_imp = sum_a K_a.
FewBodyOperator kmatrix_impulse(const ModelSpec& spec, const ComplexEnergy& z);
Matrix kmatrix_impulse(const EnergyContext& ctx);

/// Pair operators T_a feeding the asymptotic system.
std::map<PairIndex, Matrix> asym_pair_t(const EnergyContext& ctx, PairMode mode);

/// (1 + T_a G1)^-1 T_a; recovers K_a when T_a solves T_a = K_a + K_a G1 T_a.
Matrix reconstruct_pair_k(const Matrix& t_pair, const Matrix& g1);

FaddeevSolution solve_asym_faddeev(const ModelSpec& spec, const ComplexEnergy& z,
                                   PairMode mode = PairMode::heitler_pair);
FaddeevSolution solve_asym_faddeev(const EnergyContext& ctx, PairMode mode);

/// Direct solve of T = K + K G1 T with the K implied by the pair mode
/// (K_imp for heitler_pair, V for g1_approx). Reference for solve_asym_faddeev.
Matrix solve_asym_heitler_direct(const EnergyContext& ctx, PairMode mode);

/// sum_a T_a (1 + G1 sum_{b!=a} T_b) by matrix products only.
FewBodyOperator finite_sum_T(const ModelSpec& spec, const ComplexEnergy& z,
                             PairMode mode = PairMode::heitler_pair);
Matrix finite_sum_T(const std::map<PairIndex, Matrix>& pair_t, const Matrix& g1);

struct PairNorms {
  PairIndex alpha;
  double t_g0 = 0.0;  // ||T_a G0||, exact pair T
  double t_g1 = 0.0;  // ||T_a G1||, asymptotic pair T
  double k_g2 = 0.0;  // ||K_a G2||
  double v_g0 = 0.0;
  double v_g1 = 0.0;
  double v_g2 = 0.0;
};

struct CoupleNorms {
  PairIndex alpha;
  PairIndex beta;
  double t_g1_t_g1 = 0.0;  // ||T_a G1 T_b G1||
  double k_g2_k_g2 = 0.0;  // ||K_a G2 K_b G2||
};

struct KernelDiagnostics {
  NormKind kind = NormKind::frobenius;
  ComplexEnergy energy{0.0, 1.0};
  std::vector<PairNorms> pairs;
  std::vector<CoupleNorms> couples;  // ordered, a != b

  double max_t_g0() const;
  double max_t_g1() const;
  double max_k_g2() const;
  double max_v_g0() const;
  double max_v_g1() const;
  double max_v_g2() const;
  double max_t_g1_t_g1() const;
  double max_k_g2_k_g2() const;
  /// max over pairs of | ||T_a G0|| - ||v_a G0|| | / ||v_a G0||.
  double max_t_g0_deviation() const;
};

KernelDiagnostics kernel_diagnostics(const ModelSpec& spec, const ComplexEnergy& z,
                                     NormKind kind = NormKind::frobenius,
                                     PairMode mode = PairMode::heitler_pair);
KernelDiagnostics kernel_diagnostics(const EnergyContext& ctx, NormKind kind,
                                     const std::map<PairIndex, Matrix>& pair_t);

/// Conservative estimate of ||finite_sum - asym_system||:
///   (#ordered couples) * max ||T_a G1 T_b G1|| * max_a (1 + ||G1|| ||sum_{b!=a} T_b||)
///   * max ||T_a||.
double truncation_bound(const std::map<PairIndex, Matrix>& pair_t, const Matrix& g1,
                        NormKind kind);

struct SweepPoint {
  double e0 = 0.0;
  double eps = 0.0;
  bool ok = false;
  std::string error_code;
  std::string error;

  double kimp_rel_err = 0.0;        // ||K_imp - K|| / ||K||
  double asym_rel_err = 0.0;        // ||T_asym - T_LS|| / ||T_LS||
  double finite_sum_rel_err = 0.0;  // ||T_fs - T_LS|| / ||T_LS||
  double finite_sum_diag_rel_err = 0.0;  // diagonal (on-shell-like) entries only
  double defect_ls = 0.0;
  double defect_asym = 0.0;
  double defect_finite_sum = 0.0;
  double truncation_gap = 0.0;    // ||T_fs - T_asym||
  double truncation_bound = 0.0;
  double defect_bound = 0.0;      // 2 gap (1 + 2 ||G1|| ||T_asym|| + ||G1|| gap) / ||T_fs||
  double g1_norm = 0.0;
  KernelDiagnostics diagnostics;
};

struct SweepOptions {
  double eps = kReferenceEps;
  PairMode pair_mode = PairMode::heitler_pair;
  NormKind norm = NormKind::frobenius;
  int threads = 1;
};

/// One SweepPoint per energy (ascending). Solver failures are recorded in the
/// point (ok = false, error text naming the energy) rather than thrown.
std::vector<SweepPoint> asym_error_sweep(const ModelSpec& spec,
                                         const std::vector<double>& energies,
                                         const SweepOptions& options);

/// Evaluates one sweep point; throws on solver failure.
SweepPoint evaluate_sweep_point(const ModelSpec& spec, double e0,
                                const SweepOptions& options);

/// Least-squares slope of log(y) against log(x); NaN if fewer than two
/// positive pairs.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// `count` energies geometrically spaced from start to stop inclusive.
std::vector<double> geometric_energies(double start, double stop, int count);

}  // namespace fewbody
