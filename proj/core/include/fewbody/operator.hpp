#pragma once

// Dense complex operator algebra shared by every solver in the library.

#include <complex>
#include <string_view>

#include <Eigen/Dense>

namespace fewbody {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Tolerances used across the library. All relative unless noted.
namespace tol {
inline constexpr double herm = 1e-12;
inline constexpr double solve = 1e-12;
inline constexpr double cond_max = 1e12;
inline constexpr double floor_norm = 1e-300;  // absolute
}  // namespace tol

enum class Role { V, T, K, G0, G1, G2, H0, PairT, PairK, Other };

std::string_view to_string(Role role);

enum class NormKind { frobenius, spectral };

std::string_view to_string(NormKind kind);
NormKind parse_norm_kind(std::string_view text);

/// Square dense complex matrix tagged with the role it plays.
///
/// Construction validates the structural invariant implied by the tag:
/// H0 is real diagonal, G1 is anti-Hermitian, G2 and K are Hermitian (each
/// within tol::herm relative Frobenius). Entries must be finite.
class OperatorMatrix {
 public:
  explicit OperatorMatrix(Matrix entries, Role role = Role::Other);

  const Matrix& matrix() const noexcept { return entries_; }
  Role role() const noexcept { return role_; }
  Index dim() const noexcept { return entries_.rows(); }

 private:
  Matrix entries_;
  Role role_;
};

struct HermitianParts {
  Matrix anti_hermitian;  // (A - A^H) / 2
  Matrix hermitian;       // (A + A^H) / 2
};

/// Splits A into its anti-Hermitian and Hermitian parts.
HermitianParts hermitian_split(const Matrix& a);

struct TaggedHermitianParts {
  OperatorMatrix anti_hermitian;
  OperatorMatrix hermitian;
};

/// Role-aware overload: the parts of a G0 are tagged G1 and G2.
TaggedHermitianParts hermitian_split(const OperatorMatrix& a);

double operator_norm(const Matrix& a, NormKind kind = NormKind::frobenius);

/// ||a - reference|| / max(||reference||, tol::floor_norm).
double relative_difference(const Matrix& a, const Matrix& reference,
                           NormKind kind = NormKind::frobenius);

/// ||A + A^H||_F <= tolerance * ||A||_F (a zero matrix passes).
bool is_anti_hermitian(const Matrix& a, double tolerance = tol::herm);
/// ||A - A^H||_F <= tolerance * ||A||_F (a zero matrix passes).
bool is_hermitian(const Matrix& a, double tolerance = tol::herm);

bool all_finite(const Matrix& a);

/// Solves lhs * X = rhs by LU with partial pivoting.
///
/// Throws SolverError when the reciprocal condition estimate falls below
/// 1/tol::cond_max or when the residual ||lhs X - rhs||_F exceeds
/// tol::solve * ||rhs||_F after two rounds of iterative refinement.
Matrix solve_linear(const Matrix& lhs, const Matrix& rhs);

/// Solves (1 - m) X = rhs.
Matrix solve_resolvent_system(const Matrix& m, const Matrix& rhs);

/// ||T - T^H - 2 T^H G1 T||_F / max(||T||_F, tol::floor_norm).
///
/// Zero for any T solving T = K + K G1 T with Hermitian K and anti-Hermitian
/// G1, including the exact Lippmann-Schwinger T.
double unitarity_defect(const Matrix& t, const Matrix& g1);

}  // namespace fewbody
