#include "fewbody/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "fewbody/error.hpp"

namespace fewbody {

namespace {

void require_square(const Matrix& a, std::string_view what) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    std::ostringstream msg;
    msg << what << ": expected a non-empty square matrix, got " << a.rows()
        << "x" << a.cols();
    throw DimensionError(msg.str());
  }
}

void require_same_dim(const Matrix& a, const Matrix& b, std::string_view what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch " << a.rows() << "x" << a.cols()
        << " vs " << b.rows() << "x" << b.cols();
    throw DimensionError(msg.str());
  }
}

void require_finite(const Matrix& a, std::string_view what) {
  if (!all_finite(a)) {
    throw NumericError(std::string(what) + ": non-finite entries");
  }
}

}  // namespace

std::string_view to_string(Role role) {
  switch (role) {
    case Role::V: return "V";
    case Role::T: return "T";
    case Role::K: return "K";
    case Role::G0: return "G0";
    case Role::G1: return "G1";
    case Role::G2: return "G2";
    case Role::H0: return "H0";
    case Role::PairT: return "PairT";
    case Role::PairK: return "PairK";
    case Role::Other: return "Other";
  }
  return "Other";
}

std::string_view to_string(NormKind kind) {
  return kind == NormKind::spectral ? "spectral" : "frobenius";
}

NormKind parse_norm_kind(std::string_view text) {
  if (text == "frobenius") return NormKind::frobenius;
  if (text == "spectral") return NormKind::spectral;
  throw ConfigError("unknown norm kind '" + std::string(text) +
                    "' (expected frobenius|spectral)");
}

OperatorMatrix::OperatorMatrix(Matrix entries, Role role)
    : entries_(std::move(entries)), role_(role) {
  require_square(entries_, "OperatorMatrix");
  require_finite(entries_, "OperatorMatrix");
  switch (role_) {
    case Role::H0: {
      const Matrix off = entries_ - Matrix(entries_.diagonal().asDiagonal());
      if (off.norm() != 0.0 || entries_.diagonal().imag().norm() != 0.0) {
        throw ModelError("H0 operator must be real and diagonal");
      }
      break;
    }
    case Role::G1:
      if (!is_anti_hermitian(entries_)) {
        throw NumericError("G1 operator is not anti-Hermitian within tolerance");
      }
      break;
    case Role::G2:
    case Role::K:
      if (!is_hermitian(entries_)) {
        throw NumericError(std::string(to_string(role_)) +
                           " operator is not Hermitian within tolerance");
      }
      break;
    default:
      break;
  }
}

HermitianParts hermitian_split(const Matrix& a) {
  require_square(a, "hermitian_split");
  const Matrix adj = a.adjoint();
  return {0.5 * (a - adj), 0.5 * (a + adj)};
}

TaggedHermitianParts hermitian_split(const OperatorMatrix& a) {
  auto parts = hermitian_split(a.matrix());
  const bool green = a.role() == Role::G0;
  return {OperatorMatrix(std::move(parts.anti_hermitian),
                         green ? Role::G1 : Role::Other),
          OperatorMatrix(std::move(parts.hermitian),
                         green ? Role::G2 : Role::Other)};
}

double operator_norm(const Matrix& a, NormKind kind) {
  require_finite(a, "operator_norm");
  if (a.size() == 0) return 0.0;
  if (kind == NormKind::frobenius) return a.norm();
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

double relative_difference(const Matrix& a, const Matrix& reference,
                           NormKind kind) {
  require_same_dim(a, reference, "relative_difference");
  return operator_norm(a - reference, kind) /
         std::max(operator_norm(reference, kind), tol::floor_norm);
}

bool is_anti_hermitian(const Matrix& a, double tolerance) {
  if (a.rows() != a.cols()) return false;
  return (a + a.adjoint()).norm() <= tolerance * a.norm();
}

bool is_hermitian(const Matrix& a, double tolerance) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).norm() <= tolerance * a.norm();
}

bool all_finite(const Matrix& a) { return a.allFinite(); }

Matrix solve_linear(const Matrix& lhs, const Matrix& rhs) {
  require_square(lhs, "solve_linear");
  if (rhs.rows() != lhs.rows()) {
    throw DimensionError("solve_linear: right-hand side has wrong row count");
  }
  require_finite(lhs, "solve_linear");
  require_finite(rhs, "solve_linear");

  Eigen::PartialPivLU<Matrix> lu(lhs);
  const double rcond = lu.rcond();
  const double cond = rcond > 0.0 ? 1.0 / rcond
                                  : std::numeric_limits<double>::infinity();
  if (!(cond <= tol::cond_max)) {
    std::ostringstream msg;
    msg << "linear system is singular or ill-conditioned (condition estimate "
        << cond << ", limit " << tol::cond_max << ")";
    throw SolverError(msg.str(), cond);
  }

  Matrix x = lu.solve(rhs);
  const double rhs_norm = rhs.norm();
  double residual = (lhs * x - rhs).norm();
  for (int refine = 0; refine < 2 && residual > tol::solve * rhs_norm; ++refine) {
    x += lu.solve(rhs - lhs * x);
    residual = (lhs * x - rhs).norm();
  }
  if (!(residual <= tol::solve * rhs_norm) || !x.allFinite()) {
    std::ostringstream msg;
    msg << "linear solve residual " << residual << " exceeds "
        << tol::solve << " * ||rhs|| (condition estimate " << cond << ")";
    throw SolverError(msg.str(), cond);
  }
  return x;
}

Matrix solve_resolvent_system(const Matrix& m, const Matrix& rhs) {
  require_square(m, "solve_resolvent_system");
  const Matrix lhs = Matrix::Identity(m.rows(), m.cols()) - m;
  return solve_linear(lhs, rhs);
}

double unitarity_defect(const Matrix& t, const Matrix& g1) {
  require_square(t, "unitarity_defect");
  require_same_dim(t, g1, "unitarity_defect");
  const Matrix t_adj = t.adjoint();
  const Matrix defect = t - t_adj - 2.0 * t_adj * g1 * t;
  return defect.norm() / std::max(t.norm(), tol::floor_norm);
}

}  // namespace fewbody
