#pragma once

#include <string>
#include <vector>

#include "fewbody/config.hpp"
#include "fewbody/report.hpp"

namespace fewbody {

/// One invariant evaluated on a model: passes when value <= threshold.
struct ValidationCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

/// Every exact identity of the library evaluated at one energy: Heitler and
/// Faddeev equivalence with the LS solve, K decomposition, pair-K
/// reconstruction, asymptotic-system equivalence for both pair modes, exact
/// unitarity, pair embedding consistency, Green's function splitting and the
/// finite-sum truncation bound.
std::vector<ValidationCheck> validate_point(const ModelSpec& spec, const ComplexEnergy& z,
                                            NormKind kind = NormKind::frobenius);

struct RunOutcome {
  SweepReport report;
  int exit_code = 0;  // 0 iff every row succeeded (and every check passed)
};

/// Executes a configuration. Deterministic: identical config gives identical
/// reports regardless of the thread count.
RunOutcome run(const RunConfig& config);

/// Column names of the few-body / sweep report for a model.
std::vector<std::string> sweep_columns(const ModelSpec& spec);

}  // namespace fewbody
