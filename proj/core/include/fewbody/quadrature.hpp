#pragma once

#include <vector>

namespace fewbody {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const noexcept { return static_cast<int>(nodes.size()); }
};

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
QuadratureRule gauss_legendre(int n);

/// Gauss-Legendre mapped to (0, inf) by p = scale * tan(pi (x + 1) / 4).
/// Nodes are strictly increasing and positive; weights include the Jacobian.
QuadratureRule tan_mapped_rule(int n, double scale);

}  // namespace fewbody
