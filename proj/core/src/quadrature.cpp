#include "fewbody/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "fewbody/error.hpp"

namespace fewbody {

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw ModelError("quadrature needs at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureRule tan_mapped_rule(int n, double scale) {
  if (!(scale > 0.0)) throw ModelError("quadrature map scale must be positive");
  QuadratureRule base = gauss_legendre(n);
  constexpr double quarter_pi = std::numbers::pi / 4.0;
  for (int i = 0; i < n; ++i) {
    const double angle = quarter_pi * (base.nodes[i] + 1.0);
    const double c = std::cos(angle);
    base.weights[i] *= scale * quarter_pi / (c * c);
    base.nodes[i] = scale * std::tan(angle);
  }
  return base;
}

}  // namespace fewbody
