#pragma once

// Continuum partial-wave two-body scattering on the real energy axis.
//
// Conventions (hbar = 1): E = p^2 / (2 mu), on-shell momentum p0 = sqrt(2 mu E),
// on-shell density rho = mu p0. With these,
//
//   t = v + v g0(E + i0) t,        g0 = PV - i pi rho delta(shell)
//   k = v + v g2 k,                g2 = PV
//   t = k / (1 + i pi rho k),      S = 1 - 2 i pi rho t = exp(2 i delta),
//
// so tan(delta) = -pi rho k.

#include <optional>
#include <vector>

#include "fewbody/operator.hpp"
#include "fewbody/potential.hpp"
#include "fewbody/quadrature.hpp"

namespace fewbody {

struct TwoBodyChannel {
  double reduced_mass;
  int angular_momentum;
  PotentialModel potential;
  QuadratureRule quad;  // nodes on (0, inf)
  double onshell_energy;

  static constexpr int kDefaultNodes = 96;

  /// Channel with a tan-mapped Gauss-Legendre grid. map_scale <= 0 selects
  /// the potential range (or 1 for custom kernels).
  static TwoBodyChannel make(double reduced_mass, int angular_momentum,
                             PotentialModel potential, double onshell_energy,
                             int nodes = kDefaultNodes, double map_scale = 0.0);

  double onshell_momentum() const;
  double onshell_density() const { return reduced_mass * onshell_momentum(); }
  TwoBodyChannel at_energy(double energy) const;

  /// Throws ModelError on a bad channel description.
  void validate() const;
};

struct OnShellPoint {
  Complex t_onshell;
  double k_onshell = 0.0;
  double phase_shift = 0.0;  // radians, in (-pi/2, pi/2]
  Complex s_matrix{1.0, 0.0};
};

/// Nystrom solution of t = v + v g0(E + i0) t with on-shell pole subtraction.
OnShellPoint solve_ls_onshell(const TwoBodyChannel& ch);

/// Nystrom solution of k = v + v g2 k with the principal-value Green's function.
/// Throws NumericError if the half-shell k row is not real within 1e-10.
OnShellPoint solve_kmatrix_onshell(const TwoBodyChannel& ch);

/// t = k / (1 + i pi rho k), S = 1 - 2 i pi rho t; |S| = 1 for every real k.
OnShellPoint heitler_compose(double k_onshell, const TwoBodyChannel& ch);

/// Full Nystrom t-matrix on (nodes..., p0) at energy E + i0 (on-shell point last).
Matrix nystrom_t_matrix(const TwoBodyChannel& ch);

/// Potential sampled on (nodes..., p0).
Matrix nystrom_potential(const TwoBodyChannel& ch);

struct YamaguchiParams {
  double strength;  // lambda
  double range;     // beta
};

/// Closed-form loop integral I(z) = int_0^inf dq q^2 g(q)^2 / (z - q^2/2mu)
/// for complex momentum k = sqrt(2 mu z) with Im k >= 0:
///   I = -pi mu / (2 beta (beta - i k)^2).
Complex yamaguchi_loop(const YamaguchiParams& params, double reduced_mass,
                       Complex momentum);

/// Closed-form on-shell amplitude t = lambda g(p0)^2 / (1 - lambda I(E + i0)).
/// Throws NumericError if the denominator vanishes (bound-state pole).
OnShellPoint yamaguchi_oracle(const YamaguchiParams& params, double reduced_mass,
                              double energy);

/// 1 - lambda I(-E_B) for a trial binding energy E_B > 0; zero at a bound state.
double yamaguchi_bound_denominator(const YamaguchiParams& params,
                                   double reduced_mass, double binding_energy);

/// Binding energy of the single s-wave bound state, if the potential binds.
std::optional<double> yamaguchi_binding_energy(const YamaguchiParams& params,
                                               double reduced_mass);

/// r(E) = ||t(E) - v|| / ||v|| on the on-shell neighbourhood: quadrature nodes
/// in [p0/2, 2 p0] plus p0 itself. Throws ModelError if ||v|| = 0 there.
double klein_zemach_ratio(const TwoBodyChannel& ch, double energy,
                          NormKind kind = NormKind::frobenius);

}  // namespace fewbody
