#include "fewbody/two_body.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fewbody/error.hpp"

namespace fewbody {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTolReal = 1e-10;

std::vector<double> nystrom_momenta(const TwoBodyChannel& ch) {
  std::vector<double> k = ch.quad.nodes;
  k.push_back(ch.onshell_momentum());
  return k;
}

// Weighted propagator row of the subtracted Nystrom scheme. With
// include_pole the on-shell column also carries the -i pi rho residue.
Vector nystrom_propagator(const TwoBodyChannel& ch, bool include_pole) {
  const double mu = ch.reduced_mass;
  const double p0 = ch.onshell_momentum();
  const double p0sq = p0 * p0;
  const int n = ch.quad.size();
  Vector d(n + 1);
  double subtraction = 0.0;
  for (int j = 0; j < n; ++j) {
    const double q = ch.quad.nodes[j];
    const double gap = p0sq - q * q;
    if (gap == 0.0) {
      throw NumericError("on-shell momentum coincides with a quadrature node");
    }
    d(j) = 2.0 * mu * ch.quad.weights[j] * q * q / gap;
    subtraction += ch.quad.weights[j] / gap;
  }
  d(n) = Complex(-2.0 * mu * p0sq * subtraction,
                 include_pole ? -kPi * mu * p0 : 0.0);
  return d;
}

Matrix nystrom_solve(const TwoBodyChannel& ch, bool include_pole, bool all_columns) {
  ch.validate();
  const Matrix v = nystrom_potential(ch);
  const Vector d = nystrom_propagator(ch, include_pole);
  const Matrix kernel = v * d.asDiagonal();
  if (all_columns) return solve_resolvent_system(kernel, v);
  return solve_resolvent_system(kernel, v.col(v.cols() - 1));
}

OnShellPoint from_t(Complex t, const TwoBodyChannel& ch) {
  const double rho = ch.onshell_density();
  const Complex i_pi_rho(0.0, kPi * rho);
  OnShellPoint out;
  out.t_onshell = t;
  out.k_onshell = (t / (1.0 - i_pi_rho * t)).real();
  out.s_matrix = 1.0 - 2.0 * i_pi_rho * t;
  out.phase_shift = 0.5 * std::arg(out.s_matrix);
  return out;
}

}  // namespace

TwoBodyChannel TwoBodyChannel::make(double reduced_mass, int angular_momentum,
                                    PotentialModel potential, double onshell_energy,
                                    int nodes, double map_scale) {
  if (map_scale <= 0.0) {
    map_scale = potential.range() > 0.0 ? potential.range() : 1.0;
  }
  TwoBodyChannel ch{reduced_mass, angular_momentum, std::move(potential),
                    tan_mapped_rule(nodes, map_scale), onshell_energy};
  ch.validate();
  return ch;
}

double TwoBodyChannel::onshell_momentum() const {
  return std::sqrt(2.0 * reduced_mass * onshell_energy);
}

TwoBodyChannel TwoBodyChannel::at_energy(double energy) const {
  TwoBodyChannel ch = *this;
  ch.onshell_energy = energy;
  ch.validate();
  return ch;
}

void TwoBodyChannel::validate() const {
  if (!(reduced_mass > 0.0)) throw ModelError("reduced mass must be positive");
  if (angular_momentum < 0) throw ModelError("angular momentum must be >= 0");
  if (!(onshell_energy > 0.0) || !std::isfinite(onshell_energy)) {
    throw ModelError("on-shell energy must be positive and finite");
  }
  if (quad.nodes.empty() || quad.nodes.size() != quad.weights.size()) {
    throw ModelError("quadrature rule is empty or malformed");
  }
  for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
    if (!(quad.nodes[i] > 0.0) || !(quad.weights[i] > 0.0) ||
        (i > 0 && !(quad.nodes[i] > quad.nodes[i - 1]))) {
      throw ModelError("quadrature nodes must be positive and increasing, weights positive");
    }
  }
  const double p0 = onshell_momentum();
  if (!(p0 > quad.nodes.front() && p0 < quad.nodes.back())) {
    std::ostringstream msg;
    msg << "on-shell momentum " << p0 << " outside grid coverage ["
        << quad.nodes.front() << ", " << quad.nodes.back() << "]";
    throw ModelError(msg.str());
  }
}

Matrix nystrom_potential(const TwoBodyChannel& ch) {
  const auto k = nystrom_momenta(ch);
  const Index n = static_cast<Index>(k.size());
  Matrix v(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      v(i, j) = ch.potential(ch.angular_momentum, k[i], k[j]);
    }
  }
  return v;
}

Matrix nystrom_t_matrix(const TwoBodyChannel& ch) {
  return nystrom_solve(ch, /*include_pole=*/true, /*all_columns=*/true);
}

OnShellPoint solve_ls_onshell(const TwoBodyChannel& ch) {
  const Matrix half_shell = nystrom_solve(ch, true, false);
  return from_t(half_shell(half_shell.rows() - 1, 0), ch);
}

OnShellPoint solve_kmatrix_onshell(const TwoBodyChannel& ch) {
  const Matrix half_shell = nystrom_solve(ch, false, false);
  const double scale = std::max(1.0, half_shell.cwiseAbs().maxCoeff());
  if (half_shell.imag().cwiseAbs().maxCoeff() > kTolReal * scale) {
    throw NumericError("k-matrix half-shell row is not real: quadrature failure");
  }
  return heitler_compose(half_shell(half_shell.rows() - 1, 0).real(), ch);
}

OnShellPoint heitler_compose(double k_onshell, const TwoBodyChannel& ch) {
  if (!std::isfinite(k_onshell)) throw NumericError("non-finite k-matrix");
  const double x = kPi * ch.onshell_density() * k_onshell;
  OnShellPoint out;
  out.k_onshell = k_onshell;
  out.t_onshell = k_onshell / Complex(1.0, x);
  out.s_matrix = Complex(1.0, -x) / Complex(1.0, x);
  out.phase_shift = -std::atan(x);
  return out;
}

Complex yamaguchi_loop(const YamaguchiParams& params, double reduced_mass,
                       Complex momentum) {
  const Complex denom = params.range - Complex(0.0, 1.0) * momentum;
  return -kPi * reduced_mass / (2.0 * params.range * denom * denom);
}

OnShellPoint yamaguchi_oracle(const YamaguchiParams& params, double reduced_mass,
                              double energy) {
  if (!(params.range > 0.0)) throw ModelError("yamaguchi range must be positive");
  if (!(energy > 0.0)) throw ModelError("yamaguchi oracle needs E > 0");
  const double p0 = std::sqrt(2.0 * reduced_mass * energy);
  const double g = 1.0 / (p0 * p0 + params.range * params.range);
  const Complex loop = yamaguchi_loop(params, reduced_mass, Complex(p0, 0.0));
  const Complex denom = 1.0 - params.strength * loop;
  if (std::abs(denom) < 1e-14) {
    throw NumericError("yamaguchi denominator vanishes (bound-state pole)");
  }
  OnShellPoint out;
  out.t_onshell = params.strength * g * g / denom;
  out.k_onshell = params.strength * g * g / (1.0 - params.strength * loop.real());
  const double rho = reduced_mass * p0;
  out.s_matrix = 1.0 - 2.0 * Complex(0.0, kPi * rho) * out.t_onshell;
  out.phase_shift = 0.5 * std::arg(out.s_matrix);
  return out;
}

double yamaguchi_bound_denominator(const YamaguchiParams& params,
                                   double reduced_mass, double binding_energy) {
  const double kappa = std::sqrt(2.0 * reduced_mass * binding_energy);
  return (1.0 - params.strength *
                    yamaguchi_loop(params, reduced_mass, Complex(0.0, kappa)))
      .real();
}

std::optional<double> yamaguchi_binding_energy(const YamaguchiParams& params,
                                               double reduced_mass) {
  const double beta = params.range;
  const double x = -params.strength * kPi * reduced_mass / (2.0 * beta);
  if (x <= beta * beta) return std::nullopt;
  const double kappa = std::sqrt(x) - beta;
  return kappa * kappa / (2.0 * reduced_mass);
}

double klein_zemach_ratio(const TwoBodyChannel& ch, double energy, NormKind kind) {
  const TwoBodyChannel at = ch.at_energy(energy);
  const Matrix t = nystrom_t_matrix(at);
  const Matrix v = nystrom_potential(at);
  const double p0 = at.onshell_momentum();

  std::vector<Index> keep;
  for (int i = 0; i < at.quad.size(); ++i) {
    const double q = at.quad.nodes[i];
    if (q >= 0.5 * p0 && q <= 2.0 * p0) keep.push_back(i);
  }
  keep.push_back(t.rows() - 1);

  const Index n = static_cast<Index>(keep.size());
  Matrix dt(n, n);
  Matrix vs(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      dt(i, j) = t(keep[i], keep[j]) - v(keep[i], keep[j]);
      vs(i, j) = v(keep[i], keep[j]);
    }
  }
  const double v_norm = operator_norm(vs, kind);
  if (v_norm == 0.0) {
    throw ModelError("Klein-Zemach ratio undefined: potential vanishes near the shell");
  }
  return operator_norm(dt, kind) / v_norm;
}

}  // namespace fewbody
