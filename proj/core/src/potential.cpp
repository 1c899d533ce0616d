#include "fewbody/potential.hpp"

#include <cmath>
#include <numbers>

#include "fewbody/error.hpp"

namespace fewbody {

namespace {

// exp(-x) I_nu(x) for x >= 0.
double scaled_bessel_i(double nu, double x) {
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  if (nu == 0.5) {
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (-std::expm1(-2.0 * x)) / 2.0;
  }
  if (x < 600.0) return std::cyl_bessel_i(nu, x) * std::exp(-x);
  // Large-argument expansion; terms decay fast for the x reached here.
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 6; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (k * 8.0 * x);
    sum += term;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

std::string_view to_string(PotentialFamily family) {
  switch (family) {
    case PotentialFamily::yamaguchi_separable: return "yamaguchi";
    case PotentialFamily::gaussian_local: return "gaussian";
    case PotentialFamily::custom_kernel: return "custom";
  }
  return "custom";
}

PotentialFamily parse_potential_family(std::string_view text) {
  if (text == "yamaguchi") return PotentialFamily::yamaguchi_separable;
  if (text == "gaussian") return PotentialFamily::gaussian_local;
  if (text == "custom") return PotentialFamily::custom_kernel;
  throw ConfigError("unknown two-body potential family '" + std::string(text) +
                    "' (expected yamaguchi|gaussian)");
}

PotentialModel::PotentialModel(PotentialFamily family, double strength,
                               double range, Kernel kernel, std::string name)
    : family_(family),
      strength_(strength),
      range_(range),
      kernel_(std::move(kernel)),
      name_(std::move(name)) {}

PotentialModel PotentialModel::yamaguchi(double strength, double range) {
  if (!(range > 0.0)) throw ModelError("yamaguchi range beta must be positive");
  auto kernel = [strength, range](int ell, double p, double q) {
    if (ell != 0) throw ModelError("yamaguchi potential is defined for l = 0 only");
    const double b2 = range * range;
    return strength / ((p * p + b2) * (q * q + b2));
  };
  return {PotentialFamily::yamaguchi_separable, strength, range, kernel, "yamaguchi"};
}

PotentialModel PotentialModel::gaussian(double strength, double range) {
  if (!(range > 0.0)) throw ModelError("gaussian range must be positive");
  auto kernel = [strength, range](int ell, double p, double q) {
    if (ell < 0) throw ModelError("negative angular momentum");
    const double b2 = range * range;
    const double x = p * q * b2 / 2.0;
    const double d = p - q;
    const double envelope = std::exp(-d * d * b2 / 4.0);
    if (p * q == 0.0) {
      // l = 0 limit of I_{1/2}(x) / sqrt(pq); higher waves vanish.
      if (ell != 0) return 0.0;
      return strength * b2 / 2.0 * std::exp(-(p * p + q * q) * b2 / 4.0) *
             std::sqrt(b2 / std::numbers::pi);
    }
    return strength * (b2 / 2.0) / std::sqrt(p * q) * envelope *
           scaled_bessel_i(ell + 0.5, x);
  };
  return {PotentialFamily::gaussian_local, strength, range, kernel, "gaussian"};
}

PotentialModel PotentialModel::custom(Kernel kernel, std::string name) {
  if (!kernel) throw ModelError("custom potential needs a kernel");
  return {PotentialFamily::custom_kernel, 1.0, 0.0, std::move(kernel), std::move(name)};
}

double PotentialModel::operator()(int ell, double p, double p_prime) const {
  return kernel_(ell, p, p_prime);
}

PotentialModel PotentialModel::with_strength(double strength) const {
  switch (family_) {
    case PotentialFamily::yamaguchi_separable: return yamaguchi(strength, range_);
    case PotentialFamily::gaussian_local: return gaussian(strength, range_);
    case PotentialFamily::custom_kernel: {
      const double scale = strength / strength_;
      Kernel base = kernel_;
      PotentialModel out = custom(
          [base, scale](int ell, double p, double q) { return scale * base(ell, p, q); },
          name_);
      out.strength_ = strength;
      return out;
    }
  }
  return *this;
}

}  // namespace fewbody
