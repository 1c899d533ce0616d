#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace fewbody {

enum class PotentialFamily { yamaguchi_separable, gaussian_local, custom_kernel };

std::string_view to_string(PotentialFamily family);
PotentialFamily parse_potential_family(std::string_view text);

/// Partial-wave kernel v_l(p, p') of a two-body potential.
///
/// Normalization matches the integral measure used throughout the two-body
/// solvers, t = v + int_0^inf dq q^2 v(p, q) t(q, p') / (E - q^2/2mu + i0):
///
///  * yamaguchi_separable (l = 0 only): v(p, p') = lambda g(p) g(p'),
///    g(p) = 1 / (p^2 + beta^2).
///  * gaussian_local: V(r) = lambda exp(-r^2 / beta^2), projected as
///    v_l(p, p') = (2/pi) int r^2 dr j_l(p r) V(r) j_l(p' r).
///  * custom_kernel: any symmetric callable.
class PotentialModel {
 public:
  using Kernel = std::function<double(int ell, double p, double p_prime)>;

  static PotentialModel yamaguchi(double strength, double range);
  static PotentialModel gaussian(double strength, double range);
  static PotentialModel custom(Kernel kernel, std::string name = "custom");

  double operator()(int ell, double p, double p_prime) const;

  PotentialFamily family() const noexcept { return family_; }
  double strength() const noexcept { return strength_; }
  double range() const noexcept { return range_; }
  const std::string& name() const noexcept { return name_; }

  /// Same family and range, strength replaced. Custom kernels are scaled.
  PotentialModel with_strength(double strength) const;

 private:
  PotentialModel(PotentialFamily family, double strength, double range,
                 Kernel kernel, std::string name);

  PotentialFamily family_;
  double strength_;
  double range_;
  Kernel kernel_;
  std::string name_;
};

}  // namespace fewbody
