#include <cmath>
#include <numbers>
#include <numeric>

#include <gtest/gtest.h>

#include "fewbody/error.hpp"
#include "fewbody/potential.hpp"
#include "fewbody/quadrature.hpp"
#include "fewbody/two_body.hpp"

namespace fb = fewbody;
using std::numbers::pi;

namespace {

constexpr double kMu = 0.5;

// Closed-form separable amplitude, written out independently of the library.
fb::Complex yamaguchi_t(double lambda, double beta, double mu, double e) {
  const double p0 = std::sqrt(2.0 * mu * e);
  const fb::Complex loop = -pi * mu / (2.0 * beta * std::pow(fb::Complex(beta, -p0), 2));
  const double g = 1.0 / (p0 * p0 + beta * beta);
  return lambda * g * g / (1.0 - lambda * loop);
}

// Principal-value counterpart: the real part of the loop only.
double yamaguchi_k(double lambda, double beta, double mu, double e) {
  const double k2 = 2.0 * mu * e;
  const double loop_pv =
      -pi * mu * (beta * beta - k2) / (2.0 * beta * std::pow(beta * beta + k2, 2));
  const double g = 1.0 / (k2 + beta * beta);
  return lambda * g * g / (1.0 - lambda * loop_pv);
}

fb::TwoBodyChannel yamaguchi_channel(double lambda, double beta, double e) {
  return fb::TwoBodyChannel::make(kMu, 0, fb::PotentialModel::yamaguchi(lambda, beta), e);
}

}  // namespace

TEST(Quadrature, GaussLegendreIntegratesPolynomialsExactly) {
  for (int n : {1, 2, 5, 12, 40}) {
    const auto rule = fb::gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], k);
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      EXPECT_NEAR(sum, exact, 1e-13) << "n=" << n << " k=" << k;
    }
    EXPECT_TRUE(std::is_sorted(rule.nodes.begin(), rule.nodes.end()));
  }
}

TEST(Quadrature, TanMappedRuleOnHalfLine) {
  for (double c : {0.5, 1.0, 3.0}) {
    const auto rule = fb::tan_mapped_rule(64, c);
    double lorentz = 0.0;
    double gauss = 0.0;
    for (int i = 0; i < rule.size(); ++i) {
      const double p = rule.nodes[i];
      lorentz += rule.weights[i] / (p * p + c * c);
      gauss += rule.weights[i] * std::exp(-p * p);
    }
    EXPECT_NEAR(lorentz, pi / (2.0 * c), 1e-13);
    EXPECT_NEAR(gauss, std::sqrt(pi) / 2.0, 1e-10);
    EXPECT_GT(rule.nodes.front(), 0.0);
  }
}

TEST(GaussianPotential, MatchesRadialIntegral) {
  const double lambda = -1.7;
  const double beta = 1.3;
  const auto pot = fb::PotentialModel::gaussian(lambda, beta);
  // (2/pi) int r^2 j_l(p r) j_l(p' r) V(r) dr by composite Simpson.
  auto radial = [&](int ell, double p, double pp) {
    const int n = 4000;
    const double rmax = 10.0 * beta;
    const double h = rmax / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double r = i * h;
      const double f = r * r * std::sph_bessel(ell, p * r) * std::sph_bessel(ell, pp * r) *
                       lambda * std::exp(-r * r / (beta * beta));
      sum += f * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    return 2.0 / pi * sum * h / 3.0;
  };
  for (int ell : {0, 1, 2}) {
    for (auto [p, pp] : {std::pair{0.3, 0.3}, {0.5, 1.7}, {2.2, 1.1}, {4.0, 3.5}}) {
      EXPECT_NEAR(pot(ell, p, pp), radial(ell, p, pp), 1e-9)
          << "l=" << ell << " p=" << p << " p'=" << pp;
    }
  }
}

TEST(PotentialModel, YamaguchiIsSWaveOnly) {
  const auto pot = fb::PotentialModel::yamaguchi(-1.0, 1.0);
  EXPECT_THROW(pot(1, 0.5, 0.5), fb::ModelError);
  EXPECT_DOUBLE_EQ(pot(0, 1.0, 2.0), -1.0 / (2.0 * 5.0));
  EXPECT_EQ(fb::parse_potential_family("gaussian"), fb::PotentialFamily::gaussian_local);
}

TEST(LsOnShell, ZeroPotential) {
  const auto pt = fb::solve_ls_onshell(yamaguchi_channel(0.0, 1.0, 1.0));
  EXPECT_EQ(pt.t_onshell, fb::Complex(0.0));
  EXPECT_EQ(pt.phase_shift, 0.0);
  EXPECT_EQ(fb::solve_kmatrix_onshell(yamaguchi_channel(0.0, 1.0, 1.0)).k_onshell, 0.0);
}

TEST(LsOnShell, YamaguchiMatchesClosedForm) {
  for (double lambda : {-2.5, -0.8, 1.2}) {
    for (double beta : {0.7, 1.0, 1.9}) {
      for (double e : {0.05, 0.6, 4.0, 25.0}) {
        const auto pt = fb::solve_ls_onshell(yamaguchi_channel(lambda, beta, e));
        const fb::Complex exact = yamaguchi_t(lambda, beta, kMu, e);
        EXPECT_LE(std::abs(pt.t_onshell - exact) / std::abs(exact), 1e-6)
            << "lambda=" << lambda << " beta=" << beta << " E=" << e;
        const auto oracle = fb::yamaguchi_oracle({lambda, beta}, kMu, e);
        EXPECT_LE(std::abs(oracle.t_onshell - exact) / std::abs(exact), 1e-13);
      }
    }
  }
}

TEST(LsOnShell, WeakCouplingApproachesBornTermQuadratically) {
  const double e = 0.8;
  const double p0 = std::sqrt(2.0 * kMu * e);
  auto born_error = [&](double lambda) {
    const auto pt = fb::solve_ls_onshell(yamaguchi_channel(lambda, 1.0, e));
    const double born = lambda / std::pow(p0 * p0 + 1.0, 2);
    return std::abs(pt.t_onshell - born);
  };
  const double e1 = born_error(1e-2);
  const double e2 = born_error(5e-3);
  EXPECT_NEAR(e1 / e2, 4.0, 0.05);
}

TEST(KMatrixOnShell, RealAndMatchesPrincipalValue) {
  for (double lambda : {-2.5, 0.9}) {
    for (double e : {0.1, 1.0, 9.0}) {
      const auto ch = yamaguchi_channel(lambda, 1.0, e);
      const auto pt = fb::solve_kmatrix_onshell(ch);
      const double exact = yamaguchi_k(lambda, 1.0, kMu, e);
      EXPECT_LE(std::abs(pt.k_onshell - exact) / std::abs(exact), 1e-6);
      EXPECT_NEAR(std::tan(pt.phase_shift), -pi * ch.onshell_density() * pt.k_onshell,
                  1e-9 * std::max(1.0, std::abs(pt.k_onshell)));
    }
  }
}

TEST(KMatrixOnShell, GaussianRoutesAgree) {
  for (int ell : {0, 1}) {
    const auto ch = fb::TwoBodyChannel::make(kMu, ell, fb::PotentialModel::gaussian(-3.0, 1.0), 1.5);
    const auto ls = fb::solve_ls_onshell(ch);
    const auto kr = fb::solve_kmatrix_onshell(ch);
    EXPECT_LE(std::abs(kr.t_onshell - ls.t_onshell) / std::abs(ls.t_onshell), 1e-6);
    EXPECT_NEAR(std::abs(kr.s_matrix), 1.0, 1e-12);
  }
}

TEST(HeitlerCompose, ZeroK) {
  const auto pt = fb::heitler_compose(0.0, yamaguchi_channel(-1.0, 1.0, 1.0));
  EXPECT_EQ(pt.t_onshell, fb::Complex(0.0));
  EXPECT_EQ(pt.s_matrix, fb::Complex(1.0));
}

TEST(HeitlerCompose, UnitaryForAnyRealK) {
  const auto ch = yamaguchi_channel(-1.0, 1.0, 2.0);
  for (double k : {-1e6, -3.0, -0.01, 1e-9, 0.5, 42.0, 1e8}) {
    EXPECT_NEAR(std::abs(fb::heitler_compose(k, ch).s_matrix), 1.0, 1e-12) << k;
  }
}

TEST(HeitlerCompose, KRouteAgreesWithLsRoute) {
  for (double e : {0.2, 2.0, 20.0}) {
    const auto ch = yamaguchi_channel(-2.5, 1.0, e);
    const auto ls = fb::solve_ls_onshell(ch);
    const auto composed = fb::heitler_compose(fb::solve_kmatrix_onshell(ch).k_onshell, ch);
    EXPECT_LE(std::abs(composed.t_onshell - ls.t_onshell) / std::abs(ls.t_onshell), 1e-6);
  }
}

TEST(YamaguchiOracle, ZeroStrength) {
  EXPECT_EQ(fb::yamaguchi_oracle({0.0, 1.0}, kMu, 1.0).t_onshell, fb::Complex(0.0));
}

TEST(YamaguchiOracle, BoundStateFromBisection) {
  const fb::YamaguchiParams params{-2.5, 1.0};
  // Bracket and bisect the closed-form denominator.
  double lo = 1e-8;
  double hi = 100.0;
  const double f_lo = fb::yamaguchi_bound_denominator(params, kMu, lo);
  ASSERT_LT(f_lo * fb::yamaguchi_bound_denominator(params, kMu, hi), 0.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (fb::yamaguchi_bound_denominator(params, kMu, mid) * f_lo > 0.0) lo = mid; else hi = mid;
  }
  const auto eb = fb::yamaguchi_binding_energy(params, kMu);
  ASSERT_TRUE(eb.has_value());
  EXPECT_NEAR(*eb, 0.5 * (lo + hi), 1e-12);
  // kappa = sqrt(-lambda pi mu / (2 beta)) - beta.
  const double kappa = std::sqrt(2.5 * pi * kMu / 2.0) - 1.0;
  EXPECT_NEAR(*eb, kappa * kappa / (2.0 * kMu), 1e-12);
  EXPECT_FALSE(fb::yamaguchi_binding_energy({-0.5, 1.0}, kMu).has_value());
  EXPECT_FALSE(fb::yamaguchi_binding_energy({0.5, 1.0}, kMu).has_value());
}

TEST(YamaguchiOracle, BornLimitAtHighEnergy) {
  const double lambda = -2.5;
  double previous = 1.0;
  for (double e : {10.0, 100.0, 1000.0, 10000.0}) {
    const double p0 = std::sqrt(2.0 * kMu * e);
    const double born = lambda / std::pow(p0 * p0 + 1.0, 2);
    const double dev = std::abs(fb::yamaguchi_oracle({lambda, 1.0}, kMu, e).t_onshell / born - 1.0);
    EXPECT_LT(dev, previous);
    previous = dev;
  }
  EXPECT_LT(previous, 1e-3);
}

TEST(KleinZemach, ZeroPotentialIsAnError) {
  const auto ch = yamaguchi_channel(0.0, 1.0, 1.0);
  EXPECT_THROW(fb::klein_zemach_ratio(ch, 1.0), fb::ModelError);
}

TEST(KleinZemach, DecaysAboveTheBindingEnergy) {
  const fb::YamaguchiParams params{-2.5, 1.0};
  const double eb = *fb::yamaguchi_binding_energy(params, kMu);
  const auto ch = yamaguchi_channel(params.strength, params.range, eb);
  EXPECT_LT(fb::klein_zemach_ratio(ch, 100.0 * eb), fb::klein_zemach_ratio(ch, eb));

  std::vector<double> x, y;
  for (int i = 0; i <= 6; ++i) {
    const double e = 10.0 * std::pow(10.0, i / 6.0);
    x.push_back(std::log(e));
    y.push_back(std::log(fb::klein_zemach_ratio(ch, e)));
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  EXPECT_LT(sxy / sxx, 0.0);
}

TEST(TwoBodyChannel, RejectsShellOutsideGrid) {
  EXPECT_THROW(yamaguchi_channel(-1.0, 1.0, -1.0), fb::ModelError);
  EXPECT_THROW(fb::TwoBodyChannel::make(0.0, 0, fb::PotentialModel::yamaguchi(-1, 1), 1.0),
               fb::ModelError);
}
