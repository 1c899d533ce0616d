#include <cmath>

#include <gtest/gtest.h>

#include "fewbody/error.hpp"
#include "fewbody/few_body.hpp"

namespace fb = fewbody;

namespace {

constexpr fb::PairIndex k12{0, 1};
constexpr fb::PairIndex k13{0, 2};
constexpr fb::PairIndex k23{1, 2};

fb::ModelSpec zero_model() {
  fb::ModelSpec spec = fb::reference_model();
  for (auto& [alpha, v] : spec.pair_potentials) v.setZero();
  return spec;
}

fb::ModelSpec single_pair_model(std::uint64_t seed = 5) {
  fb::ModelSpec spec = fb::reference_model(seed);
  spec.pair_potentials[k13].setZero();
  spec.pair_potentials[k23].setZero();
  return spec;
}

double rel(const fb::Matrix& a, const fb::Matrix& b) { return (a - b).norm() / b.norm(); }

// e0 in units of the reference pair spectral radius (3.0625).
fb::ComplexEnergy at_scale(double factor, double eps = fb::kReferenceEps) {
  return {factor * 3.0625, eps};
}

}  // namespace

TEST(LsExact, ZeroPotential) {
  const auto t = fb::solve_ls_exact(zero_model(), at_scale(2.0));
  EXPECT_EQ(t.matrix().cwiseAbs().maxCoeff(), 0.0);
}

TEST(LsExact, ScalarGeometricSeries) {
  fb::ModelSpec spec;
  spec.masses = {1.0, 1.0, 1.0};
  spec.grids = {{0.0}, {0.0}, {0.0}};
  spec.pair_potentials[k12] = fb::Matrix::Constant(1, 1, 0.5);
  // z = 2 + i 1e-12: T = 0.5 / (1 - 0.5 / z) -> 2/3 as eps -> 0.
  const auto t = fb::solve_ls_exact(spec, fb::ComplexEnergy(2.0, 1e-12));
  EXPECT_NEAR(std::abs(t.matrix()(0, 0) - 2.0 / 3.0), 0.0, 1e-11);
}

TEST(LsExact, SelfResidual) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const auto spec = fb::reference_model(seed);
    for (double f : {0.1, 1.0, 5.0}) {
      const auto z = at_scale(f);
      const fb::Matrix t = fb::solve_ls_exact(spec, z).matrix();
      const fb::Matrix v = fb::build_v(spec).matrix();
      const fb::Matrix g0 = fb::green_functions(spec, z).g0.matrix();
      EXPECT_LE((t - v - v * g0 * t).norm(), 1e-10 * t.norm());
    }
  }
}

TEST(Faddeev, ZeroPotentialComponentsVanish) {
  const auto sol = fb::solve_faddeev_system(zero_model(), at_scale(2.0));
  ASSERT_EQ(sol.components.size(), 3u);
  for (const auto& [alpha, c] : sol.components) EXPECT_EQ(c.matrix().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Faddeev, SinglePairDecouples) {
  const auto spec = single_pair_model();
  const auto z = at_scale(1.0);
  const auto sol = fb::solve_faddeev_system(spec, z);
  const fb::Matrix t12 = fb::embed_two_body_solution(spec, k12, z, fb::TwoBodyKind::t_matrix).matrix();
  EXPECT_LE(rel(sol.components.at(k12).matrix(), t12), 1e-12);
  EXPECT_EQ(sol.components.at(k13).matrix().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(sol.components.at(k23).matrix().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Faddeev, TotalMatchesLs) {
  for (std::uint64_t seed : {1u, 20240607u, 99u}) {
    const auto spec = fb::reference_model(seed);
    for (double f : {0.2, 2.0, 50.0}) {
      const auto z = at_scale(f);
      const auto sol = fb::solve_faddeev_system(spec, z);
      EXPECT_LE(rel(sol.total.matrix(), fb::solve_ls_exact(spec, z).matrix()), 1e-10);
      fb::Matrix sum = fb::Matrix::Zero(64, 64);
      for (const auto& [alpha, c] : sol.components) sum += c.matrix();
      EXPECT_EQ(sum, sol.total.matrix());
    }
  }
}

TEST(Heitler, ZeroPotential) {
  const auto sol = fb::solve_heitler_exact(zero_model(), at_scale(2.0));
  EXPECT_EQ(sol.k.matrix().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(sol.t.matrix().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Heitler, BothKModesMatchLs) {
  for (std::uint64_t seed : {3u, 20240607u}) {
    const auto spec = fb::reference_model(seed);
    for (double f : {0.5, 2.0, 20.0}) {
      const auto z = at_scale(f);
      const fb::Matrix t_ls = fb::solve_ls_exact(spec, z).matrix();
      const auto direct = fb::solve_heitler_exact(spec, z, fb::KMode::direct);
      const auto dec = fb::solve_heitler_exact(spec, z, fb::KMode::faddeev_decomposed);
      EXPECT_LE(rel(direct.t.matrix(), t_ls), 1e-10);
      EXPECT_LE(rel(dec.t.matrix(), t_ls), 1e-10);
      EXPECT_LE(rel(dec.k.matrix(), direct.k.matrix()), 1e-10);
      EXPECT_TRUE(fb::is_hermitian(direct.k.matrix()));
      EXPECT_FALSE(direct.k_components.has_value());
      ASSERT_TRUE(dec.k_components.has_value());
      EXPECT_EQ(dec.k_components->components.size(), 3u);
    }
  }
}

TEST(KImpulse, ZeroAndSinglePair) {
  EXPECT_EQ(fb::kmatrix_impulse(zero_model(), at_scale(2.0)).matrix().cwiseAbs().maxCoeff(), 0.0);
  const auto spec = single_pair_model();
  const auto z = at_scale(1.5);
  EXPECT_LE(rel(fb::kmatrix_impulse(spec, z).matrix(), fb::solve_heitler_exact(spec, z).k.matrix()),
            1e-12);
}

TEST(KImpulse, ErrorFallsWithEnergy) {
  const auto spec = fb::reference_model();
  double previous = INFINITY;
  for (double f : {2.0, 6.0, 20.0, 60.0, 200.0}) {
    const auto z = at_scale(f);
    const double err = rel(fb::kmatrix_impulse(spec, z).matrix(), fb::solve_heitler_exact(spec, z).k.matrix());
    EXPECT_LT(err, previous) << f;
    previous = err;
  }
}

TEST(PairK, ReconstructionFromAsymptoticPairT) {
  const auto ctx = fb::make_context(fb::reference_model(), at_scale(3.0));
  for (const auto& [alpha, t] : fb::asym_pair_t(ctx, fb::PairMode::heitler_pair)) {
    EXPECT_LE(rel(fb::reconstruct_pair_k(t, ctx.g1), ctx.k_pair.at(alpha)), 1e-10);
  }
  // g1_approx pair T inverts to v_a itself.
  for (const auto& [alpha, t] : fb::asym_pair_t(ctx, fb::PairMode::g1_approx)) {
    EXPECT_LE(rel(fb::reconstruct_pair_k(t, ctx.g1), ctx.v_pair.at(alpha)), 1e-10);
  }
}

TEST(AsymFaddeev, ZeroPotential) {
  for (auto mode : {fb::PairMode::heitler_pair, fb::PairMode::g1_approx}) {
    const auto sol = fb::solve_asym_faddeev(zero_model(), at_scale(2.0), mode);
    EXPECT_EQ(sol.total.matrix().cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(AsymFaddeev, MatchesDirectHeitlerSolve) {
  for (std::uint64_t seed : {1u, 20240607u}) {
    const auto ctx = fb::make_context(fb::reference_model(seed), at_scale(2.0));
    for (auto mode : {fb::PairMode::heitler_pair, fb::PairMode::g1_approx}) {
      const fb::Matrix direct = fb::solve_asym_heitler_direct(ctx, mode);
      // Independent oracle: T = K + K G1 T by a plain LU solve.
      fb::Matrix k = fb::Matrix::Zero(64, 64);
      for (const auto& [alpha, m] : mode == fb::PairMode::heitler_pair ? ctx.k_pair : ctx.v_pair) k += m;
      const fb::Matrix oracle = (fb::Matrix::Identity(64, 64) - k * ctx.g1).partialPivLu().solve(k);
      EXPECT_LE(rel(direct, oracle), 1e-12);
      EXPECT_LE(rel(fb::solve_asym_faddeev(ctx, mode).total.matrix(), oracle), 1e-10);
    }
  }
}

TEST(AsymFaddeev, ErrorAgainstLsFallsWithEnergy) {
  const auto spec = fb::reference_model();
  double previous = INFINITY;
  for (double f : {2.0, 6.0, 20.0, 60.0, 200.0}) {
    const auto z = at_scale(f);
    const double err = rel(fb::solve_asym_faddeev(spec, z).total.matrix(),
                           fb::solve_ls_exact(spec, z).matrix());
    EXPECT_LT(err, previous);
    previous = err;
  }
}

TEST(FiniteSum, ZeroAndSinglePair) {
  EXPECT_EQ(fb::finite_sum_T(zero_model(), at_scale(2.0)).matrix().cwiseAbs().maxCoeff(), 0.0);
  const auto spec = single_pair_model();
  const auto ctx = fb::make_context(spec, at_scale(2.0));
  const auto pair_t = fb::asym_pair_t(ctx, fb::PairMode::heitler_pair);
  EXPECT_EQ(fb::finite_sum_T(pair_t, ctx.g1), pair_t.at(k12));
}

TEST(FiniteSum, ExplicitProducts) {
  const auto ctx = fb::make_context(fb::reference_model(), at_scale(4.0));
  const auto pt = fb::asym_pair_t(ctx, fb::PairMode::heitler_pair);
  const fb::Matrix& a = pt.at(k12);
  const fb::Matrix& b = pt.at(k13);
  const fb::Matrix& c = pt.at(k23);
  const fb::Matrix& g = ctx.g1;
  const fb::Matrix expected = a + b + c + a * g * (b + c) + b * g * (a + c) + c * g * (a + b);
  EXPECT_LE(rel(fb::finite_sum_T(pt, g), expected), 1e-14);
}

TEST(FiniteSum, TruncationBoundHoldsAcrossSeeds) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    for (double strength : {0.5, 1.0, 2.0}) {
      const auto spec = fb::reference_model(seed, strength);
      for (double f : {1.0, 4.0, 30.0, 300.0}) {
        for (auto kind : {fb::NormKind::frobenius, fb::NormKind::spectral}) {
          const auto ctx = fb::make_context(spec, at_scale(f));
          const auto pt = fb::asym_pair_t(ctx, fb::PairMode::heitler_pair);
          const fb::Matrix gap =
              fb::finite_sum_T(pt, ctx.g1) - fb::solve_asym_faddeev(ctx, fb::PairMode::heitler_pair).total.matrix();
          EXPECT_LE(fb::operator_norm(gap, kind), fb::truncation_bound(pt, ctx.g1, kind))
              << "seed " << seed << " strength " << strength << " f " << f;
        }
      }
    }
  }
}

TEST(Unitarity, ExactAndAsymptoticSolutionsAreUnitary) {
  for (std::uint64_t seed : {4u, 20240607u}) {
    const auto spec = fb::reference_model(seed);
    for (double f : {0.5, 2.0, 200.0}) {
      const auto ctx = fb::make_context(spec, at_scale(f));
      EXPECT_LE(fb::unitarity_defect(fb::solve_ls_exact(ctx), ctx.g1), 1e-10);
      for (auto mode : {fb::PairMode::heitler_pair, fb::PairMode::g1_approx}) {
        EXPECT_LE(fb::unitarity_defect(fb::solve_asym_faddeev(ctx, mode).total.matrix(), ctx.g1), 1e-10);
      }
    }
  }
}

TEST(Diagnostics, ZeroPotentialNorms) {
  const auto d = fb::kernel_diagnostics(zero_model(), at_scale(2.0));
  EXPECT_EQ(d.max_t_g0(), 0.0);
  EXPECT_EQ(d.max_t_g1(), 0.0);
  EXPECT_EQ(d.max_k_g2(), 0.0);
  EXPECT_EQ(d.max_v_g0(), 0.0);
  EXPECT_EQ(d.max_t_g1_t_g1(), 0.0);
  EXPECT_EQ(d.max_k_g2_k_g2(), 0.0);
  EXPECT_EQ(d.max_t_g0_deviation(), 0.0);
}

TEST(Diagnostics, SubmultiplicativeCouples) {
  const auto spec = fb::reference_model();
  for (auto kind : {fb::NormKind::frobenius, fb::NormKind::spectral}) {
    for (double f : {2.0, 20.0, 200.0}) {
      const auto d = fb::kernel_diagnostics(spec, at_scale(f), kind);
      ASSERT_EQ(d.couples.size(), 6u);
      std::map<fb::PairIndex, double> tg1;
      for (const auto& p : d.pairs) tg1[p.alpha] = p.t_g1;
      for (const auto& c : d.couples) {
        EXPECT_LE(c.t_g1_t_g1, tg1.at(c.alpha) * tg1.at(c.beta) * (1 + 1e-12));
      }
    }
  }
}

TEST(Diagnostics, PairTApproachesPotentialAtHighEnergy) {
  const auto spec = fb::reference_model();
  const double low = fb::kernel_diagnostics(spec, at_scale(2.0)).max_t_g0_deviation();
  const double high = fb::kernel_diagnostics(spec, at_scale(200.0)).max_t_g0_deviation();
  EXPECT_LT(high, low);
}

TEST(Sweep, RejectsUnorderedEnergies) {
  const auto spec = fb::reference_model();
  EXPECT_THROW(fb::asym_error_sweep(spec, {2.0, 1.0}, {}), fb::ModelError);
  EXPECT_THROW(fb::asym_error_sweep(spec, {-1.0, 1.0}, {}), fb::ModelError);
}

TEST(Sweep, RecordsSolverFailurePerPoint) {
  // Pair block 1 - v G is nearly singular at e0 = 0.5 when eps is tiny.
  fb::ModelSpec spec;
  spec.masses = {0.5, 1.0, 1.0};
  spec.grids = {{0.0, 1.0}, {0.0}, {0.0}};
  fb::Matrix v = fb::Matrix::Zero(2, 2);
  v(0, 0) = 0.5;
  spec.pair_potentials[k12] = v;
  fb::SweepOptions options;
  options.eps = 1e-15;
  const auto points = fb::asym_error_sweep(spec, {0.5, 3.0}, options);
  ASSERT_EQ(points.size(), 2u);
  EXPECT_FALSE(points[0].ok);
  EXPECT_EQ(points[0].error_code, "solver_error");
  EXPECT_NE(points[0].error.find("e0=0.5"), std::string::npos);
  EXPECT_NE(points[0].error.find("pair 12"), std::string::npos);
  EXPECT_TRUE(points[1].ok);
}

TEST(Sweep, ThreadCountDoesNotChangeResults) {
  const auto spec = fb::reference_model();
  const auto energies = fb::geometric_energies(6.125, 612.5, 5);
  fb::SweepOptions one;
  fb::SweepOptions many;
  many.threads = 3;
  const auto a = fb::asym_error_sweep(spec, energies, one);
  const auto b = fb::asym_error_sweep(spec, energies, many);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].asym_rel_err, b[i].asym_rel_err);
    EXPECT_EQ(a[i].finite_sum_rel_err, b[i].finite_sum_rel_err);
    EXPECT_EQ(a[i].defect_finite_sum, b[i].defect_finite_sum);
    EXPECT_EQ(a[i].diagnostics.max_t_g1_t_g1(), b[i].diagnostics.max_t_g1_t_g1());
  }
}

TEST(Sweep, DefectBoundDominatesFiniteSumDefect) {
  const auto spec = fb::reference_model();
  for (const auto& pt : fb::asym_error_sweep(spec, fb::geometric_energies(6.125, 612.5, 5), {})) {
    ASSERT_TRUE(pt.ok);
    // Roundoff floor of the defect itself is ~1e-15.
    EXPECT_LE(pt.defect_finite_sum, pt.defect_bound + 1e-14) << pt.e0;
    EXPECT_LE(pt.truncation_gap, pt.truncation_bound);
  }
}

TEST(Sweep, FiniteSumDefectFallsAlongSweep) {
  const auto points =
      fb::asym_error_sweep(fb::reference_model(), fb::geometric_energies(6.125, 612.5, 5), {});
  for (std::size_t i = 0; i < points.size(); ++i) {
    EXPECT_GT(points[i].defect_finite_sum, 0.0);
    if (i > 0) EXPECT_LT(points[i].defect_finite_sum, points[i - 1].defect_finite_sum);
  }
}

TEST(Sweep, ZeroPotentialSinglePoint) {
  const auto points = fb::asym_error_sweep(zero_model(), {6.125}, {});
  ASSERT_EQ(points.size(), 1u);
  ASSERT_TRUE(points[0].ok);
  EXPECT_EQ(points[0].asym_rel_err, 0.0);
  EXPECT_EQ(points[0].finite_sum_rel_err, 0.0);
  EXPECT_EQ(points[0].defect_finite_sum, 0.0);
  EXPECT_EQ(points[0].truncation_bound, 0.0);
}

TEST(Helpers, GeometricEnergiesAndSlope) {
  const auto e = fb::geometric_energies(2.0, 200.0, 5);
  ASSERT_EQ(e.size(), 5u);
  EXPECT_EQ(e.front(), 2.0);
  EXPECT_EQ(e.back(), 200.0);
  EXPECT_NEAR(e[2], 20.0, 1e-12);
  EXPECT_EQ(fb::geometric_energies(3.0, 3.0, 1), std::vector<double>{3.0});
  EXPECT_THROW(fb::geometric_energies(1.0, 2.0, 0), fb::ModelError);

  std::vector<double> x{0.1, 0.3, 1.0, 4.0};
  std::vector<double> y;
  for (double v : x) y.push_back(7.0 * v * v);
  EXPECT_NEAR(fb::loglog_slope(x, y), 2.0, 1e-12);
  EXPECT_TRUE(std::isnan(fb::loglog_slope({1.0}, {1.0})));
}

TEST(PairMode, Parses) {
  EXPECT_EQ(fb::parse_pair_mode("g1_approx"), fb::PairMode::g1_approx);
  EXPECT_EQ(fb::to_string(fb::PairMode::heitler_pair), "heitler_pair");
  EXPECT_THROW(fb::parse_pair_mode("born"), fb::ConfigError);
}
