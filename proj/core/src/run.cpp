#include "fewbody/run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "fewbody/error.hpp"
#include "fewbody/few_body.hpp"
#include "fewbody/two_body.hpp"

namespace fewbody {

namespace {

constexpr double kIdentityThreshold = 1e-10;

// Evaluates fn(i) for i in [0, count) on up to `threads` workers; the result
// order is the index order whatever the scheduling.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) fn(i);
  };
  const int n = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(1, count)));
  if (n == 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
}

ValidationCheck check(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, value <= threshold};
}

ReportRow failed_row(double energy, const std::exception& err) {
  ReportRow row;
  row.energy = energy;
  row.ok = false;
  row.error_code = std::string(error_code(err));
  row.error_message = err.what();
  return row;
}

std::vector<double> scaled_energies(const RunConfig& config, double scale) {
  std::vector<double> energies = config.energies.expand();
  if (config.energies.unit == EnergyUnit::scale) {
    for (double& e : energies) e *= scale;
  }
  std::sort(energies.begin(), energies.end());
  return energies;
}

SweepReport base_report(const RunConfig& config) {
  SweepReport report;
  report.mode = std::string(to_string(config.mode));
  report.config_hash = config_hash(config);
  report.tool_version = std::string(version());
  report.seed = config.seed;
  return report;
}

RunOutcome run_two_body(const RunConfig& config) {
  const ChannelDesc& desc = *config.channel;
  const bool yamaguchi = desc.family == "yamaguchi";
  const YamaguchiParams params{desc.strength, desc.range};

  SweepReport report = base_report(config);
  report.columns = {"p0",   "t_re",      "t_im",          "k_onshell",
                    "phase_shift", "s_re", "s_im",      "s_abs_dev",
                    "route_rel_err"};
  if (yamaguchi) report.columns.push_back("oracle_rel_err");
  report.columns.push_back("kz_ratio");

  const double scale = energy_scale(config);
  const std::vector<double> energies = scaled_energies(config, scale);
  report.rows.resize(energies.size());
  parallel_for(energies.size(), config.threads, [&](std::size_t i) {
    const double e = energies[i];
    try {
      const TwoBodyChannel ch = build_channel(desc, e);
      const OnShellPoint ls = solve_ls_onshell(ch);
      const OnShellPoint kr = solve_kmatrix_onshell(ch);
      const double t_scale = std::max(std::abs(ls.t_onshell), tol::floor_norm);
      ReportRow row;
      row.energy = e;
      row.values = {ch.onshell_momentum(),
                    ls.t_onshell.real(),
                    ls.t_onshell.imag(),
                    kr.k_onshell,
                    kr.phase_shift,
                    kr.s_matrix.real(),
                    kr.s_matrix.imag(),
                    std::abs(std::abs(kr.s_matrix) - 1.0),
                    std::abs(kr.t_onshell - ls.t_onshell) / t_scale};
      if (yamaguchi) {
        const OnShellPoint exact = yamaguchi_oracle(params, desc.reduced_mass, e);
        row.values.push_back(std::abs(ls.t_onshell - exact.t_onshell) /
                             std::max(std::abs(exact.t_onshell), tol::floor_norm));
      }
      row.values.push_back(klein_zemach_ratio(ch, e, config.norm));
      report.rows[i] = std::move(row);
    } catch (const std::exception& err) {
      report.rows[i] = failed_row(e, err);
    }
  });

  report.metadata.emplace_back("energy_scale", scale);
  if (yamaguchi && desc.l == 0) {
    const auto eb = yamaguchi_binding_energy(params, desc.reduced_mass);
    report.metadata.emplace_back("binding_energy", eb ? *eb : 0.0);
  }
  const bool ok = std::all_of(report.rows.begin(), report.rows.end(),
                              [](const ReportRow& r) { return r.ok; });
  return {std::move(report), ok ? 0 : 1};
}

std::vector<double> sweep_values(const SweepPoint& pt) {
  const KernelDiagnostics& d = pt.diagnostics;
  std::vector<double> values = {pt.kimp_rel_err,
                                pt.asym_rel_err,
                                pt.finite_sum_rel_err,
                                pt.finite_sum_diag_rel_err,
                                pt.defect_ls,
                                pt.defect_asym,
                                pt.defect_finite_sum,
                                pt.truncation_gap,
                                pt.truncation_bound,
                                pt.defect_bound,
                                d.max_t_g0(),
                                d.max_t_g1(),
                                d.max_k_g2(),
                                d.max_v_g0(),
                                d.max_v_g1(),
                                d.max_v_g2(),
                                d.max_t_g1_t_g1(),
                                d.max_k_g2_k_g2(),
                                d.max_t_g0_deviation()};
  for (const PairNorms& p : d.pairs) {
    values.insert(values.end(), {p.t_g0, p.t_g1, p.k_g2, p.v_g0, p.v_g1, p.v_g2});
  }
  for (const CoupleNorms& c : d.couples) {
    values.insert(values.end(), {c.t_g1_t_g1, c.k_g2_k_g2});
  }
  return values;
}

RunOutcome run_sweep(const RunConfig& config) {
  const ModelSpec spec = build_model(*config.model, config.seed);
  const double scale = pair_spectral_radius(spec);
  const std::vector<double> energies = scaled_energies(config, scale);

  SweepOptions options;
  options.eps = config.eps;
  options.pair_mode = config.pair_mode;
  options.norm = config.norm;
  options.threads = config.threads;
  const std::vector<SweepPoint> points = asym_error_sweep(spec, energies, options);

  SweepReport report = base_report(config);
  report.columns = sweep_columns(spec);
  std::vector<double> tg1, tgtg;
  bool ok = true;
  for (const SweepPoint& pt : points) {
    ReportRow row;
    row.energy = pt.e0;
    if (pt.ok) {
      row.values = sweep_values(pt);
      tg1.push_back(pt.diagnostics.max_t_g1());
      tgtg.push_back(pt.diagnostics.max_t_g1_t_g1());
    } else {
      ok = false;
      row.ok = false;
      row.error_code = pt.error_code;
      row.error_message = pt.error;
    }
    report.rows.push_back(std::move(row));
  }
  report.metadata = {{"energy_scale", scale},
                     {"eps", config.eps},
                     {"binding_scale", binding_scale(spec)},
                     {"h0_median", h0_median(spec)},
                     {"slope_tgtg_vs_tg1", loglog_slope(tg1, tgtg)}};
  return {std::move(report), ok ? 0 : 1};
}

RunOutcome run_validate(const RunConfig& config) {
  const ModelSpec spec = build_model(*config.model, config.seed);
  const double scale = pair_spectral_radius(spec);
  const std::vector<double> energies = scaled_energies(config, scale);

  SweepReport report = base_report(config);
  // Column names come from a check list; V = 0 keeps the same names.
  const auto names = validate_point(spec, ComplexEnergy(1.0, 1.0), config.norm);
  for (const auto& c : names) report.columns.push_back(c.name);
  report.columns.push_back("failed_checks");

  std::vector<int> failures(energies.size(), 0);
  report.rows.resize(energies.size());
  parallel_for(energies.size(), config.threads, [&](std::size_t i) {
    const double e = energies[i];
    try {
      const auto checks = validate_point(spec, ComplexEnergy(e, config.eps), config.norm);
      ReportRow row;
      row.energy = e;
      int failed = 0;
      for (const auto& c : checks) {
        row.values.push_back(c.value);
        if (!c.passed) ++failed;
      }
      row.values.push_back(failed);
      failures[i] = failed;
      report.rows[i] = std::move(row);
    } catch (const std::exception& err) {
      report.rows[i] = failed_row(e, err);
      failures[i] = 1;
    }
  });
  report.metadata = {{"energy_scale", scale}, {"eps", config.eps}};
  const bool ok = std::all_of(failures.begin(), failures.end(), [](int f) { return f == 0; });
  return {std::move(report), ok ? 0 : 1};
}

}  // namespace

std::vector<ValidationCheck> validate_point(const ModelSpec& spec, const ComplexEnergy& z,
                                            NormKind kind) {
  const EnergyContext ctx = make_context(spec, z);
  std::vector<ValidationCheck> out;

  const Matrix t_ls = solve_ls_exact(ctx);
  const HeitlerSolution heitler = solve_heitler_exact(ctx, KMode::direct);
  const HeitlerSolution heitler_dec = solve_heitler_exact(ctx, KMode::faddeev_decomposed);
  const FaddeevSolution faddeev = solve_faddeev_system(ctx);

  out.push_back(check("heitler_vs_ls", relative_difference(heitler.t.matrix(), t_ls, kind),
                      kIdentityThreshold));
  out.push_back(check("heitler_decomposed_vs_ls",
                      relative_difference(heitler_dec.t.matrix(), t_ls, kind),
                      kIdentityThreshold));
  out.push_back(check("faddeev_vs_ls", relative_difference(faddeev.total.op.matrix(), t_ls, kind),
                      kIdentityThreshold));
  out.push_back(check("k_decomposition",
                      relative_difference(heitler_dec.k.matrix(), heitler.k.matrix(), kind),
                      kIdentityThreshold));

  const auto pair_t_heitler = asym_pair_t(ctx, PairMode::heitler_pair);
  double k_reconstruction = 0.0;
  for (const auto& [alpha, t_alpha] : pair_t_heitler) {
    k_reconstruction =
        std::max(k_reconstruction, relative_difference(reconstruct_pair_k(t_alpha, ctx.g1),
                                                       ctx.k_pair.at(alpha), kind));
  }
  out.push_back(check("pair_k_reconstruction", k_reconstruction, kIdentityThreshold));

  double asym_defect = 0.0;
  for (PairMode mode : {PairMode::heitler_pair, PairMode::g1_approx}) {
    const FaddeevSolution asym = solve_asym_faddeev(ctx, mode);
    const Matrix direct = solve_asym_heitler_direct(ctx, mode);
    out.push_back(check("asym_vs_direct_" + std::string(to_string(mode)),
                        relative_difference(asym.total.op.matrix(), direct, kind),
                        kIdentityThreshold));
    if (mode == PairMode::heitler_pair) {
      asym_defect = unitarity_defect(asym.total.op.matrix(), ctx.g1);
    }
  }
  out.push_back(check("defect_ls", unitarity_defect(t_ls, ctx.g1), kIdentityThreshold));
  out.push_back(check("defect_asym", asym_defect, kIdentityThreshold));

  double embed_t = 0.0;
  double embed_k = 0.0;
  for (PairIndex alpha : ctx.pairs) {
    const Matrix& v = ctx.v_pair.at(alpha);
    embed_t = std::max(embed_t, relative_difference(ctx.t_pair.at(alpha),
                                                    solve_resolvent_system(v * ctx.g0, v), kind));
    embed_k = std::max(embed_k, relative_difference(ctx.k_pair.at(alpha),
                                                    solve_resolvent_system(v * ctx.g2, v), kind));
  }
  out.push_back(check("embed_t_vs_full", embed_t, kIdentityThreshold));
  out.push_back(check("embed_k_vs_full", embed_k, kIdentityThreshold));

  out.push_back(check("green_split", (ctx.g0 - (ctx.g1 + ctx.g2)).cwiseAbs().maxCoeff(), 0.0));

  const Matrix t_asym = [&] {
    Matrix sum = Matrix::Zero(ctx.dim(), ctx.dim());
    for (const auto& [alpha, x] : solve_coupled_components(pair_t_heitler, ctx.g1)) sum += x;
    return sum;
  }();
  const double gap = operator_norm(finite_sum_T(pair_t_heitler, ctx.g1) - t_asym, kind);
  const double bound = truncation_bound(pair_t_heitler, ctx.g1, kind);
  const double ratio = gap == 0.0 ? 0.0 : gap / std::max(bound, tol::floor_norm);
  out.push_back(check("truncation_gap_over_bound", ratio, 1.0));
  return out;
}

std::vector<std::string> sweep_columns(const ModelSpec& spec) {
  std::vector<std::string> cols = {"kimp_rel_err",       "asym_rel_err",
                                   "finite_sum_rel_err", "finite_sum_diag_rel_err",
                                   "defect_ls",          "defect_asym",
                                   "defect_finite_sum",  "truncation_gap",
                                   "truncation_bound",   "defect_bound",
                                   "max_t_g0",           "max_t_g1",
                                   "max_k_g2",           "max_v_g0",
                                   "max_v_g1",           "max_v_g2",
                                   "max_t_g1_t_g1",      "max_k_g2_k_g2",
                                   "max_t_g0_deviation"};
  const auto pairs = spec.interacting_pairs();
  for (PairIndex a : pairs) {
    for (const char* q : {"t_g0_", "t_g1_", "k_g2_", "v_g0_", "v_g1_", "v_g2_"}) {
      cols.push_back(q + a.label());
    }
  }
  for (PairIndex a : pairs) {
    for (PairIndex b : pairs) {
      if (a == b) continue;
      cols.push_back("t_g1_t_g1_" + a.label() + "_" + b.label());
      cols.push_back("k_g2_k_g2_" + a.label() + "_" + b.label());
    }
  }
  return cols;
}

RunOutcome run(const RunConfig& config) {
  switch (config.mode) {
    case RunMode::two_body:
      if (!config.channel) throw ConfigError("two-body run needs a channel table");
      return run_two_body(config);
    case RunMode::few_body:
    case RunMode::sweep:
      if (!config.model) throw ConfigError("few-body run needs a model table");
      return run_sweep(config);
    case RunMode::validate:
      if (!config.model) throw ConfigError("validate run needs a model table");
      return run_validate(config);
  }
  throw ConfigError("unknown run mode");
}

}  // namespace fewbody
