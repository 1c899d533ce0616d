#include "fewbody/few_body.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "fewbody/error.hpp"

namespace fewbody {

namespace {

Matrix sum_of(const std::map<PairIndex, Matrix>& ops, Index dim) {
  Matrix total = Matrix::Zero(dim, dim);
  for (const auto& entry : ops) total += entry.second;
  return total;
}

FaddeevSolution package(std::map<PairIndex, Matrix> components, Index dim,
                        SolutionMethod method, const ComplexEnergy& z, Role total_role) {
  Matrix total = sum_of(components, dim);
  std::map<PairIndex, FewBodyOperator> tagged;
  for (auto& [alpha, m] : components) {
    tagged.emplace(alpha, FewBodyOperator{OperatorMatrix(std::move(m), Role::Other), z});
  }
  return {std::move(tagged), FewBodyOperator{OperatorMatrix(std::move(total), total_role), z},
          method, z};
}

double norm_of(const Matrix& m, NormKind kind) { return operator_norm(m, kind); }

}  // namespace

std::string_view to_string(PairMode mode) {
  return mode == PairMode::g1_approx ? "g1_approx" : "heitler_pair";
}

PairMode parse_pair_mode(std::string_view text) {
  if (text == "heitler_pair") return PairMode::heitler_pair;
  if (text == "g1_approx") return PairMode::g1_approx;
  throw ConfigError("unknown pair_mode '" + std::string(text) +
                    "' (expected heitler_pair|g1_approx)");
}

std::string_view to_string(SolutionMethod method) {
  switch (method) {
    case SolutionMethod::exact_faddeev: return "exact_faddeev";
    case SolutionMethod::exact_heitler: return "exact_heitler";
    case SolutionMethod::asym_system: return "asym_system";
    case SolutionMethod::finite_sum: return "finite_sum";
    case SolutionMethod::ls_direct: return "ls_direct";
  }
  return "ls_direct";
}

EnergyContext make_context(const ModelSpec& spec, const ComplexEnergy& z) {
  spec.validate();
  EnergyContext ctx{z, spec.interacting_pairs(), {}, {}, {}, {}, {}, {}, {}};
  auto green = green_functions(spec, z);
  ctx.g0 = green.g0.matrix();
  ctx.g1 = green.g1.matrix();
  ctx.g2 = green.g2.matrix();
  ctx.v = Matrix::Zero(ctx.g0.rows(), ctx.g0.cols());
  for (PairIndex alpha : ctx.pairs) {
    Matrix v_alpha = embed_pair_potential(spec, alpha).matrix();
    ctx.v += v_alpha;
    ctx.v_pair.emplace(alpha, std::move(v_alpha));
    ctx.t_pair.emplace(alpha,
                       embed_two_body_solution(spec, alpha, z, TwoBodyKind::t_matrix).matrix());
    ctx.k_pair.emplace(alpha,
                       embed_two_body_solution(spec, alpha, z, TwoBodyKind::k_matrix).matrix());
  }
  return ctx;
}

Matrix solve_ls_exact(const EnergyContext& ctx) {
  return solve_resolvent_system(ctx.v * ctx.g0, ctx.v);
}

FewBodyOperator solve_ls_exact(const ModelSpec& spec, const ComplexEnergy& z) {
  spec.validate();
  const Matrix v = build_v(spec).matrix();
  const auto green = green_functions(spec, z);
  return {OperatorMatrix(solve_resolvent_system(v * green.g0.matrix(), v), Role::T), z};
}

std::map<PairIndex, Matrix> solve_coupled_components(
    const std::map<PairIndex, Matrix>& pair_ops, const Matrix& green) {
  std::map<PairIndex, Matrix> out;
  if (pair_ops.empty()) return out;
  const Index d = green.rows();
  const Index p = static_cast<Index>(pair_ops.size());

  std::vector<PairIndex> order;
  std::vector<const Matrix*> ops;
  for (const auto& [alpha, op] : pair_ops) {
    if (op.rows() != d || op.cols() != d) {
      throw DimensionError("pair operator " + alpha.label() +
                           " does not match the Green's function dimension");
    }
    order.push_back(alpha);
    ops.push_back(&op);
  }

  Matrix lhs = Matrix::Identity(p * d, p * d);
  Matrix rhs(p * d, d);
  for (Index a = 0; a < p; ++a) {
    const Matrix kernel = *ops[a] * green;
    for (Index b = 0; b < p; ++b) {
      if (b != a) lhs.block(a * d, b * d, d, d) = -kernel;
    }
    rhs.block(a * d, 0, d, d) = *ops[a];
  }
  const Matrix stacked = solve_linear(lhs, rhs);
  for (Index a = 0; a < p; ++a) {
    out.emplace(order[a], stacked.block(a * d, 0, d, d));
  }
  return out;
}

FaddeevSolution solve_faddeev_system(const EnergyContext& ctx) {
  return package(solve_coupled_components(ctx.t_pair, ctx.g0), ctx.dim(),
                 SolutionMethod::exact_faddeev, ctx.energy, Role::T);
}

FaddeevSolution solve_faddeev_system(const ModelSpec& spec, const ComplexEnergy& z) {
  return solve_faddeev_system(make_context(spec, z));
}

HeitlerSolution solve_heitler_exact(const EnergyContext& ctx, KMode k_mode) {
  std::optional<FaddeevSolution> components;
  Matrix k;
  if (k_mode == KMode::direct) {
    k = solve_resolvent_system(ctx.v * ctx.g2, ctx.v);
  } else {
    components = package(solve_coupled_components(ctx.k_pair, ctx.g2), ctx.dim(),
                         SolutionMethod::exact_heitler, ctx.energy, Role::Other);
    k = components->total.matrix();
  }
  if (!is_hermitian(k)) {
    throw NumericError("Heitler K is not Hermitian within tolerance");
  }
  Matrix t = solve_resolvent_system(k * ctx.g1, k);
  return {FewBodyOperator{OperatorMatrix(std::move(k), Role::K), ctx.energy},
          FewBodyOperator{OperatorMatrix(std::move(t), Role::T), ctx.energy},
          std::move(components)};
}

HeitlerSolution solve_heitler_exact(const ModelSpec& spec, const ComplexEnergy& z,
                                    KMode k_mode) {
  return solve_heitler_exact(make_context(spec, z), k_mode);
}

Matrix kmatrix_impulse(const EnergyContext& ctx) { return sum_of(ctx.k_pair, ctx.dim()); }

FewBodyOperator kmatrix_impulse(const ModelSpec& spec, const ComplexEnergy& z) {
  return {OperatorMatrix(kmatrix_impulse(make_context(spec, z)), Role::K), z};
}

std::map<PairIndex, Matrix> asym_pair_t(const EnergyContext& ctx, PairMode mode) {
  std::map<PairIndex, Matrix> out;
  const auto& source = mode == PairMode::heitler_pair ? ctx.k_pair : ctx.v_pair;
  for (const auto& [alpha, k] : source) {
    out.emplace(alpha, solve_resolvent_system(k * ctx.g1, k));
  }
  return out;
}

Matrix reconstruct_pair_k(const Matrix& t_pair, const Matrix& g1) {
  const Matrix lhs = Matrix::Identity(t_pair.rows(), t_pair.cols()) + t_pair * g1;
  return solve_linear(lhs, t_pair);
}

FaddeevSolution solve_asym_faddeev(const EnergyContext& ctx, PairMode mode) {
  return package(solve_coupled_components(asym_pair_t(ctx, mode), ctx.g1), ctx.dim(),
                 SolutionMethod::asym_system, ctx.energy, Role::T);
}

FaddeevSolution solve_asym_faddeev(const ModelSpec& spec, const ComplexEnergy& z,
                                   PairMode mode) {
  return solve_asym_faddeev(make_context(spec, z), mode);
}

Matrix solve_asym_heitler_direct(const EnergyContext& ctx, PairMode mode) {
  const Matrix k = mode == PairMode::heitler_pair ? kmatrix_impulse(ctx) : ctx.v;
  return solve_resolvent_system(k * ctx.g1, k);
}

Matrix finite_sum_T(const std::map<PairIndex, Matrix>& pair_t, const Matrix& g1) {
  const Index d = g1.rows();
  const Matrix all = sum_of(pair_t, d);
  Matrix total = Matrix::Zero(d, d);
  for (const auto& [alpha, t] : pair_t) {
    total += t + t * g1 * (all - t);
  }
  return total;
}

FewBodyOperator finite_sum_T(const ModelSpec& spec, const ComplexEnergy& z, PairMode mode) {
  const EnergyContext ctx = make_context(spec, z);
  return {OperatorMatrix(finite_sum_T(asym_pair_t(ctx, mode), ctx.g1), Role::T), z};
}

double KernelDiagnostics::max_t_g0() const {
  double m = 0.0;
  for (const auto& p : pairs) m = std::max(m, p.t_g0);
  return m;
}
double KernelDiagnostics::max_t_g1() const {
  double m = 0.0;
  for (const auto& p : pairs) m = std::max(m, p.t_g1);
  return m;
}
double KernelDiagnostics::max_k_g2() const {
  double m = 0.0;
  for (const auto& p : pairs) m = std::max(m, p.k_g2);
  return m;
}
double KernelDiagnostics::max_v_g0() const {
  double m = 0.0;
  for (const auto& p : pairs) m = std::max(m, p.v_g0);
  return m;
}
double KernelDiagnostics::max_v_g1() const {
  double m = 0.0;
  for (const auto& p : pairs) m = std::max(m, p.v_g1);
  return m;
}
double KernelDiagnostics::max_v_g2() const {
  double m = 0.0;
  for (const auto& p : pairs) m = std::max(m, p.v_g2);
  return m;
}
double KernelDiagnostics::max_t_g1_t_g1() const {
  double m = 0.0;
  for (const auto& c : couples) m = std::max(m, c.t_g1_t_g1);
  return m;
}
double KernelDiagnostics::max_k_g2_k_g2() const {
  double m = 0.0;
  for (const auto& c : couples) m = std::max(m, c.k_g2_k_g2);
  return m;
}
double KernelDiagnostics::max_t_g0_deviation() const {
  double m = 0.0;
  for (const auto& p : pairs) {
    if (p.v_g0 > 0.0) m = std::max(m, std::abs(p.t_g0 - p.v_g0) / p.v_g0);
  }
  return m;
}

KernelDiagnostics kernel_diagnostics(const EnergyContext& ctx, NormKind kind,
                                     const std::map<PairIndex, Matrix>& pair_t) {
  KernelDiagnostics diag;
  diag.kind = kind;
  diag.energy = ctx.energy;

  std::map<PairIndex, Matrix> t_g1;
  std::map<PairIndex, Matrix> k_g2;
  for (PairIndex alpha : ctx.pairs) {
    const Matrix& v = ctx.v_pair.at(alpha);
    t_g1.emplace(alpha, pair_t.at(alpha) * ctx.g1);
    k_g2.emplace(alpha, ctx.k_pair.at(alpha) * ctx.g2);
    PairNorms n{alpha};
    n.t_g0 = norm_of(ctx.t_pair.at(alpha) * ctx.g0, kind);
    n.t_g1 = norm_of(t_g1.at(alpha), kind);
    n.k_g2 = norm_of(k_g2.at(alpha), kind);
    n.v_g0 = norm_of(v * ctx.g0, kind);
    n.v_g1 = norm_of(v * ctx.g1, kind);
    n.v_g2 = norm_of(v * ctx.g2, kind);
    diag.pairs.push_back(n);
  }
  for (PairIndex alpha : ctx.pairs) {
    for (PairIndex beta : ctx.pairs) {
      if (alpha == beta) continue;
      CoupleNorms c{alpha, beta};
      c.t_g1_t_g1 = norm_of(t_g1.at(alpha) * t_g1.at(beta), kind);
      c.k_g2_k_g2 = norm_of(k_g2.at(alpha) * k_g2.at(beta), kind);
      diag.couples.push_back(c);
    }
  }
  return diag;
}

KernelDiagnostics kernel_diagnostics(const ModelSpec& spec, const ComplexEnergy& z,
                                     NormKind kind, PairMode mode) {
  const EnergyContext ctx = make_context(spec, z);
  return kernel_diagnostics(ctx, kind, asym_pair_t(ctx, mode));
}

double truncation_bound(const std::map<PairIndex, Matrix>& pair_t, const Matrix& g1,
                        NormKind kind) {
  if (pair_t.size() < 2) return 0.0;
  const Index d = g1.rows();
  const Matrix all = sum_of(pair_t, d);
  const double g1_norm = norm_of(g1, kind);
  double max_couple = 0.0;
  double max_factor = 0.0;
  double max_t = 0.0;
  std::size_t couples = 0;
  for (const auto& [alpha, ta] : pair_t) {
    const Matrix ta_g1 = ta * g1;
    for (const auto& [beta, tb] : pair_t) {
      if (alpha == beta) continue;
      ++couples;
      max_couple = std::max(max_couple, norm_of(ta_g1 * tb * g1, kind));
    }
    max_factor = std::max(max_factor, 1.0 + g1_norm * norm_of(all - ta, kind));
    max_t = std::max(max_t, norm_of(ta, kind));
  }
  return static_cast<double>(couples) * max_couple * max_factor * max_t;
}

SweepPoint evaluate_sweep_point(const ModelSpec& spec, double e0,
                                const SweepOptions& options) {
  const ComplexEnergy z(e0, options.eps);
  const EnergyContext ctx = make_context(spec, z);
  const NormKind kind = options.norm;

  SweepPoint pt;
  pt.e0 = e0;
  pt.eps = options.eps;

  const Matrix t_ls = solve_ls_exact(ctx);
  const HeitlerSolution heitler = solve_heitler_exact(ctx, KMode::direct);
  const Matrix k_imp = kmatrix_impulse(ctx);
  const auto pair_t = asym_pair_t(ctx, options.pair_mode);
  const Matrix t_asym = sum_of(solve_coupled_components(pair_t, ctx.g1), ctx.dim());
  const Matrix t_fs = finite_sum_T(pair_t, ctx.g1);

  pt.kimp_rel_err = relative_difference(k_imp, heitler.k.matrix(), kind);
  pt.asym_rel_err = relative_difference(t_asym, t_ls, kind);
  pt.finite_sum_rel_err = relative_difference(t_fs, t_ls, kind);
  pt.finite_sum_diag_rel_err =
      (t_fs.diagonal() - t_ls.diagonal()).norm() /
      std::max(t_ls.diagonal().norm(), tol::floor_norm);
  pt.defect_ls = unitarity_defect(t_ls, ctx.g1);
  pt.defect_asym = unitarity_defect(t_asym, ctx.g1);
  pt.defect_finite_sum = unitarity_defect(t_fs, ctx.g1);
  pt.truncation_gap = norm_of(t_fs - t_asym, kind);
  pt.truncation_bound = truncation_bound(pair_t, ctx.g1, kind);

  // Rigorous first-order bound on defect(T_asym + D) with D = T_fs - T_asym,
  // Frobenius throughout to match unitarity_defect.
  const double gap_f = (t_fs - t_asym).norm();
  const double g1_f = ctx.g1.norm();
  pt.g1_norm = norm_of(ctx.g1, kind);
  pt.defect_bound = 2.0 * gap_f * (1.0 + 2.0 * g1_f * t_asym.norm() + g1_f * gap_f) /
                    std::max(t_fs.norm(), tol::floor_norm);
  pt.diagnostics = kernel_diagnostics(ctx, kind, pair_t);
  pt.ok = true;
  return pt;
}

std::vector<SweepPoint> asym_error_sweep(const ModelSpec& spec,
                                         const std::vector<double>& energies,
                                         const SweepOptions& options) {
  spec.validate();
  for (std::size_t i = 0; i < energies.size(); ++i) {
    if (!(energies[i] > 0.0) || (i > 0 && !(energies[i] > energies[i - 1]))) {
      throw ModelError("sweep energies must be positive and strictly increasing");
    }
  }
  std::vector<SweepPoint> points(energies.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < energies.size(); i = next++) {
      try {
        points[i] = evaluate_sweep_point(spec, energies[i], options);
      } catch (const std::exception& err) {
        SweepPoint failed;
        failed.e0 = energies[i];
        failed.eps = options.eps;
        failed.error_code = fewbody::error_code(err);
        std::ostringstream msg;
        msg.precision(17);
        msg << "e0=" << energies[i] << ": " << err.what();
        failed.error = msg.str();
        points[i] = std::move(failed);
      }
    }
  };
  const int threads = std::clamp(options.threads, 1, static_cast<int>(std::max<std::size_t>(1, energies.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return points;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  const double denom = n * sxx - sx * sx;
  if (n < 2 || denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / denom;
}

std::vector<double> geometric_energies(double start, double stop, int count) {
  if (count < 1) throw ModelError("energy count must be >= 1");
  if (!(start > 0.0) || !(stop >= start)) {
    throw ModelError("geometric range needs 0 < start <= stop");
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = start;
    return out;
  }
  const double ratio = std::log(stop / start) / (count - 1);
  for (int i = 0; i < count; ++i) out[i] = start * std::exp(ratio * i);
  out.back() = stop;
  return out;
}

}  // namespace fewbody
