#include "fewbody/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fewbody/error.hpp"

namespace fewbody {

namespace {

struct GreenEntry {
  double hermitian;       // (e0 - h) / ((e0 - h)^2 + eps^2)
  double anti_hermitian;  // imaginary part: -eps / ((e0 - h)^2 + eps^2)
};

GreenEntry green_entry(double e0, double eps, double h) {
  const double d = e0 - h;
  const double denom = d * d + eps * eps;
  return {d / denom, -eps / denom};
}

double kinetic(double q, double mass) { return q * q / (2.0 * mass); }

// Flat offsets of every full-space basis state whose labels on axes m and n
// are zero, i.e. one representative per spectator tuple.
std::vector<Index> spectator_bases(const ProductLayout& layout, PairIndex alpha) {
  std::vector<Index> bases;
  bases.reserve(static_cast<std::size_t>(
      layout.size() / (layout.extent(alpha.m) * layout.extent(alpha.n))));
  for (Index flat = 0; flat < layout.size(); ++flat) {
    const auto labels = layout.unflatten(flat);
    if (labels[alpha.m] == 0 && labels[alpha.n] == 0) bases.push_back(flat);
  }
  return bases;
}

// Offset of pair-block index `a` relative to a spectator base.
Index pair_offset(const ProductLayout& layout, PairIndex alpha, Index a) {
  const Index nn = layout.extent(alpha.n);
  return (a / nn) * layout.stride(alpha.m) + (a % nn) * layout.stride(alpha.n);
}

RealVector pair_kinetic_diagonal(const ModelSpec& spec, PairIndex alpha) {
  const auto& gm = spec.grids[alpha.m];
  const auto& gn = spec.grids[alpha.n];
  RealVector h(static_cast<Index>(gm.size() * gn.size()));
  Index a = 0;
  for (double qm : gm) {
    for (double qn : gn) {
      h(a++) = kinetic(qm, spec.masses[alpha.m]) + kinetic(qn, spec.masses[alpha.n]);
    }
  }
  return h;
}

std::vector<double> pair_relative_momenta(const ModelSpec& spec, PairIndex alpha) {
  const double mm = spec.masses.at(alpha.m);
  const double mn = spec.masses.at(alpha.n);
  std::vector<double> p;
  for (double qm : spec.grids.at(alpha.m)) {
    for (double qn : spec.grids.at(alpha.n)) {
      p.push_back((mn * qm - mm * qn) / (mm + mn));
    }
  }
  return p;
}

const Matrix& pair_potential(const ModelSpec& spec, PairIndex alpha) {
  const auto it = spec.pair_potentials.find(alpha);
  if (it == spec.pair_potentials.end()) {
    throw ModelError("no pair potential for pair " + alpha.label());
  }
  return it->second;
}

}  // namespace

ComplexEnergy::ComplexEnergy(double e0, double eps) : e0_(e0), eps_(eps) {
  if (!std::isfinite(e0)) throw ModelError("energy e0 must be finite");
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw ModelError("regulator eps must be positive and finite");
  }
}

std::string PairIndex::label() const {
  return std::to_string(m + 1) + std::to_string(n + 1);
}

PairIndex PairIndex::from_label(std::string_view label) {
  if (label.size() != 2 || label[0] < '1' || label[0] > '9' || label[1] < '1' ||
      label[1] > '9' || label[0] >= label[1]) {
    throw ModelError("bad pair label '" + std::string(label) +
                     "' (expected two increasing one-based digits, e.g. 12)");
  }
  return {label[0] - '1', label[1] - '1'};
}

std::vector<PairIndex> all_pairs(int n_particles) {
  std::vector<PairIndex> pairs;
  for (int m = 0; m < n_particles; ++m) {
    for (int n = m + 1; n < n_particles; ++n) pairs.push_back({m, n});
  }
  return pairs;
}

void ModelSpec::validate() const {
  if (n_particles < 3) throw ModelError("model needs at least 3 particles");
  if (static_cast<int>(masses.size()) != n_particles) {
    throw ModelError("masses: expected one entry per particle");
  }
  if (static_cast<int>(grids.size()) != n_particles) {
    throw ModelError("grids: expected one grid per particle");
  }
  for (int l = 0; l < n_particles; ++l) {
    if (!(masses[l] > 0.0) || !std::isfinite(masses[l])) {
      throw ModelError("mass of particle " + std::to_string(l + 1) +
                       " must be positive");
    }
    if (grids[l].empty()) {
      throw ModelError("empty momentum grid for particle " + std::to_string(l + 1));
    }
    for (double q : grids[l]) {
      if (!std::isfinite(q)) throw ModelError("non-finite grid momentum");
    }
  }
  for (const auto& [alpha, v] : pair_potentials) {
    if (alpha.m < 0 || alpha.m >= alpha.n || alpha.n >= n_particles) {
      throw ModelError("pair index out of range: " + alpha.label());
    }
    const Index d = pair_dimension(alpha);
    if (v.rows() != d || v.cols() != d) {
      std::ostringstream msg;
      msg << "pair potential " << alpha.label() << " must be " << d << "x" << d;
      throw ModelError(msg.str());
    }
    if (!v.allFinite()) throw ModelError("non-finite pair potential " + alpha.label());
    if (!is_hermitian(v)) {
      throw ModelError("pair potential " + alpha.label() + " is not Hermitian");
    }
  }
}

Index ModelSpec::dimension() const {
  Index d = 1;
  for (const auto& g : grids) d *= static_cast<Index>(g.size());
  return d;
}

Index ModelSpec::pair_dimension(PairIndex alpha) const {
  return static_cast<Index>(grids.at(alpha.m).size() * grids.at(alpha.n).size());
}

std::vector<PairIndex> ModelSpec::interacting_pairs() const {
  std::vector<PairIndex> pairs;
  for (const auto& entry : pair_potentials) pairs.push_back(entry.first);
  return pairs;
}

ProductLayout::ProductLayout(std::vector<Index> sizes) : sizes_(std::move(sizes)) {
  strides_.assign(sizes_.size(), 1);
  for (int axis = static_cast<int>(sizes_.size()) - 1; axis >= 0; --axis) {
    if (sizes_[axis] < 1) throw ModelError("empty grid in product layout");
    strides_[axis] = total_;
    total_ *= sizes_[axis];
  }
}

Index ProductLayout::flatten(std::span<const Index> labels) const {
  if (labels.size() != sizes_.size()) {
    throw DimensionError("label tuple has wrong length");
  }
  Index flat = 0;
  for (std::size_t axis = 0; axis < sizes_.size(); ++axis) {
    flat += labels[axis] * strides_[axis];
  }
  return flat;
}

std::vector<Index> ProductLayout::unflatten(Index flat) const {
  std::vector<Index> labels(sizes_.size());
  for (std::size_t axis = 0; axis < sizes_.size(); ++axis) {
    labels[axis] = flat / strides_[axis];
    flat %= strides_[axis];
  }
  return labels;
}

ProductLayout layout_of(const ModelSpec& spec) {
  std::vector<Index> sizes;
  for (const auto& g : spec.grids) sizes.push_back(static_cast<Index>(g.size()));
  return ProductLayout(std::move(sizes));
}

RealVector h0_diagonal(const ModelSpec& spec) {
  spec.validate();
  const ProductLayout layout = layout_of(spec);
  RealVector h(layout.size());
  for (Index flat = 0; flat < layout.size(); ++flat) {
    const auto labels = layout.unflatten(flat);
    double e = 0.0;
    for (int l = 0; l < spec.n_particles; ++l) {
      e += kinetic(spec.grids[l][labels[l]], spec.masses[l]);
    }
    h(flat) = e;
  }
  return h;
}

FewBodyOperator build_h0(const ModelSpec& spec) {
  const RealVector h = h0_diagonal(spec);
  Matrix m = Matrix::Zero(h.size(), h.size());
  m.diagonal() = h.cast<Complex>();
  return {OperatorMatrix(std::move(m), Role::H0), std::nullopt};
}

FewBodyOperator embed_pair_potential(const ModelSpec& spec, PairIndex alpha) {
  spec.validate();
  const Matrix& v = pair_potential(spec, alpha);
  const ProductLayout layout = layout_of(spec);
  Matrix full = Matrix::Zero(layout.size(), layout.size());
  for (Index base : spectator_bases(layout, alpha)) {
    for (Index a = 0; a < v.rows(); ++a) {
      const Index row = base + pair_offset(layout, alpha, a);
      for (Index b = 0; b < v.cols(); ++b) {
        full(row, base + pair_offset(layout, alpha, b)) = v(a, b);
      }
    }
  }
  return {OperatorMatrix(std::move(full), Role::V), std::nullopt};
}

FewBodyOperator build_v(const ModelSpec& spec) {
  spec.validate();
  const Index d = spec.dimension();
  Matrix total = Matrix::Zero(d, d);
  for (PairIndex alpha : spec.interacting_pairs()) {
    total += embed_pair_potential(spec, alpha).matrix();
  }
  return {OperatorMatrix(std::move(total), Role::V), std::nullopt};
}

GreenFunctions green_functions(const ModelSpec& spec, const ComplexEnergy& z) {
  const RealVector h = h0_diagonal(spec);
  const Index d = h.size();
  Matrix g0 = Matrix::Zero(d, d);
  Matrix g1 = Matrix::Zero(d, d);
  Matrix g2 = Matrix::Zero(d, d);
  for (Index k = 0; k < d; ++k) {
    const GreenEntry g = green_entry(z.e0(), z.eps(), h(k));
    g1(k, k) = Complex(0.0, g.anti_hermitian);
    g2(k, k) = Complex(g.hermitian, 0.0);
    g0(k, k) = Complex(g.hermitian, g.anti_hermitian);
  }
  return {{OperatorMatrix(std::move(g0), Role::G0), z},
          {OperatorMatrix(std::move(g1), Role::G1), z},
          {OperatorMatrix(std::move(g2), Role::G2), z}};
}

FewBodyOperator embed_two_body_solution(const ModelSpec& spec, PairIndex alpha,
                                        const ComplexEnergy& z,
                                        TwoBodyKind kind) {
  spec.validate();
  const Matrix& v = pair_potential(spec, alpha);
  const ProductLayout layout = layout_of(spec);
  const RealVector h_pair = pair_kinetic_diagonal(spec, alpha);
  const Index dp = v.rows();

  Matrix full = Matrix::Zero(layout.size(), layout.size());
  for (Index base : spectator_bases(layout, alpha)) {
    const auto labels = layout.unflatten(base);
    double spectator = 0.0;
    for (int l = 0; l < spec.n_particles; ++l) {
      if (l == alpha.m || l == alpha.n) continue;
      spectator += kinetic(spec.grids[l][labels[l]], spec.masses[l]);
    }
    const ComplexEnergy shifted = z.shifted_down(spectator);

    Matrix g = Matrix::Zero(dp, dp);
    for (Index a = 0; a < dp; ++a) {
      const GreenEntry e = green_entry(shifted.e0(), shifted.eps(), h_pair(a));
      g(a, a) = kind == TwoBodyKind::t_matrix ? Complex(e.hermitian, e.anti_hermitian)
                                              : Complex(e.hermitian, 0.0);
    }

    Matrix block;
    try {
      block = solve_resolvent_system(v * g, v);
    } catch (const SolverError& err) {
      std::ostringstream msg;
      msg << "pair " << alpha.label() << " block solve failed at spectator tuple (";
      for (int l = 0; l < spec.n_particles; ++l) {
        if (l == alpha.m || l == alpha.n) continue;
        msg << " q" << (l + 1) << "=" << spec.grids[l][labels[l]];
      }
      msg << " ): " << err.what();
      throw SolverError(msg.str(), err.condition_estimate());
    }

    for (Index a = 0; a < dp; ++a) {
      const Index row = base + pair_offset(layout, alpha, a);
      for (Index b = 0; b < dp; ++b) {
        full(row, base + pair_offset(layout, alpha, b)) = block(a, b);
      }
    }
  }
  if (kind == TwoBodyKind::k_matrix) {
    // Hermitian by construction; remove the rounding-level skew.
    full = 0.5 * (full + full.adjoint()).eval();
  }
  return {OperatorMatrix(std::move(full),
                         kind == TwoBodyKind::t_matrix ? Role::PairT : Role::PairK),
          z};
}

double pair_spectral_radius(const ModelSpec& spec) {
  spec.validate();
  auto pairs = spec.interacting_pairs();
  if (pairs.empty()) pairs = all_pairs(spec.n_particles);
  double radius = 0.0;
  for (PairIndex alpha : pairs) {
    radius = std::max(radius, pair_kinetic_diagonal(spec, alpha).cwiseAbs().maxCoeff());
  }
  return radius;
}

double binding_scale(const ModelSpec& spec) {
  spec.validate();
  double lowest = 0.0;
  for (const auto& [alpha, v] : spec.pair_potentials) {
    Matrix h = v;
    h.diagonal() += pair_kinetic_diagonal(spec, alpha).cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h, Eigen::EigenvaluesOnly);
    lowest = std::min(lowest, eig.eigenvalues()(0));
  }
  return -lowest;
}

double h0_median(const ModelSpec& spec) {
  RealVector h = h0_diagonal(spec);
  std::vector<double> values(h.data(), h.data() + h.size());
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Matrix separable_pair_potential(const ModelSpec& spec, PairIndex alpha,
                                double strength, double range) {
  if (!(range > 0.0)) throw ModelError("separable potential range must be positive");
  const auto p = pair_relative_momenta(spec, alpha);
  const Index d = static_cast<Index>(p.size());
  Eigen::VectorXd f(d);
  for (Index a = 0; a < d; ++a) f(a) = 1.0 / (p[a] * p[a] + range * range);
  return (strength * f * f.transpose()).cast<Complex>();
}

Matrix gaussian_pair_potential(const ModelSpec& spec, PairIndex alpha,
                               double strength, double range) {
  if (!(range > 0.0)) throw ModelError("gaussian potential range must be positive");
  const auto p = pair_relative_momenta(spec, alpha);
  const Index d = static_cast<Index>(p.size());
  Matrix v(d, d);
  for (Index a = 0; a < d; ++a) {
    for (Index b = 0; b < d; ++b) {
      const double dp = p[a] - p[b];
      v(a, b) = strength * std::exp(-dp * dp / (2.0 * range * range));
    }
  }
  return v;
}

Matrix random_hermitian(Index dim, double strength, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  // 53 random bits mapped onto [-1, 1); avoids the implementation-defined
  // distribution classes so results match across standard libraries.
  auto uniform = [&engine] {
    return static_cast<double>(engine() >> 11) * 0x1.0p-52 - 1.0;
  };
  Matrix x(dim, dim);
  for (Index j = 0; j < dim; ++j) {
    for (Index i = 0; i < dim; ++i) {
      const double re = uniform();
      const double im = uniform();
      x(i, j) = Complex(re, im);
    }
  }
  Matrix h = 0.5 * (x + x.adjoint());
  const double norm = h.norm();
  if (norm > 0.0) h *= strength / norm;
  return h;
}

ModelSpec reference_model(std::uint64_t seed, double strength) {
  ModelSpec spec;
  spec.n_particles = 3;
  spec.masses = {1.0, 1.0, 1.0};
  const std::vector<double> grid{0.25, 0.75, 1.25, 1.75};
  spec.grids = {grid, grid, grid};
  std::uint64_t ordinal = 0;
  for (PairIndex alpha : all_pairs(3)) {
    spec.pair_potentials[alpha] = random_hermitian(
        spec.pair_dimension(alpha), strength, seed + 0x9e3779b97f4a7c15ULL * ++ordinal);
  }
  spec.validate();
  return spec;
}

}  // namespace fewbody
