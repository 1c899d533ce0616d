#pragma once

// Run configuration: YAML schema, validation, canonical form.
//
// A config file carries shared tables (`model` or `channel`, `output`) and one
// table per mode (`two-body`, `few-body`, `sweep`, `validate`) holding the
// energies and mode parameters. Only the table of the selected mode is read.
// The full schema is documented in docs/config.md.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fewbody/few_body.hpp"
#include "fewbody/model.hpp"
#include "fewbody/operator.hpp"
#include "fewbody/two_body.hpp"

namespace fewbody {

enum class RunMode { two_body, few_body, sweep, validate };
std::string_view to_string(RunMode mode);
RunMode parse_run_mode(std::string_view text);

enum class ReportFormat { csv, json };
std::string_view to_string(ReportFormat format);
ReportFormat parse_report_format(std::string_view text);

enum class EnergyUnit {
  absolute,
  scale,  // few-body: pair spectral radius; two-body: beta^2 / (2 mu)
};

struct EnergySpec {
  std::vector<double> values;  // explicit list, or empty when geometric
  std::optional<double> start;
  std::optional<double> stop;
  std::optional<int> count;
  EnergyUnit unit = EnergyUnit::absolute;

  bool geometric() const noexcept { return values.empty(); }
  /// Energies in the configured unit (not yet multiplied by the scale).
  std::vector<double> expand() const;

  friend bool operator==(const EnergySpec&, const EnergySpec&) = default;
};

/// Pair potential family of the finite model.
struct PairPotentialDesc {
  std::string family = "random_hermitian";  // random_hermitian|separable|gaussian|matrix|zero
  double strength = 1.0;
  double range = 1.0;
  std::vector<std::vector<double>> real;  // family == matrix
  std::vector<std::vector<double>> imag;

  friend bool operator==(const PairPotentialDesc&, const PairPotentialDesc&) = default;
};

struct ModelDesc {
  int particles = 3;
  std::vector<double> masses;
  std::vector<std::vector<double>> grids;
  /// Keys are pair labels ("12", "13", ...) or "all" for the default.
  std::map<std::string, PairPotentialDesc> potentials;

  friend bool operator==(const ModelDesc&, const ModelDesc&) = default;
};

struct ChannelDesc {
  double reduced_mass = 0.5;
  int l = 0;
  std::string family = "yamaguchi";
  double strength = -2.5;
  double range = 1.0;
  int nodes = TwoBodyChannel::kDefaultNodes;
  double map_scale = 0.0;  // 0 = use range

  friend bool operator==(const ChannelDesc&, const ChannelDesc&) = default;
};

struct RunConfig {
  RunMode mode = RunMode::sweep;
  std::uint64_t seed = 20240607;
  NormKind norm = NormKind::frobenius;
  int threads = 1;
  std::optional<ModelDesc> model;
  std::optional<ChannelDesc> channel;
  EnergySpec energies;
  double eps = 0.0;  // materialized; > 0 after parsing
  PairMode pair_mode = PairMode::heitler_pair;
  std::string output_path;
  ReportFormat format = ReportFormat::csv;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Command-line values that replace the corresponding config keys.
struct ConfigOverrides {
  std::optional<RunMode> mode;
  std::optional<std::uint64_t> seed;
  std::optional<NormKind> norm;
  std::optional<int> threads;
  std::optional<std::string> output_path;
  std::optional<ReportFormat> format;
};

/// Parses and validates a config. An override mode (the CLI subcommand) wins
/// over a top-level `mode` key; without either, the single mode table present
/// selects the mode. Overrides are applied before defaults are derived.
/// Throws ConfigError naming the field and line.
RunConfig parse_config(std::string_view text, const ConfigOverrides& overrides = {});

/// Canonical YAML; parse_config(emit_canonical(c)) == c.
std::string emit_canonical(const RunConfig& config);

/// FNV-1a 64 of the canonical form, as 16 hex digits. Execution settings
/// (threads, output path and format) do not enter the hash.
std::string config_hash(const RunConfig& config);

/// Materializes the finite model. Random potentials for pair alpha (ordinal k
/// in lexicographic pair order, k = 1, 2, ...) use seed + k * 0x9e3779b97f4a7c15.
ModelSpec build_model(const ModelDesc& desc, std::uint64_t seed);

TwoBodyChannel build_channel(const ChannelDesc& desc, double energy);

/// Energy scale used for `unit: scale` and for the default regulator.
double energy_scale(const RunConfig& config);

}  // namespace fewbody
