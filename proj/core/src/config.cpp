#include "fewbody/config.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "fewbody/error.hpp"

namespace fewbody {

namespace {

constexpr double kDefaultEpsFraction = 0.05;

[[noreturn]] void fail(const std::string& path, const YAML::Node& node,
                       const std::string& what) {
  std::ostringstream msg;
  msg << "config field '" << path << "'";
  if (node.IsDefined() && node.Mark().line >= 0) msg << " (line " << node.Mark().line + 1 << ")";
  msg << ": " << what;
  throw ConfigError(msg.str());
}

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

void require_map(const YAML::Node& node, const std::string& path) {
  if (!node.IsMap()) fail(path, node, "expected a table");
}

void reject_unknown(const YAML::Node& node, const std::string& path,
                    const std::set<std::string>& allowed) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(join(path, key), kv.first, "unknown field");
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) fail(path, node, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::BadConversion&) {
    fail(path, node, "cannot convert '" + node.Scalar() + "'");
  }
}

double finite_double(const YAML::Node& node, const std::string& path) {
  const double x = scalar<double>(node, path);
  if (!std::isfinite(x)) fail(path, node, "must be finite");
  return x;
}

std::vector<double> double_list(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence()) fail(path, node, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(finite_double(node[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<std::vector<double>> double_matrix(const YAML::Node& node,
                                               const std::string& path) {
  if (!node.IsSequence()) fail(path, node, "expected a list of lists");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(double_list(node[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

EnergySpec parse_energies(const YAML::Node& node, const std::string& path) {
  EnergySpec spec;
  if (node.IsSequence()) {
    spec.values = double_list(node, path);
    if (spec.values.empty()) fail(path, node, "energy list must not be empty");
  } else {
    require_map(node, path);
    reject_unknown(node, path, {"start", "stop", "count", "values", "unit"});
    if (node["values"]) {
      spec.values = double_list(node["values"], join(path, "values"));
      if (spec.values.empty()) fail(join(path, "values"), node["values"], "must not be empty");
      if (node["start"] || node["stop"] || node["count"]) {
        fail(path, node, "give either values or start/stop/count, not both");
      }
    } else {
      for (const char* key : {"start", "stop", "count"}) {
        if (!node[key]) fail(join(path, key), node, "missing required field");
      }
      spec.start = finite_double(node["start"], join(path, "start"));
      spec.stop = finite_double(node["stop"], join(path, "stop"));
      spec.count = scalar<int>(node["count"], join(path, "count"));
      if (*spec.count < 1) fail(join(path, "count"), node["count"], "count must be >= 1");
      if (!(*spec.start > 0.0)) fail(join(path, "start"), node["start"], "start must be > 0");
      if (!(*spec.stop >= *spec.start)) {
        fail(join(path, "stop"), node["stop"], "stop must be >= start");
      }
    }
    if (node["unit"]) {
      const auto unit = scalar<std::string>(node["unit"], join(path, "unit"));
      if (unit == "absolute") {
        spec.unit = EnergyUnit::absolute;
      } else if (unit == "scale") {
        spec.unit = EnergyUnit::scale;
      } else {
        fail(join(path, "unit"), node["unit"], "expected absolute|scale");
      }
    }
  }
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    if (!(spec.values[i] > 0.0) || (i > 0 && !(spec.values[i] > spec.values[i - 1]))) {
      fail(path, node, "energies must be positive and strictly increasing");
    }
  }
  return spec;
}

PairPotentialDesc parse_pair_potential(const YAML::Node& node, const std::string& path) {
  require_map(node, path);
  reject_unknown(node, path, {"family", "strength", "range", "real", "imag"});
  PairPotentialDesc desc;
  if (node["family"]) desc.family = scalar<std::string>(node["family"], join(path, "family"));
  static const std::set<std::string> families{"random_hermitian", "separable", "gaussian",
                                              "matrix", "zero"};
  if (!families.count(desc.family)) {
    fail(join(path, "family"), node["family"],
         "expected random_hermitian|separable|gaussian|matrix|zero");
  }
  if (node["strength"]) desc.strength = finite_double(node["strength"], join(path, "strength"));
  if (node["range"]) {
    desc.range = finite_double(node["range"], join(path, "range"));
    if (!(desc.range > 0.0)) fail(join(path, "range"), node["range"], "must be > 0");
  }
  if (desc.family == "matrix") {
    if (!node["real"]) fail(join(path, "real"), node, "matrix family needs 'real'");
    desc.real = double_matrix(node["real"], join(path, "real"));
    if (node["imag"]) desc.imag = double_matrix(node["imag"], join(path, "imag"));
  } else if (node["real"] || node["imag"]) {
    fail(path, node, "'real'/'imag' are only valid for family: matrix");
  }
  return desc;
}

ModelDesc parse_model(const YAML::Node& node) {
  const std::string path = "model";
  require_map(node, path);
  reject_unknown(node, path, {"particles", "masses", "grids", "potentials"});
  ModelDesc desc;
  if (node["particles"]) desc.particles = scalar<int>(node["particles"], "model.particles");
  if (desc.particles < 3) fail("model.particles", node["particles"], "must be >= 3");
  if (desc.particles > 9) fail("model.particles", node["particles"], "must be <= 9");
  if (!node["grids"]) fail("model.grids", node, "missing required field");
  desc.grids = double_matrix(node["grids"], "model.grids");
  if (static_cast<int>(desc.grids.size()) != desc.particles) {
    fail("model.grids", node["grids"], "expected one grid per particle");
  }
  for (std::size_t l = 0; l < desc.grids.size(); ++l) {
    if (desc.grids[l].empty()) {
      fail("model.grids[" + std::to_string(l) + "]", node["grids"], "empty grid");
    }
  }
  if (node["masses"]) {
    desc.masses = double_list(node["masses"], "model.masses");
  } else {
    desc.masses.assign(static_cast<std::size_t>(desc.particles), 1.0);
  }
  if (static_cast<int>(desc.masses.size()) != desc.particles) {
    fail("model.masses", node["masses"], "expected one mass per particle");
  }
  for (double m : desc.masses) {
    if (!(m > 0.0)) fail("model.masses", node["masses"], "masses must be > 0");
  }
  if (node["potentials"]) {
    const YAML::Node pots = node["potentials"];
    require_map(pots, "model.potentials");
    for (const auto& kv : pots) {
      const auto key = kv.first.as<std::string>();
      const std::string sub = "model.potentials." + key;
      if (key != "all") {
        PairIndex alpha;
        try {
          alpha = PairIndex::from_label(key);
        } catch (const ModelError& err) {
          fail(sub, kv.first, err.what());
        }
        if (alpha.n >= desc.particles) fail(sub, kv.first, "pair refers to a missing particle");
      }
      desc.potentials[key] = parse_pair_potential(kv.second, sub);
    }
  }
  return desc;
}

ChannelDesc parse_channel(const YAML::Node& node) {
  const std::string path = "channel";
  require_map(node, path);
  reject_unknown(node, path, {"reduced_mass", "l", "potential", "nodes", "map_scale"});
  ChannelDesc desc;
  if (node["reduced_mass"]) {
    desc.reduced_mass = finite_double(node["reduced_mass"], "channel.reduced_mass");
  }
  if (!(desc.reduced_mass > 0.0)) {
    fail("channel.reduced_mass", node["reduced_mass"], "must be > 0");
  }
  if (node["l"]) desc.l = scalar<int>(node["l"], "channel.l");
  if (desc.l < 0) fail("channel.l", node["l"], "must be >= 0");
  if (node["nodes"]) desc.nodes = scalar<int>(node["nodes"], "channel.nodes");
  if (desc.nodes < 2) fail("channel.nodes", node["nodes"], "must be >= 2");
  if (node["map_scale"]) {
    desc.map_scale = finite_double(node["map_scale"], "channel.map_scale");
    if (desc.map_scale < 0.0) fail("channel.map_scale", node["map_scale"], "must be >= 0");
  }
  if (node["potential"]) {
    const YAML::Node pot = node["potential"];
    require_map(pot, "channel.potential");
    reject_unknown(pot, "channel.potential", {"family", "strength", "range"});
    if (pot["family"]) {
      desc.family = scalar<std::string>(pot["family"], "channel.potential.family");
    }
    try {
      const auto family = parse_potential_family(desc.family);
      if (family == PotentialFamily::custom_kernel) {
        throw ConfigError("custom kernels cannot be configured from a file");
      }
    } catch (const ConfigError& err) {
      fail("channel.potential.family", pot["family"], err.what());
    }
    if (pot["strength"]) {
      desc.strength = finite_double(pot["strength"], "channel.potential.strength");
    }
    if (pot["range"]) desc.range = finite_double(pot["range"], "channel.potential.range");
    if (!(desc.range > 0.0)) fail("channel.potential.range", pot["range"], "must be > 0");
  }
  if (desc.family == "yamaguchi" && desc.l != 0) {
    fail("channel.l", node["l"], "yamaguchi potential supports l = 0 only");
  }
  return desc;
}

constexpr const char* kModeTables[] = {"two-body", "few-body", "sweep", "validate"};

void emit_energies(YAML::Emitter& out, const EnergySpec& e) {
  out << YAML::BeginMap;
  if (e.geometric()) {
    out << YAML::Key << "start" << YAML::Value << *e.start;
    out << YAML::Key << "stop" << YAML::Value << *e.stop;
    out << YAML::Key << "count" << YAML::Value << *e.count;
  } else {
    out << YAML::Key << "values" << YAML::Value << YAML::Flow << e.values;
  }
  out << YAML::Key << "unit" << YAML::Value
      << (e.unit == EnergyUnit::scale ? "scale" : "absolute");
  out << YAML::EndMap;
}

}  // namespace

std::string_view to_string(RunMode mode) {
  switch (mode) {
    case RunMode::two_body: return "two-body";
    case RunMode::few_body: return "few-body";
    case RunMode::sweep: return "sweep";
    case RunMode::validate: return "validate";
  }
  return "sweep";
}

RunMode parse_run_mode(std::string_view text) {
  if (text == "two-body") return RunMode::two_body;
  if (text == "few-body") return RunMode::few_body;
  if (text == "sweep") return RunMode::sweep;
  if (text == "validate") return RunMode::validate;
  throw ConfigError("unknown mode '" + std::string(text) +
                    "' (expected two-body|few-body|sweep|validate)");
}

std::string_view to_string(ReportFormat format) {
  return format == ReportFormat::json ? "json" : "csv";
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "json") return ReportFormat::json;
  throw ConfigError("unknown output format '" + std::string(text) + "' (expected csv|json)");
}

std::vector<double> EnergySpec::expand() const {
  if (!geometric()) return values;
  return geometric_energies(*start, *stop, *count);
}

RunConfig parse_config(std::string_view text, const ConfigOverrides& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& err) {
    throw ConfigError("config is not valid YAML (line " + std::to_string(err.mark.line + 1) +
                      "): " + err.msg);
  }
  if (!root.IsMap()) throw ConfigError("config must be a YAML table at top level");
  reject_unknown(root, "", {"mode", "seed", "norm", "threads", "model", "channel", "output",
                            "two-body", "few-body", "sweep", "validate"});

  RunConfig cfg;
  if (overrides.mode) {
    cfg.mode = *overrides.mode;
  } else if (root["mode"]) {
    try {
      cfg.mode = parse_run_mode(scalar<std::string>(root["mode"], "mode"));
    } catch (const ConfigError& err) {
      fail("mode", root["mode"], err.what());
    }
  } else {
    int present = 0;
    for (const char* table : kModeTables) {
      if (root[table]) {
        ++present;
        cfg.mode = parse_run_mode(table);
      }
    }
    if (present != 1) {
      throw ConfigError("config field 'mode': missing, and the mode cannot be inferred "
                        "from a single mode table");
    }
  }

  if (root["seed"]) cfg.seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (root["norm"]) {
    try {
      cfg.norm = parse_norm_kind(scalar<std::string>(root["norm"], "norm"));
    } catch (const ConfigError& err) {
      fail("norm", root["norm"], err.what());
    }
  }
  if (root["threads"]) {
    cfg.threads = scalar<int>(root["threads"], "threads");
    if (cfg.threads < 1) fail("threads", root["threads"], "must be >= 1");
  }

  if (root["output"]) {
    const YAML::Node out = root["output"];
    require_map(out, "output");
    reject_unknown(out, "output", {"path", "format"});
    if (out["path"]) cfg.output_path = scalar<std::string>(out["path"], "output.path");
    if (out["format"]) {
      try {
        cfg.format = parse_report_format(scalar<std::string>(out["format"], "output.format"));
      } catch (const ConfigError& err) {
        fail("output.format", out["format"], err.what());
      }
    }
  }

  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.norm) cfg.norm = *overrides.norm;
  if (overrides.threads) {
    if (*overrides.threads < 1) throw ConfigError("config field 'threads': must be >= 1");
    cfg.threads = *overrides.threads;
  }
  if (overrides.output_path) cfg.output_path = *overrides.output_path;
  if (overrides.format) cfg.format = *overrides.format;

  const std::string table(to_string(cfg.mode));
  if (cfg.mode == RunMode::two_body) {
    if (!root["channel"]) fail("channel", root, "two-body mode needs a 'channel' table");
    cfg.channel = parse_channel(root["channel"]);
  } else {
    if (!root["model"]) fail("model", root, table + " mode needs a 'model' table");
    cfg.model = parse_model(root["model"]);
  }

  // Materialize the model once so potential errors surface at parse time.
  try {
    if (cfg.model) build_model(*cfg.model, cfg.seed);
    if (cfg.channel) build_channel(*cfg.channel, 1.0);
  } catch (const ModelError& err) {
    fail(cfg.model ? "model" : "channel", cfg.model ? root["model"] : root["channel"],
         err.what());
  }

  const YAML::Node mode_node = root[table];
  if (!mode_node) fail(table, root, "missing table for mode '" + table + "'");
  require_map(mode_node, table);
  reject_unknown(mode_node, table, {"energies", "eps", "pair_mode"});
  if (!mode_node["energies"]) fail(join(table, "energies"), mode_node, "missing required field");
  cfg.energies = parse_energies(mode_node["energies"], join(table, "energies"));

  if (mode_node["pair_mode"]) {
    try {
      cfg.pair_mode =
          parse_pair_mode(scalar<std::string>(mode_node["pair_mode"], join(table, "pair_mode")));
    } catch (const ConfigError& err) {
      fail(join(table, "pair_mode"), mode_node["pair_mode"], err.what());
    }
  }
  if (mode_node["eps"]) {
    cfg.eps = finite_double(mode_node["eps"], join(table, "eps"));
    if (!(cfg.eps > 0.0)) fail(join(table, "eps"), mode_node["eps"], "eps must be > 0");
  } else {
    try {
      cfg.eps = kDefaultEpsFraction * energy_scale(cfg);
    } catch (const Error& err) {
      fail(join(table, "eps"), mode_node, std::string("cannot derive default: ") + err.what());
    }
  }

  return cfg;
}

std::string emit_canonical(const RunConfig& cfg) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << std::string(to_string(cfg.mode));
  out << YAML::Key << "seed" << YAML::Value << cfg.seed;
  out << YAML::Key << "norm" << YAML::Value << std::string(to_string(cfg.norm));
  out << YAML::Key << "threads" << YAML::Value << cfg.threads;
  if (cfg.model) {
    const ModelDesc& m = *cfg.model;
    out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "particles" << YAML::Value << m.particles;
    out << YAML::Key << "masses" << YAML::Value << YAML::Flow << m.masses;
    out << YAML::Key << "grids" << YAML::Value << YAML::BeginSeq;
    for (const auto& g : m.grids) out << YAML::Flow << g;
    out << YAML::EndSeq;
    out << YAML::Key << "potentials" << YAML::Value << YAML::BeginMap;
    for (const auto& [key, p] : m.potentials) {
      out << YAML::Key << key << YAML::Value << YAML::BeginMap;
      out << YAML::Key << "family" << YAML::Value << p.family;
      out << YAML::Key << "strength" << YAML::Value << p.strength;
      out << YAML::Key << "range" << YAML::Value << p.range;
      if (p.family == "matrix") {
        out << YAML::Key << "real" << YAML::Value << YAML::BeginSeq;
        for (const auto& row : p.real) out << YAML::Flow << row;
        out << YAML::EndSeq;
        if (!p.imag.empty()) {
          out << YAML::Key << "imag" << YAML::Value << YAML::BeginSeq;
          for (const auto& row : p.imag) out << YAML::Flow << row;
          out << YAML::EndSeq;
        }
      }
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
    out << YAML::EndMap;
  }
  if (cfg.channel) {
    const ChannelDesc& c = *cfg.channel;
    out << YAML::Key << "channel" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "reduced_mass" << YAML::Value << c.reduced_mass;
    out << YAML::Key << "l" << YAML::Value << c.l;
    out << YAML::Key << "potential" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "family" << YAML::Value << c.family;
    out << YAML::Key << "strength" << YAML::Value << c.strength;
    out << YAML::Key << "range" << YAML::Value << c.range;
    out << YAML::EndMap;
    out << YAML::Key << "nodes" << YAML::Value << c.nodes;
    out << YAML::Key << "map_scale" << YAML::Value << c.map_scale;
    out << YAML::EndMap;
  }
  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "path" << YAML::Value << cfg.output_path;
  out << YAML::Key << "format" << YAML::Value << std::string(to_string(cfg.format));
  out << YAML::EndMap;
  out << YAML::Key << std::string(to_string(cfg.mode)) << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "energies" << YAML::Value;
  emit_energies(out, cfg.energies);
  out << YAML::Key << "eps" << YAML::Value << cfg.eps;
  out << YAML::Key << "pair_mode" << YAML::Value << std::string(to_string(cfg.pair_mode));
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string config_hash(const RunConfig& config) {
  RunConfig content = config;
  content.threads = 1;
  content.output_path.clear();
  content.format = ReportFormat::csv;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : emit_canonical(content)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ModelSpec build_model(const ModelDesc& desc, std::uint64_t seed) {
  ModelSpec spec;
  spec.n_particles = desc.particles;
  spec.masses = desc.masses;
  spec.grids = desc.grids;
  if (static_cast<int>(spec.masses.size()) != spec.n_particles ||
      static_cast<int>(spec.grids.size()) != spec.n_particles) {
    throw ModelError("model needs one mass and one grid per particle");
  }
  const auto default_it = desc.potentials.find("all");
  std::uint64_t ordinal = 0;
  for (PairIndex alpha : all_pairs(desc.particles)) {
    ++ordinal;
    const PairPotentialDesc* p = nullptr;
    if (auto it = desc.potentials.find(alpha.label()); it != desc.potentials.end()) {
      p = &it->second;
    } else if (default_it != desc.potentials.end()) {
      p = &default_it->second;
    }
    if (!p || p->family == "zero") continue;
    const Index d = spec.pair_dimension(alpha);
    Matrix v;
    if (p->family == "random_hermitian") {
      v = random_hermitian(d, p->strength, seed + 0x9e3779b97f4a7c15ULL * ordinal);
    } else if (p->family == "separable") {
      v = separable_pair_potential(spec, alpha, p->strength, p->range);
    } else if (p->family == "gaussian") {
      v = gaussian_pair_potential(spec, alpha, p->strength, p->range);
    } else if (p->family == "matrix") {
      if (static_cast<Index>(p->real.size()) != d ||
          (!p->imag.empty() && static_cast<Index>(p->imag.size()) != d)) {
        throw ModelError("matrix potential for pair " + alpha.label() + " must be " +
                         std::to_string(d) + "x" + std::to_string(d));
      }
      v = Matrix::Zero(d, d);
      for (Index i = 0; i < d; ++i) {
        if (static_cast<Index>(p->real[i].size()) != d ||
            (!p->imag.empty() && static_cast<Index>(p->imag[i].size()) != d)) {
          throw ModelError("matrix potential for pair " + alpha.label() + " has a short row");
        }
        for (Index j = 0; j < d; ++j) {
          v(i, j) = Complex(p->real[i][j], p->imag.empty() ? 0.0 : p->imag[i][j]);
        }
      }
    } else {
      throw ModelError("unknown pair potential family '" + p->family + "'");
    }
    spec.pair_potentials.emplace(alpha, std::move(v));
  }
  spec.validate();
  return spec;
}

TwoBodyChannel build_channel(const ChannelDesc& desc, double energy) {
  const PotentialModel potential =
      parse_potential_family(desc.family) == PotentialFamily::gaussian_local
          ? PotentialModel::gaussian(desc.strength, desc.range)
          : PotentialModel::yamaguchi(desc.strength, desc.range);
  return TwoBodyChannel::make(desc.reduced_mass, desc.l, potential, energy, desc.nodes,
                              desc.map_scale);
}

double energy_scale(const RunConfig& config) {
  if (config.mode == RunMode::two_body) {
    if (!config.channel) throw ConfigError("two-body config without channel");
    const ChannelDesc& c = *config.channel;
    return c.range * c.range / (2.0 * c.reduced_mass);
  }
  if (!config.model) throw ConfigError("few-body config without model");
  return pair_spectral_radius(build_model(*config.model, config.seed));
}

}  // namespace fewbody
