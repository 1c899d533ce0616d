// fewbody: command line front end.
//
//   fewbody <two-body|few-body|sweep|validate> --config FILE [--output FILE]
//           [--format csv|json] [--seed N] [--norm frobenius|spectral]
//           [--threads N]
//
// Exit codes: 0 success, 1 a row failed or a validation check failed,
// 2 usage or configuration error, 3 I/O error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fewbody/config.hpp"
#include "fewbody/error.hpp"
#include "fewbody/report.hpp"
#include "fewbody/run.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct Options {
  std::string config_path;
  std::string output_path;
  std::string format;
  std::string norm;
  std::uint64_t seed = 0;
  int threads = 0;
};

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config_path, "YAML run configuration")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--output", opt.output_path, "report path (default: stdout)");
  sub->add_option("--format", opt.format, "report format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--seed", opt.seed, "seed for random pair potentials");
  sub->add_option("--norm", opt.norm, "operator norm")
      ->check(CLI::IsMember({"frobenius", "spectral"}));
  sub->add_option("--threads", opt.threads, "worker threads for energy points")
      ->check(CLI::PositiveNumber);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Few-body scattering toolkit"};
  app.set_version_flag("--version", std::string(fewbody::version()));
  app.require_subcommand(1);

  Options opt;
  for (const char* name : {"two-body", "few-body", "sweep", "validate"}) {
    add_common(app.add_subcommand(name, std::string(name) + " run"), opt);
  }
  app.get_subcommand("two-body")->description("on-shell two-body amplitudes over energies");
  app.get_subcommand("few-body")->description("exact and asymptotic few-body solutions");
  app.get_subcommand("sweep")->description("asymptotic-error sweep over energies");
  app.get_subcommand("validate")->description("exact identities on a model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? 0 : kExitUsage;
  }

  const CLI::App* sub = app.get_subcommands().front();
  fewbody::ConfigOverrides overrides;
  overrides.mode = fewbody::parse_run_mode(sub->get_name());
  if (sub->count("--seed")) overrides.seed = opt.seed;
  if (sub->count("--threads")) overrides.threads = opt.threads;
  if (!opt.norm.empty()) overrides.norm = fewbody::parse_norm_kind(opt.norm);
  if (!opt.format.empty()) overrides.format = fewbody::parse_report_format(opt.format);
  if (!opt.output_path.empty()) overrides.output_path = opt.output_path;

  std::string text;
  try {
    text = read_file(opt.config_path);
  } catch (const std::exception& err) {
    std::cerr << "fewbody: " << err.what() << '\n';
    return kExitIo;
  }

  fewbody::RunConfig config;
  try {
    config = fewbody::parse_config(text, overrides);
  } catch (const fewbody::Error& err) {
    std::cerr << "fewbody: " << opt.config_path << ": " << err.what() << '\n';
    return kExitUsage;
  }

  fewbody::RunOutcome outcome;
  std::string bytes;
  try {
    outcome = fewbody::run(config);
    bytes = fewbody::emit_report(outcome.report, config.format);
  } catch (const fewbody::Error& err) {
    std::cerr << "fewbody: " << fewbody::error_code(err) << ": " << err.what() << '\n';
    return 1;
  }

  for (const auto& row : outcome.report.rows) {
    if (!row.ok) std::cerr << "fewbody: " << row.error_code << ": " << row.error_message << '\n';
  }

  if (config.output_path.empty()) {
    std::cout << bytes;
    std::cout.flush();
    if (!std::cout) return kExitIo;
  } else {
    try {
      fewbody::write_atomically(config.output_path, bytes);
    } catch (const fewbody::Error& err) {
      std::cerr << "fewbody: " << err.what() << '\n';
      return kExitIo;
    }
  }
  return outcome.exit_code;
}
