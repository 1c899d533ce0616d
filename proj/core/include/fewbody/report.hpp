#pragma once

// Tabular run reports and their CSV / JSON encodings.
//
// CSV layout (docs/report.md is the compatibility reference):
//   config_hash,tool_version,seed,energy,status,error_code,<numeric columns...>
// one header line, one line per row, no trailing metadata. Numbers use
// "%.17g" so that re-parsing recovers every double bit for bit. Failed rows
// leave the numeric fields empty.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fewbody/config.hpp"

namespace fewbody {

std::string_view version();

struct ReportRow {
  double energy = 0.0;
  bool ok = true;
  std::string error_code;     // empty when ok
  std::string error_message;  // JSON only
  std::vector<double> values; // one per column when ok, empty otherwise

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct SweepReport {
  std::string mode;
  std::string config_hash;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::vector<std::string> columns;
  std::vector<ReportRow> rows;  // ascending energy
  /// Free-form scalar metadata (JSON only), e.g. energy scale, slope.
  std::vector<std::pair<std::string, double>> metadata;

  friend bool operator==(const SweepReport&, const SweepReport&) = default;

  /// Index of a column; throws std::out_of_range if absent.
  std::size_t column(std::string_view name) const;
  /// Throws Error if rows are unsorted, widths disagree or values are non-finite.
  void validate() const;
};

/// Encodes the report. CSV ignores `metadata` and error messages.
std::string emit_report(const SweepReport& report, ReportFormat format);

/// Parses a CSV produced by emit_report. Metadata and messages are not
/// recoverable; mode is left empty.
SweepReport parse_csv_report(std::string_view text);

/// "%.17g".
std::string format_double(double value);

/// Writes `bytes` to `path` through a temporary file and rename.
void write_atomically(const std::string& path, std::string_view bytes);

}  // namespace fewbody
