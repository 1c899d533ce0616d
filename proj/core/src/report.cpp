#include "fewbody/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "fewbody/error.hpp"

#ifndef FEWBODY_VERSION_STRING
#define FEWBODY_VERSION_STRING "0.0.0"
#endif

namespace fewbody {

namespace {

constexpr const char* kKeyColumns[] = {"config_hash", "tool_version", "seed",
                                       "energy",      "status",       "error_code"};
constexpr std::size_t kKeyCount = std::size(kKeyColumns);

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_double(const std::string& text) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw Error("report: bad number '" + text + "'");
  }
  return value;
}

}  // namespace

std::string_view version() { return FEWBODY_VERSION_STRING; }

std::size_t SweepReport::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("no report column " + std::string(name));
  return static_cast<std::size_t>(it - columns.begin());
}

void SweepReport::validate() const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ReportRow& row = rows[i];
    if (i > 0 && rows[i - 1].energy > row.energy) {
      throw Error("report rows are not sorted by energy");
    }
    if (row.ok && row.values.size() != columns.size()) {
      throw Error("report row width does not match the column count");
    }
    if (!std::isfinite(row.energy)) throw Error("non-finite report energy");
    for (double v : row.values) {
      if (!std::isfinite(v)) throw Error("non-finite report value");
    }
  }
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string emit_report(const SweepReport& report, ReportFormat format) {
  report.validate();
  if (format == ReportFormat::csv) {
    std::string out;
    for (std::size_t k = 0; k < kKeyCount; ++k) {
      if (k) out += ',';
      out += kKeyColumns[k];
    }
    for (const auto& c : report.columns) out += "," + c;
    out += '\n';
    for (const auto& row : report.rows) {
      out += report.config_hash + ',' + report.tool_version + ',' +
             std::to_string(report.seed) + ',' + format_double(row.energy) + ',' +
             (row.ok ? "ok" : "failed") + ',' + row.error_code;
      if (row.ok) {
        for (double v : row.values) out += ',' + format_double(v);
      } else {
        out += std::string(report.columns.size(), ',');
      }
      out += '\n';
    }
    return out;
  }

  nlohmann::ordered_json doc;
  doc["mode"] = report.mode;
  doc["config_hash"] = report.config_hash;
  doc["tool_version"] = report.tool_version;
  doc["seed"] = report.seed;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.metadata) meta[key] = value;
  doc["metadata"] = meta;
  doc["columns"] = report.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json r;
    r["energy"] = row.energy;
    r["status"] = row.ok ? "ok" : "failed";
    if (!row.ok) {
      r["error_code"] = row.error_code;
      r["error"] = row.error_message;
    } else {
      nlohmann::ordered_json values = nlohmann::ordered_json::object();
      for (std::size_t c = 0; c < report.columns.size(); ++c) {
        values[report.columns[c]] = row.values[c];
      }
      r["values"] = values;
    }
    rows.push_back(std::move(r));
  }
  doc["rows"] = rows;
  return doc.dump(2) + "\n";
}

SweepReport parse_csv_report(std::string_view text) {
  SweepReport report;
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t nl = text.find('\n', start);
    lines.push_back(text.substr(start, nl - start));
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  if (lines.empty()) throw Error("report: empty CSV");
  const auto header = split_csv_line(lines[0]);
  if (header.size() < kKeyCount) throw Error("report: short CSV header");
  for (std::size_t k = 0; k < kKeyCount; ++k) {
    if (header[k] != kKeyColumns[k]) throw Error("report: unexpected CSV header");
  }
  report.columns.assign(header.begin() + kKeyCount, header.end());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != header.size()) throw Error("report: ragged CSV row");
    report.config_hash = fields[0];
    report.tool_version = fields[1];
    report.seed = std::stoull(fields[2]);
    ReportRow row;
    row.energy = parse_double(fields[3]);
    row.ok = fields[4] == "ok";
    row.error_code = fields[5];
    if (row.ok) {
      for (std::size_t c = kKeyCount; c < fields.size(); ++c) {
        row.values.push_back(parse_double(fields[c]));
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_atomically(const std::string& path, std::string_view bytes) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move report into place at '" + path + "'");
  }
}

}  // namespace fewbody
