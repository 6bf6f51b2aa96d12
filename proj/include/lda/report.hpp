// Copyright 2026 The lda-particles Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lda/errors.hpp"

namespace lda {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportCsvHeader = "alpha,method,var,var_lo,var_hi,es,srm,stderr";

struct ReportRow {
  double alpha = 0.0;
  std::string method;
  std::optional<double> var;
  std::optional<double> var_lo;
  std::optional<double> var_hi;
  std::optional<double> es;
  std::optional<double> srm;
  std::optional<double> std_error;

  bool operator==(const ReportRow&) const = default;
};

struct RiskReport {
  /// Insertion-ordered metadata.
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<ReportRow> rows;

  void set_meta(const std::string& key, const std::string& value) {
    for (auto& [k, v] : meta) {
      if (k == key) {
        v = value;
        return;
      }
    }
    meta.emplace_back(key, value);
  }

  [[nodiscard]] std::optional<std::string> get_meta(const std::string& key) const {
    for (const auto& [k, v] : meta) {
      if (k == key) {
        return v;
      }
    }
    return std::nullopt;
  }

  [[nodiscard]] std::vector<ReportRow> rows_for(const std::string& method) const {
    std::vector<ReportRow> out;
    for (const auto& r : rows) {
      if (r.method == method) {
        out.push_back(r);
      }
    }
    return out;
  }

  bool operator==(const RiskReport&) const = default;
};

/// Six significant digits.
inline std::string format6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

/// The value a field takes after a trip through the report formats.
inline double round6(double x) { return std::strtod(format6(x).c_str(), nullptr); }

inline std::string format_field(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? format6(*v) : "n/a";
}

/// Rows whose VaR decreases as alpha increases within one method.
inline std::vector<std::string> report_violations(const RiskReport& r) {
  std::vector<std::string> out;
  std::map<std::string, std::pair<double, double>> last;
  for (const auto& row : r.rows) {
    if (!row.var) {
      continue;
    }
    auto it = last.find(row.method);
    if (it != last.end() && row.alpha >= it->second.first && *row.var < it->second.second) {
      out.push_back(row.method + ": VaR decreases at alpha " + format6(row.alpha));
    }
    last[row.method] = {row.alpha, *row.var};
  }
  return out;
}

inline std::string report_to_csv(const RiskReport& r) {
  std::string s = kReportCsvHeader;
  s += '\n';
  for (const auto& row : r.rows) {
    s += format6(row.alpha) + ',' + row.method + ',' + format_field(row.var) + ',' + format_field(row.var_lo) + ',' +
         format_field(row.var_hi) + ',' + format_field(row.es) + ',' + format_field(row.srm) + ',' +
         format_field(row.std_error) + '\n';
  }
  return s;
}

namespace detail {

inline nlohmann::ordered_json json_field(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) {
    return round6(*v);
  }
  return "n/a";
}

inline std::optional<double> parse_field(const std::string& s) {
  if (s == "n/a") {
    return std::nullopt;
  }
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw IoError("report: cannot parse number '" + s + "'");
  }
  return v;
}

inline std::optional<double> parse_field(const nlohmann::ordered_json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "n/a") {
      throw IoError("report: unexpected string field " + j.dump());
    }
    return std::nullopt;
  }
  if (!j.is_number()) {
    throw IoError("report: expected number or \"n/a\", got " + j.dump());
  }
  return j.get<double>();
}

}  // namespace detail

inline std::string report_to_json(const RiskReport& r) {
  nlohmann::ordered_json j;
  j["meta"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.meta) {
    j["meta"][k] = v;
  }
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json o;
    o["alpha"] = round6(row.alpha);
    o["method"] = row.method;
    o["var"] = detail::json_field(row.var);
    o["var_lo"] = detail::json_field(row.var_lo);
    o["var_hi"] = detail::json_field(row.var_hi);
    o["es"] = detail::json_field(row.es);
    o["srm"] = detail::json_field(row.srm);
    o["stderr"] = detail::json_field(row.std_error);
    j["rows"].push_back(std::move(o));
  }
  return j.dump(2) + "\n";
}

inline RiskReport report_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kReportCsvHeader) {
    throw IoError("report: missing CSV header");
  }
  RiskReport r;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      f.push_back(cell);
    }
    if (f.size() != 8) {
      throw IoError("report: expected 8 CSV fields in '" + line + "'");
    }
    ReportRow row;
    row.alpha = detail::parse_field(f[0]).value_or(NAN);
    row.method = f[1];
    row.var = detail::parse_field(f[2]);
    row.var_lo = detail::parse_field(f[3]);
    row.var_hi = detail::parse_field(f[4]);
    row.es = detail::parse_field(f[5]);
    row.srm = detail::parse_field(f[6]);
    row.std_error = detail::parse_field(f[7]);
    r.rows.push_back(std::move(row));
  }
  return r;
}

inline RiskReport report_from_json(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("report: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("meta") || !j.contains("rows")) {
    throw IoError("report: JSON needs top-level \"meta\" and \"rows\"");
  }
  RiskReport r;
  for (const auto& [k, v] : j["meta"].items()) {
    r.meta.emplace_back(k, v.get<std::string>());
  }
  for (const auto& o : j["rows"]) {
    ReportRow row;
    row.alpha = o.at("alpha").get<double>();
    row.method = o.at("method").get<std::string>();
    row.var = detail::parse_field(o.at("var"));
    row.var_lo = detail::parse_field(o.at("var_lo"));
    row.var_hi = detail::parse_field(o.at("var_hi"));
    row.es = detail::parse_field(o.at("es"));
    row.srm = detail::parse_field(o.at("srm"));
    row.std_error = detail::parse_field(o.at("stderr"));
    r.rows.push_back(std::move(row));
  }
  return r;
}

enum class ReportFormat { Csv, Json };

inline std::string render_report(const RiskReport& r, ReportFormat format) {
  return format == ReportFormat::Csv ? report_to_csv(r) : report_to_json(r);
}

inline void emit_report(const RiskReport& r, ReportFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  out << render_report(r, format);
  if (!out) {
    throw IoError("write failed for " + path);
  }
}

}  // namespace lda
