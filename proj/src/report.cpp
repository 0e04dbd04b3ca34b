/*
 * Copyright 2026 The gpkrr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gpkrr/report.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "gpkrr/error.hpp"

namespace gpkrr {

namespace {

using Json = nlohmann::ordered_json;

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double read_number(const Json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error(ErrorKind::ParseError, "bad number '" + s + "'");
  }
  return j.get<double>();
}

Json optional_number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

std::optional<double> read_optional_number(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return read_number(j);
}

Json config_json(const ExperimentConfig& c) {
  Json j;
  j["kernel"] = {{"family", c.kernel.family},
                 {"gamma", number(c.kernel.gamma)},
                 {"degree", c.kernel.degree},
                 {"offset", number(c.kernel.offset)}};
  j["n"] = c.n;
  j["d"] = c.d;
  j["m"] = c.m;
  j["noise_var"] = optional_number(c.noise_var);
  j["ridge"] = optional_number(c.ridge);
  j["link_noise_ridge"] = c.link_noise_ridge;
  j["selection"] = to_string(c.selection);
  j["seed"] = c.seed;
  j["mc_samples"] = c.mc_samples;
  j["csv_path"] = c.csv_path ? Json(*c.csv_path) : Json(nullptr);
  j["input_low"] = number(c.input_low);
  j["input_high"] = number(c.input_high);
  j["max_target_norm"] = number(c.max_target_norm);
  j["grid_points"] = c.grid_points;
  j["probe_points"] = c.probe_points;
  j["derivative_pairs"] = c.derivative_pairs;
  j["random_states"] = c.random_states;
  j["perturbations"] = c.perturbations;
  j["tolerances"] = {{"identity", number(c.tolerances.identity)},
                     {"solver", number(c.tolerances.solver)},
                     {"gradient", number(c.tolerances.gradient)}};
  return j;
}

ExperimentConfig read_config(const Json& j) {
  ExperimentConfig c;
  const Json& k = j.at("kernel");
  c.kernel.family = k.at("family").get<std::string>();
  c.kernel.gamma = read_number(k.at("gamma"));
  c.kernel.degree = k.at("degree").get<int>();
  c.kernel.offset = read_number(k.at("offset"));
  c.n = j.at("n").get<Index>();
  c.d = j.at("d").get<Index>();
  c.m = j.at("m").get<Index>();
  c.noise_var = read_optional_number(j.at("noise_var"));
  c.ridge = read_optional_number(j.at("ridge"));
  c.link_noise_ridge = j.at("link_noise_ridge").get<bool>();
  c.selection = parse_selection(j.at("selection").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  c.mc_samples = j.at("mc_samples").get<Index>();
  if (!j.at("csv_path").is_null()) c.csv_path = j.at("csv_path").get<std::string>();
  c.input_low = read_number(j.at("input_low"));
  c.input_high = read_number(j.at("input_high"));
  c.max_target_norm = read_number(j.at("max_target_norm"));
  c.grid_points = j.at("grid_points").get<Index>();
  c.probe_points = j.at("probe_points").get<Index>();
  c.derivative_pairs = j.at("derivative_pairs").get<Index>();
  c.random_states = j.at("random_states").get<Index>();
  c.perturbations = j.at("perturbations").get<Index>();
  const Json& t = j.at("tolerances");
  c.tolerances.identity = read_number(t.at("identity"));
  c.tolerances.solver = read_number(t.at("solver"));
  c.tolerances.gradient = read_number(t.at("gradient"));
  return c;
}

Json record_json(const BoundRecord& r) {
  return {{"name", r.name},
          {"kind", to_string(r.kind)},
          {"lhs", number(r.lhs)},
          {"rhs", number(r.rhs)},
          {"slack", number(r.slack)},
          {"tolerance", number(r.tolerance)},
          {"holds", r.holds},
          {"enforced", r.enforced}};
}

BoundRecord read_record(const Json& j) {
  BoundRecord r;
  r.name = j.at("name").get<std::string>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "bound") {
    r.kind = RecordKind::Bound;
  } else if (kind == "identity") {
    r.kind = RecordKind::Identity;
  } else {
    throw Error(ErrorKind::ParseError, "unknown record kind '" + kind + "'");
  }
  r.lhs = read_number(j.at("lhs"));
  r.rhs = read_number(j.at("rhs"));
  r.slack = read_number(j.at("slack"));
  r.tolerance = read_number(j.at("tolerance"));
  r.holds = j.at("holds").get<bool>();
  r.enforced = j.at("enforced").get<bool>();
  return r;
}

std::string to_json(const VerificationReport& report, const EmitOptions& opts) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["config"] = config_json(report.config);
  if (report.resolved) {
    j["resolved"] = {{"noise_var", number(report.resolved->noise_var)},
                     {"ridge", number(report.resolved->ridge)}};
  } else {
    j["resolved"] = nullptr;
  }
  j["setup_error"] = report.setup_error.empty() ? Json(nullptr) : Json(report.setup_error);
  j["overall_pass"] = report.overall_pass();
  Json entries = Json::array();
  for (const CheckEntry& e : report.entries) {
    Json je;
    je["name"] = e.name;
    je["status"] = to_string(e.status);
    je["error"] = e.error.empty() ? Json(nullptr) : Json(e.error);
    Json records = Json::array();
    for (const BoundRecord& r : e.records) records.push_back(record_json(r));
    je["records"] = std::move(records);
    if (opts.timings) je["seconds"] = number(e.seconds);
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(6) << std::scientific << v;
  return out.str();
}

std::string to_text(const VerificationReport& report) {
  std::ostringstream out;
  out << "gpkrr verification (schema " << kReportSchemaVersion << ")\n";
  out << "kernel " << report.config.kernel.family << "  m " << report.config.m << "  seed "
      << report.config.seed;
  if (report.resolved) {
    out << "  noise_var " << fmt(report.resolved->noise_var) << "  ridge "
        << fmt(report.resolved->ridge);
  }
  out << "\n";
  if (!report.setup_error.empty()) out << "setup error: " << report.setup_error << "\n";
  for (const CheckEntry& e : report.entries) {
    std::string status = e.status == CheckStatus::Pass   ? "PASS"
                         : e.status == CheckStatus::Fail ? "FAIL"
                                                         : "SKIP";
    out << std::left << std::setw(34) << e.name << " " << status << "  "
        << std::fixed << std::setprecision(3) << e.seconds << "s";
    out.unsetf(std::ios::floatfield);
    if (!e.error.empty()) out << "  error: " << e.error;
    out << "\n";
    for (const BoundRecord& r : e.records) {
      out << "    " << std::left << std::setw(44) << r.name << " lhs " << fmt(r.lhs) << "  rhs "
          << fmt(r.rhs) << "  slack " << fmt(r.slack) << "  " << (r.holds ? "holds" : "violated")
          << (r.enforced ? "" : " (not enforced)") << "\n";
    }
  }
  out << "overall " << (report.overall_pass() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "text") return ReportFormat::Text;
  throw Error(ErrorKind::InvalidArgument, "unknown report format '" + name + "'");
}

std::string emit_report(const VerificationReport& report, ReportFormat format,
                        const EmitOptions& opts) {
  return format == ReportFormat::Json ? to_json(report, opts) : to_text(report);
}

VerificationReport parse_report_json(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw Error(ErrorKind::ParseError, "unsupported schema_version");
    }
    VerificationReport report;
    report.config = read_config(j.at("config"));
    if (!j.at("resolved").is_null()) {
      report.resolved = NoiseRidge{read_number(j.at("resolved").at("noise_var")),
                                   read_number(j.at("resolved").at("ridge"))};
    }
    if (!j.at("setup_error").is_null()) report.setup_error = j.at("setup_error").get<std::string>();
    for (const Json& je : j.at("entries")) {
      CheckEntry e;
      e.name = je.at("name").get<std::string>();
      e.status = parse_check_status(je.at("status").get<std::string>());
      if (!je.at("error").is_null()) e.error = je.at("error").get<std::string>();
      for (const Json& jr : je.at("records")) e.records.push_back(read_record(jr));
      if (je.contains("seconds")) e.seconds = read_number(je.at("seconds"));
      report.entries.push_back(std::move(e));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("malformed report: ") + e.what());
  }
}

}  // namespace gpkrr
