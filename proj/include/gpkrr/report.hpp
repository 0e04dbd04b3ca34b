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

#ifndef GPKRR_REPORT_HPP
#define GPKRR_REPORT_HPP

#include <string>

#include "gpkrr/harness.hpp"

namespace gpkrr {

enum class ReportFormat { Json, Text };

ReportFormat parse_report_format(const std::string& name);

struct EmitOptions {
  /// Wall-clock seconds per check; off by default so that JSON output is a
  /// pure function of the config.
  bool timings = false;
};

inline constexpr int kReportSchemaVersion = 1;

/// JSON keys appear in a fixed order and floats in shortest round-trip form;
/// non-finite values are written as the strings "nan", "inf" and "-inf".
std::string emit_report(const VerificationReport& report, ReportFormat format,
                        const EmitOptions& opts = {});

/// Inverse of the JSON form; throws ParseError on malformed input.
VerificationReport parse_report_json(const std::string& text);

}  // namespace gpkrr

#endif  // GPKRR_REPORT_HPP
