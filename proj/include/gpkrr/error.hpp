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

#ifndef GPKRR_ERROR_HPP
#define GPKRR_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace gpkrr {

enum class ErrorKind {
  FactorizationFailed,
  DimensionMismatch,
  NoConvergence,
  UnsupportedKernel,
  InvalidCount,
  InvalidArgument,
  PointCollision,
  InternalInconsistency,
  ParseError,
  EmptyFile,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::FactorizationFailed: return "FactorizationFailed";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::UnsupportedKernel: return "UnsupportedKernel";
    case ErrorKind::InvalidCount: return "InvalidCount";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::PointCollision: return "PointCollision";
    case ErrorKind::InternalInconsistency: return "InternalInconsistency";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptyFile: return "EmptyFile";
  }
  return "Unknown";
}

}  // namespace gpkrr

#endif  // GPKRR_ERROR_HPP
