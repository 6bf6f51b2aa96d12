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

#include <stdexcept>
#include <string>
#include <string_view>

namespace lda {

/// Machine-readable category carried by every library error. The CLI prints
/// it verbatim in its error payload.
enum class ErrorKind {
  kDomain,
  kStream,
  kState,
  kLevelOutOfRange,
  kDegenerateCorrection,
  kNumeric,
  kTruncation,
  kUnsupported,
  kInstability,
  kSupportViolation,
  kExtinction,
  kInvalidTarget,
  kConfig,
  kIo,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kStream: return "stream";
    case ErrorKind::kState: return "state";
    case ErrorKind::kLevelOutOfRange: return "level_out_of_range";
    case ErrorKind::kDegenerateCorrection: return "degenerate_correction";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kTruncation: return "truncation";
    case ErrorKind::kUnsupported: return "unsupported";
    case ErrorKind::kInstability: return "instability";
    case ErrorKind::kSupportViolation: return "support_violation";
    case ErrorKind::kExtinction: return "extinction";
    case ErrorKind::kInvalidTarget: return "invalid_target";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(ErrorKind::kDomain, what) {}
};

struct StreamError : Error {
  explicit StreamError(const std::string& what) : Error(ErrorKind::kStream, what) {}
};

struct StateError : Error {
  explicit StateError(const std::string& what) : Error(ErrorKind::kState, what) {}
};

struct LevelOutOfRangeError : Error {
  explicit LevelOutOfRangeError(const std::string& what) : Error(ErrorKind::kLevelOutOfRange, what) {}
};

struct DegenerateCorrectionError : Error {
  explicit DegenerateCorrectionError(const std::string& what)
      : Error(ErrorKind::kDegenerateCorrection, what) {}
};

/// Quadrature or root finding that did not reach its tolerance.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double achieved_tolerance)
      : Error(ErrorKind::kNumeric, what), achieved_(achieved_tolerance) {}

  [[nodiscard]] double achieved_tolerance() const noexcept { return achieved_; }

 private:
  double achieved_;
};

struct TruncationError : Error {
  explicit TruncationError(const std::string& what) : Error(ErrorKind::kTruncation, what) {}
};

struct UnsupportedError : Error {
  explicit UnsupportedError(const std::string& what) : Error(ErrorKind::kUnsupported, what) {}
};

struct InstabilityError : Error {
  explicit InstabilityError(const std::string& what) : Error(ErrorKind::kInstability, what) {}
};

struct SupportViolationError : Error {
  explicit SupportViolationError(const std::string& what) : Error(ErrorKind::kSupportViolation, what) {}
};

class ExtinctionError : public Error {
 public:
  ExtinctionError(const std::string& what, int level)
      : Error(ErrorKind::kExtinction, what), level_(level) {}

  [[nodiscard]] int level() const noexcept { return level_; }

 private:
  int level_;
};

struct InvalidTargetError : Error {
  explicit InvalidTargetError(const std::string& what) : Error(ErrorKind::kInvalidTarget, what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

}  // namespace lda
