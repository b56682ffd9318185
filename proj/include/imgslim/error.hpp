// Copyright 2026 The imgslim Authors
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
#include <vector>

namespace imgslim {

// Base class for every error raised by the library. The CLI maps the
// concrete subclasses onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed archive, manifest, config or tar stream.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Recomputed content digest differs from the recorded one.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that uses a schema or media type we do not handle.
class UnsupportedFormatError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Tar member escaping the virtual root.
class SecurityError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Strict-mode abort: exec sinks whose command could not be resolved.
class AnalysisError : public Error {
 public:
  using Error::Error;
};

// Internal invariant broken (e.g. retain list naming a path absent from the
// rootfs). Indicates a bug rather than bad input.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// Empty or otherwise unusable request (e.g. building an image from a rootfs
// tar without entries).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

enum class Severity { kInfo, kWarning };

struct Diagnostic {
  Severity severity = Severity::kWarning;
  std::string stage;
  std::string message;
};

// Collects non-fatal findings (skipped tar entries, unreadable files,
// unresolved libraries, symlink cycles) so callers can surface them.
class Diagnostics {
 public:
  void warn(std::string stage, std::string message);
  void info(std::string stage, std::string message);

  const std::vector<Diagnostic>& entries() const { return entries_; }
  std::size_t warning_count() const;
  bool empty() const { return entries_.empty(); }

  // Optional echo to stderr as entries are added.
  void set_echo(bool echo) { echo_ = echo; }

 private:
  std::vector<Diagnostic> entries_;
  bool echo_ = false;
};

// Null-safe helpers for the optional Diagnostics* parameters used across the
// library.
inline void warn(Diagnostics* diag, std::string stage, std::string message) {
  if (diag != nullptr) diag->warn(std::move(stage), std::move(message));
}

inline void info(Diagnostics* diag, std::string stage, std::string message) {
  if (diag != nullptr) diag->info(std::move(stage), std::move(message));
}

}  // namespace imgslim
