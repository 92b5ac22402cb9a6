// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace kgmg {

enum class ErrorCode {
  InvalidArgument,
  Parse,
  Domain,
  Conditioning,
  Capacity,
  Unsupported,
  InsufficientData,
  Io,
  SizeGuard,
  Internal,
};

const char* to_string(ErrorCode code) noexcept;

/// Library-wide exception. Every failure surfaced by kgmg carries a code so
/// the C API can translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace kgmg
