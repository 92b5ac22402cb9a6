// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#include "kgmg/errors.hpp"

namespace kgmg {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Domain: return "domain error";
    case ErrorCode::Conditioning: return "conditioning error";
    case ErrorCode::Capacity: return "capacity error";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::InsufficientData: return "insufficient data";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::SizeGuard: return "size guard exceeded";
    case ErrorCode::Internal: return "internal error";
  }
  return "unknown error";
}

}  // namespace kgmg
