// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace sentigru {

enum class ErrorCode {
  kInvalidArgument,
  kShapeMismatch,
  kOutOfRange,
  kIo,
  kMalformedData,
  kFormat,
  kVersionMismatch,
  kChecksum,
  kIncompleteModel,
  kNonFinite,
};

/// Every failure raised by the core carries a category so the C layer can
/// map it onto a status code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sentigru
