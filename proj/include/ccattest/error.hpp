#pragma once

#include <stdexcept>
#include <string>

namespace ccattest {

enum class Errc {
  kMalformedRecord,
  kChecksumMismatch,
  kAddressOverflow,
  kEmptyImage,
  kIo,
  kCapacityExceeded,
  kUnknownCodec,
  kUnsupportedBlockSize,
  kLatOverflow,
  kIndexOutOfRange,
  kCorruptBlock,
  kOptionMismatch,
  kNonceExhausted,
  kInfeasiblePlan,
  kCalibrationFailure,
  kBadConfig,
  kInvalidArgument,
};

const char* to_string(Errc code);

// Every library failure is reported through this type; `code()` is what
// callers (and the CLI exit-status mapping) branch on.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ccattest
