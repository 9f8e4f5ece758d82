#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace digestweaver {

enum class ErrorCode {
  Schema,         // malformed input document
  DupRank,        // two result entries share a rank
  EmptyQuery,     // query is blank after trimming
  NotOk,          // operation requires a successfully fetched page
  StoreCorrupt,   // profile store cannot be parsed
  Io,             // filesystem or network I/O failure
  NoTokens,       // template has no {{SEGMENT}} slot
  InvalidConfig,  // configuration value outside its bounds
};

std::string_view to_string(ErrorCode code);

/// Exception carrying one of the library's error codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace digestweaver
