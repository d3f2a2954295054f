#pragma once

#include <stdexcept>
#include <string>

namespace farrank {

// Category of a failure, mapped to machine-parsable codes on the CLI
// surface (CONFIG -> exit 1, everything else -> exit 2).
enum class ErrorCode { config, io, data, internal };

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const { return code_; }

  const char* code_name() const {
    switch (code_) {
      case ErrorCode::config: return "CONFIG";
      case ErrorCode::io: return "IO";
      case ErrorCode::data: return "DATA";
      case ErrorCode::internal: return "INTERNAL";
    }
    return "INTERNAL";
  }

private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_config(std::string message) {
  throw Error(ErrorCode::config, std::move(message));
}

[[noreturn]] inline void throw_io(std::string message) {
  throw Error(ErrorCode::io, std::move(message));
}

[[noreturn]] inline void throw_data(std::string message) {
  throw Error(ErrorCode::data, std::move(message));
}

}  // namespace farrank
