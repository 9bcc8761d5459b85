#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace gnslab {

// Every domain failure carries a stable machine-readable code plus a
// human-readable message; the CLI maps codes into report records.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace gnslab
