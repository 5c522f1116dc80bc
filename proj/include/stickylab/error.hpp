#pragma once

#include <stdexcept>
#include <string>

namespace stickylab {

enum class ErrorKind {
  input,         // malformed numeric input (non-finite values, bad sizes)
  config,        // invalid or inconsistent configuration
  numerical,     // blow-up or non-finite state during integration
  iteration,     // fixed-point iteration failed to converge
  precondition,  // operation called outside its domain of validity
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace stickylab
