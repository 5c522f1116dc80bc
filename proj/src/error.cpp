#include "stickylab/error.hpp"

namespace stickylab {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::input: return "input";
    case ErrorKind::config: return "config";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::iteration: return "iteration";
    case ErrorKind::precondition: return "precondition";
  }
  return "unknown";
}

}  // namespace stickylab
