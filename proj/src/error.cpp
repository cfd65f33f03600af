#include "spca/error.hpp"

namespace spca {

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parameter:
      return 1;
    case ErrorKind::numerical:
    case ErrorKind::construction:
      return 2;
    case ErrorKind::io:
      return 3;
  }
  return 2;
}

}  // namespace spca
