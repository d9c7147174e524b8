#include "gcl/error.hpp"

namespace gcl {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::format: return "format";
    case ErrorKind::io: return "io";
    case ErrorKind::config: return "config";
    case ErrorKind::state: return "state";
    case ErrorKind::data: return "data";
  }
  return "unknown";
}

}  // namespace gcl
