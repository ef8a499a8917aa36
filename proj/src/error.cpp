#include "litrev/error.hpp"

namespace litrev {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::io: return "io";
    case ErrorKind::schema: return "schema";
    case ErrorKind::validation: return "validation";
    case ErrorKind::not_found: return "not_found";
    case ErrorKind::transport: return "transport";
    case ErrorKind::request: return "request";
    case ErrorKind::protocol: return "protocol";
    case ErrorKind::config: return "config";
    case ErrorKind::extraction: return "extraction";
    case ErrorKind::entry_skipped: return "entry_skipped";
  }
  return "unknown";
}

}  // namespace litrev
