#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace litrev {

enum class ErrorKind {
  invalid_argument,
  io,
  schema,
  validation,
  not_found,
  transport,
  request,
  protocol,
  config,
  extraction,
  entry_skipped,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library. `kind` is what callers branch on;
// `origin` names the backend or component that raised it, when known.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string origin = {})
      : std::runtime_error(message), kind_(kind), origin_(std::move(origin)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& origin() const noexcept { return origin_; }

 private:
  ErrorKind kind_;
  std::string origin_;
};

}  // namespace litrev
