#pragma once

#include <map>
#include <string>

namespace litrev {

// Output of any summarization backend.
struct SummaryResult {
  std::string summary;
  std::string backend_id;
  bool degenerate = false;
  std::map<std::string, std::string> diagnostics;
};

}  // namespace litrev
