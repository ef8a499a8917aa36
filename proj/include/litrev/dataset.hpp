#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace litrev {

// One SciTLDR-style example. Only `source` and `targets` are consumed; any
// other keys on the line are kept in `extra_fields` so a split round-trips.
struct TldrRecord {
  std::string paper_id;
  std::vector<std::string> source;
  std::vector<std::string> targets;
  nlohmann::json extra_fields = nlohmann::json::object();

  friend bool operator==(const TldrRecord&, const TldrRecord&) = default;
};

struct DatasetSplit {
  std::string name;  // train | validation | test
  std::vector<TldrRecord> records;
};

// Reads a JSONL split. "target" may be a string or an array of strings;
// a missing "paper_id" becomes "line-N". Every invalid line is reported in a
// single schema error.
DatasetSplit load_jsonl_split(const std::filesystem::path& path, std::string_view split_name);
DatasetSplit parse_jsonl_split(std::istream& in, std::string_view split_name);

void write_jsonl_split(std::ostream& out, const DatasetSplit& split);

// Source sentences joined with single spaces.
std::string aic_source_text(const TldrRecord& record);

}  // namespace litrev
