#include "litrev/dataset.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "litrev/error.hpp"
#include "litrev/textcore.hpp"

namespace litrev {

namespace {

bool valid_split_name(std::string_view name) {
  return name == "train" || name == "validation" || name == "test";
}

// Returns an empty string on success, otherwise the reason the line was rejected.
std::string parse_record(const std::string& line, std::size_t line_no, TldrRecord& record) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    return std::string("invalid JSON (") + e.what() + ")";
  }
  if (!j.is_object()) return "line is not a JSON object";

  auto source = j.find("source");
  if (source == j.end()) return "missing \"source\"";
  if (!source->is_array()) return "\"source\" must be an array of strings";
  if (source->empty()) return "\"source\" is empty";
  for (const auto& s : *source) {
    if (!s.is_string()) return "\"source\" must be an array of strings";
    record.source.push_back(normalize_nfc(s.get<std::string>()));
  }

  auto target = j.find("target");
  if (target == j.end()) return "missing \"target\"";
  if (target->is_string()) {
    record.targets.push_back(normalize_nfc(target->get<std::string>()));
  } else if (target->is_array()) {
    for (const auto& t : *target) {
      if (!t.is_string()) return "\"target\" must be a string or an array of strings";
      record.targets.push_back(normalize_nfc(t.get<std::string>()));
    }
  } else {
    return "\"target\" must be a string or an array of strings";
  }
  if (record.targets.empty()) return "\"target\" is empty";
  for (const auto& t : record.targets)
    if (trim(t).empty()) return "\"target\" contains an empty summary";

  if (auto id = j.find("paper_id"); id != j.end()) {
    if (id->is_string()) {
      record.paper_id = id->get<std::string>();
    } else if (id->is_number_integer()) {
      record.paper_id = std::to_string(id->get<long long>());
    } else {
      return "\"paper_id\" must be a string";
    }
  } else {
    record.paper_id = "line-" + std::to_string(line_no);
  }

  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "source" || it.key() == "target" || it.key() == "paper_id") continue;
    record.extra_fields[it.key()] = it.value();
  }
  return {};
}

}  // namespace

DatasetSplit parse_jsonl_split(std::istream& in, std::string_view split_name) {
  if (!valid_split_name(split_name))
    throw Error(ErrorKind::invalid_argument,
                "split name must be train, validation or test, got '" + std::string(split_name) + "'",
                "dataset");

  DatasetSplit split{std::string(split_name), {}};
  std::unordered_set<std::string> seen_ids;
  std::string problems;
  std::size_t problem_count = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    TldrRecord record;
    auto reason = parse_record(line, line_no, record);
    if (reason.empty() && !seen_ids.insert(record.paper_id).second)
      reason = "duplicate paper_id \"" + record.paper_id + "\"";
    if (!reason.empty()) {
      if (problem_count < 20) problems += "\n  line " + std::to_string(line_no) + ": " + reason;
      ++problem_count;
      continue;
    }
    split.records.push_back(std::move(record));
  }

  if (problem_count > 0) {
    throw Error(ErrorKind::schema,
                std::to_string(problem_count) + " invalid record(s) in split '" + split.name + "':" + problems,
                "dataset");
  }
  if (split.records.empty())
    throw Error(ErrorKind::schema, "split '" + split.name + "' contains no records", "dataset");
  return split;
}

DatasetSplit load_jsonl_split(const std::filesystem::path& path, std::string_view split_name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open dataset file: " + path.string(), "dataset");
  try {
    return parse_jsonl_split(in, split_name);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::schema) throw;
    throw Error(ErrorKind::schema, path.string() + ": " + e.what(), "dataset");
  }
}

void write_jsonl_split(std::ostream& out, const DatasetSplit& split) {
  for (const auto& r : split.records) {
    nlohmann::json j = r.extra_fields.is_object() ? r.extra_fields : nlohmann::json::object();
    j["paper_id"] = r.paper_id;
    j["source"] = r.source;
    j["target"] = r.targets;
    out << j.dump() << '\n';
  }
}

std::string aic_source_text(const TldrRecord& record) {
  std::string out;
  for (const auto& s : record.source) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

}  // namespace litrev
