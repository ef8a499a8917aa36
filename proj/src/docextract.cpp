#include "litrev/docextract.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include "litrev/error.hpp"
#include "litrev/pdf_text.hpp"

namespace litrev {

namespace {

constexpr std::size_t kMaxHeadingLength = 80;

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t n = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
    if (n == 0 || i + n > s.size()) return false;
    for (std::size_t k = 1; k < n; ++k)
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
    i += n;
  }
  return true;
}

// Non-UTF-8 text files are read as Latin-1.
std::string latin1_to_utf8(std::string_view s) {
  std::string out;
  out.reserve(s.size() * 2);
  for (unsigned char c : s) {
    if (c < 0x80) {
      out += static_cast<char>(c);
    } else {
      out += static_cast<char>(0xC0 | (c >> 6));
      out += static_cast<char>(0x80 | (c & 0x3F));
    }
  }
  return out;
}

std::string strip_controls(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    if ((c < 0x20 && c != '\n' && c != '\t') || c == 0x7F) continue;
    out += ch;
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path.string(), "docextract");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

const std::regex& heading_pattern() {
  static const std::regex pattern(
      R"(^(?:(?:[0-9]+(?:\.[0-9]+)*|x{0,3}(?:ix|iv|v?i{1,3}|v)|x{1,3})(?:[.):]\s*|\s+))?)"
      R"((abstract|introduction|conclusions?(?:\s+and\s+future\s+(?:works?|scopes?|directions?|research))?)"
      R"(|concluding\s+remarks|references|bibliography|acknowledge?ments?)\s*[.:]?$)",
      std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
  return pattern;
}

// "2. Related Work", "III. APPROACH", "4.1 Ablations", "RELATED WORK".
const std::regex& body_heading_pattern() {
  static const std::regex pattern(
      R"(^(?:(?:[0-9]{1,2}(?:\.[0-9]{1,2})*\.?|[IVX]+\.)\s+[A-Z][A-Za-z0-9'\-]*(?:\s+[A-Za-z0-9'&,:\-]+){0,7})"
      R"(|[A-Z][A-Z'&\-]+(?:\s+[A-Z][A-Z'&\-]*){0,5})$)",
      std::regex::ECMAScript | std::regex::optimize);
  return pattern;
}

SectionKind classify(std::string keyword) {
  std::transform(keyword.begin(), keyword.end(), keyword.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (keyword == "abstract") return SectionKind::abstract;
  if (keyword == "introduction") return SectionKind::introduction;
  if (keyword.starts_with("conclu")) return SectionKind::conclusion;
  return SectionKind::end_matter;
}

bool iequals_prefix(std::string_view text, std::string_view prefix) {
  if (text.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(text[i])) != prefix[i]) return false;
  return true;
}

// Inline abstract: a line starting "Abstract" followed by a dash or colon.
// Returns the byte offset where the abstract body starts.
std::optional<std::size_t> inline_abstract_start(std::string_view text) {
  std::size_t line_start = 0;
  while (line_start < text.size()) {
    auto nl = text.find('\n', line_start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(line_start, nl - line_start);
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (iequals_prefix(line.substr(i), "abstract")) {
      i += 8;
      while (i < line.size() && line[i] == ' ') ++i;
      auto rest = line.substr(i);
      std::size_t sep = 0;
      for (std::string_view d : {"—", "–", "-", ":", "."}) {
        if (rest.starts_with(d)) {
          sep = d.size();
          break;
        }
      }
      if (sep > 0 && !trim(rest.substr(sep)).empty()) return line_start + i + sep;
    }
    line_start = nl + 1;
  }
  return std::nullopt;
}

std::optional<std::string> trimmed_section(std::string_view text, std::size_t begin, std::size_t end) {
  auto body = trim(text.substr(begin, end - begin));
  if (body.empty()) return std::nullopt;
  return std::string(body);
}

}  // namespace

std::string_view to_string(SectionKind kind) {
  switch (kind) {
    case SectionKind::abstract: return "abstract";
    case SectionKind::introduction: return "introduction";
    case SectionKind::conclusion: return "conclusion";
    case SectionKind::end_matter: return "end_matter";
    case SectionKind::other: return "other";
  }
  return "unknown";
}

std::string_view to_string(MetadataSource source) {
  switch (source) {
    case MetadataSource::doi_lookup: return "doi_lookup";
    case MetadataSource::heuristic: return "heuristic";
    case MetadataSource::user_supplied: return "user_supplied";
  }
  return "unknown";
}

std::string PaperMetadata::surname() const {
  auto author = trim(first_author);
  if (auto comma = author.find(','); comma != std::string_view::npos) return std::string(trim(author.substr(0, comma)));
  auto space = author.find_last_of(" \t");
  if (space == std::string_view::npos) return std::string(author);
  return std::string(author.substr(space + 1));
}

DocumentKind guess_kind(std::string_view name, std::string_view bytes) {
  if (name.size() >= 4 && iequals_prefix(name.substr(name.size() - 4), ".pdf")) return DocumentKind::pdf;
  return looks_like_pdf(bytes) ? DocumentKind::pdf : DocumentKind::text;
}

SourceDocument document_from_bytes(std::string_view bytes, DocumentKind kind, std::string origin) {
  if (bytes.empty()) throw Error(ErrorKind::io, origin + ": empty input", "docextract");
  std::string text;
  if (kind == DocumentKind::pdf) {
    text = extract_pdf_text(bytes);
  } else {
    text = valid_utf8(bytes) ? std::string(bytes) : latin1_to_utf8(bytes);
  }
  text = normalize_nfc(strip_controls(text));
  if (trim(text).empty()) throw Error(ErrorKind::io, origin + ": no text content", "docextract");
  return {std::move(origin), std::move(text), std::nullopt};
}

SourceDocument load_document(const std::filesystem::path& path, DocumentKind kind) {
  return document_from_bytes(read_file(path), kind, path.string());
}

SourceDocument load_document(const std::filesystem::path& path) {
  auto bytes = read_file(path);
  return document_from_bytes(bytes, guess_kind(path.filename().string(), bytes), path.string());
}

std::vector<Heading> detect_headings(std::string_view full_text) {
  std::vector<Heading> headings;
  std::size_t line_start = 0;
  while (line_start < full_text.size()) {
    auto nl = full_text.find('\n', line_start);
    if (nl == std::string_view::npos) nl = full_text.size();
    auto line = full_text.substr(line_start, nl - line_start);
    auto trimmed = trim(line);
    if (!trimmed.empty() && trimmed.size() <= kMaxHeadingLength) {
      std::cmatch m;
      std::size_t start = line_start + static_cast<std::size_t>(trimmed.data() - line.data());
      ByteSpan span{start, start + trimmed.size()};
      if (std::regex_match(trimmed.data(), trimmed.data() + trimmed.size(), m, heading_pattern())) {
        headings.push_back({std::string(trimmed), span, classify(m[1].str())});
      } else if (std::regex_match(trimmed.data(), trimmed.data() + trimmed.size(), body_heading_pattern())) {
        headings.push_back({std::string(trimmed), span, SectionKind::other});
      }
    }
    line_start = nl + 1;
  }
  return headings;
}

std::optional<std::string> extract_section(std::string_view full_text, std::span<const Heading> headings,
                                           SectionKind which) {
  for (std::size_t i = 0; i < headings.size(); ++i) {
    if (headings[i].kind != which) continue;
    std::size_t begin = headings[i].span.end;
    std::size_t end = i + 1 < headings.size() ? headings[i + 1].span.start : full_text.size();
    return trimmed_section(full_text, begin, end);
  }
  if (which == SectionKind::abstract) {
    if (auto start = inline_abstract_start(full_text)) {
      std::size_t end = full_text.size();
      for (const auto& h : headings) {
        if (h.span.start >= *start) {
          end = h.span.start;
          break;
        }
      }
      return trimmed_section(full_text, *start, end);
    }
  }
  return std::nullopt;
}

PaperSections extract_sections(std::string_view full_text) {
  PaperSections s;
  s.headings = detect_headings(full_text);
  s.abstract = extract_section(full_text, s.headings, SectionKind::abstract);
  s.introduction = extract_section(full_text, s.headings, SectionKind::introduction);
  s.conclusion = extract_section(full_text, s.headings, SectionKind::conclusion);
  return s;
}

std::string extract_aic(const SourceDocument& doc) {
  auto sections = extract_sections(doc.full_text);
  std::string out;
  for (const auto* part : {&sections.abstract, &sections.introduction, &sections.conclusion}) {
    if (!*part) continue;
    if (!out.empty()) out += "\n\n";
    out += **part;
  }
  return out.empty() ? doc.full_text : out;
}

PaperMetadata heuristic_metadata(const SourceDocument& doc) {
  PaperMetadata meta;
  meta.source = MetadataSource::heuristic;
  meta.doi = doc.doi.value_or("");
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  const std::string_view text = doc.full_text;
  while (pos < text.size() && lines.size() < 2) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = trim(text.substr(pos, nl - pos));
    if (!line.empty()) lines.push_back(line);
    pos = nl + 1;
  }
  if (!lines.empty()) meta.title = std::string(lines[0]);
  // A second line that is already a heading ("Abstract") names no authors.
  if (lines.size() > 1 && detect_headings(lines[1]).empty()) {
    auto author = lines[1];
    auto cut = author.find_first_of(",;");
    for (std::string_view sep : {" and ", " & "}) cut = std::min(cut, author.find(sep));
    author = trim(author.substr(0, cut));
    // Affiliation markers such as "Smith1*".
    while (!author.empty() && (std::isdigit(static_cast<unsigned char>(author.back())) || author.back() == '*'))
      author.remove_suffix(1);
    meta.first_author = std::string(author);
  }
  return meta;
}

}  // namespace litrev
