#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "litrev/textcore.hpp"

namespace litrev {

enum class DocumentKind { pdf, text };

struct SourceDocument {
  std::string origin;  // file path or upload name
  std::string full_text;
  std::optional<std::string> doi;
};

// `other` marks body headings ("2. Method", "RELATED WORK") that only bound sections.
enum class SectionKind { abstract, introduction, conclusion, end_matter, other };

std::string_view to_string(SectionKind kind);

struct Heading {
  std::string text;  // the heading line, trimmed
  ByteSpan span;
  SectionKind kind = SectionKind::end_matter;
};

struct PaperSections {
  std::optional<std::string> abstract;
  std::optional<std::string> introduction;
  std::optional<std::string> conclusion;
  std::vector<Heading> headings;
};

enum class MetadataSource { doi_lookup, heuristic, user_supplied };

std::string_view to_string(MetadataSource source);

struct PaperMetadata {
  std::string title;
  std::string first_author;  // "Family, Given" from DOI lookups; free form otherwise
  std::string doi;
  MetadataSource source = MetadataSource::heuristic;

  // Text before a comma, else the last whitespace-separated word.
  std::string surname() const;
};

// Reads a paper. PDFs go through the built-in text-layer extractor; text
// files are taken verbatim. Both are NFC-normalized with control characters
// other than newline and tab removed.
SourceDocument load_document(const std::filesystem::path& path, DocumentKind kind);
SourceDocument load_document(const std::filesystem::path& path);  // kind from extension / magic bytes
SourceDocument document_from_bytes(std::string_view bytes, DocumentKind kind, std::string origin);
DocumentKind guess_kind(std::string_view name, std::string_view bytes);

// Heading lines (at most 80 characters) naming abstract, introduction,
// conclusion or end matter, optionally numbered ("1.", "IV.", "V "). Numbered
// or all-caps short title lines are returned as SectionKind::other.
std::vector<Heading> detect_headings(std::string_view full_text);

// Text between the first heading of `which` and the next heading (or end of
// text), trimmed. Abstracts also fall back to an inline paragraph ("Abstract" plus a dash or colon).
std::optional<std::string> extract_section(std::string_view full_text, std::span<const Heading> headings,
                                           SectionKind which);

PaperSections extract_sections(std::string_view full_text);

// "abstract\n\nintroduction\n\nconclusion" from whichever are present, in
// that order; the full text when none are found.
std::string extract_aic(const SourceDocument& doc);

// Title from the first non-empty line, first author from the first
// comma-separated token of the second.
PaperMetadata heuristic_metadata(const SourceDocument& doc);

}  // namespace litrev
