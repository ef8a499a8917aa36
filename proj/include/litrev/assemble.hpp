#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "litrev/docextract.hpp"
#include "litrev/summary.hpp"

namespace litrev {

struct ReviewEntry {
  PaperMetadata metadata;
  std::string summary;
  std::size_t order = 0;
};

enum class ReviewLayout { paragraphs, single_block };

struct LiteratureReview {
  std::vector<ReviewEntry> entries;  // sorted by order
  std::string rendered;
};

// Cuts `text` back to the last sentence boundary within `cap` words; a first
// sentence longer than the cap is hard-cut to `cap` words followed by "…".
std::string enforce_word_cap(std::string_view text, std::size_t cap);

// Prepends `Surname et al., in "Title", ` when the summary never names the
// first author's surname, then applies the word cap. Degenerate results
// raise ErrorKind::entry_skipped.
ReviewEntry make_entry(const SummaryResult& result, const PaperMetadata& metadata, std::size_t order,
                       std::size_t word_cap = 80);

LiteratureReview merge_review(std::vector<ReviewEntry> entries, ReviewLayout layout = ReviewLayout::paragraphs);

struct RenderOptions {
  bool heading = false;
};

std::string render_markdown(const LiteratureReview& review, const RenderOptions& options = {});
std::string render_plain_text(const LiteratureReview& review);

}  // namespace litrev
