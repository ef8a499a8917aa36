#include "litrev/assemble.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "litrev/error.hpp"
#include "litrev/textcore.hpp"

namespace litrev {

namespace {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool mentions(std::string_view haystack, std::string_view needle) {
  return ascii_lower(haystack).find(ascii_lower(needle)) != std::string::npos;
}

// "The system..." -> "the system...", but acronyms and names with inner capitals stay.
std::string lower_first_letter(std::string_view text) {
  std::string out(text);
  if (out.empty() || !std::isupper(static_cast<unsigned char>(out[0]))) return out;
  auto word_end = out.find_first_of(" \t\n");
  if (word_end == std::string::npos) word_end = out.size();
  for (std::size_t i = 1; i < word_end; ++i)
    if (std::isupper(static_cast<unsigned char>(out[i]))) return out;
  out[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[0])));
  return out;
}

std::vector<std::string_view> words_of(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t pos = 0;
  constexpr std::string_view ws = " \t\n\r\f\v";
  while (true) {
    pos = text.find_first_not_of(ws, pos);
    if (pos == std::string_view::npos) break;
    auto end = text.find_first_of(ws, pos);
    if (end == std::string_view::npos) end = text.size();
    words.push_back(text.substr(pos, end - pos));
    pos = end;
  }
  return words;
}

}  // namespace

std::string enforce_word_cap(std::string_view text, std::size_t cap) {
  if (cap < 1) throw Error(ErrorKind::invalid_argument, "word cap must be at least 1", "assemble");
  if (word_count(text) <= cap) return std::string(text);

  auto sentences = split_sentences(text);
  std::size_t total = 0;
  std::optional<std::size_t> last_fit;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    total += word_count(sentences[i].span.slice(text));
    if (total > cap) break;
    last_fit = i;
  }
  if (last_fit) {
    auto begin = sentences.front().span.start;
    return std::string(text.substr(begin, sentences[*last_fit].span.end - begin));
  }

  auto words = words_of(text);
  std::string out;
  for (std::size_t i = 0; i < cap && i < words.size(); ++i) {
    if (i > 0) out += ' ';
    out += words[i];
  }
  out += "…";
  return out;
}

ReviewEntry make_entry(const SummaryResult& result, const PaperMetadata& metadata, std::size_t order,
                       std::size_t word_cap) {
  auto summary = trim(result.summary);
  if (result.degenerate || summary.empty()) {
    std::string who = metadata.title.empty() ? "entry " + std::to_string(order) : "\"" + metadata.title + "\"";
    throw Error(ErrorKind::entry_skipped, "no usable summary for " + who, result.backend_id);
  }

  std::string text(summary);
  const auto surname = metadata.surname();
  if (!surname.empty() && !mentions(summary, surname)) {
    std::string frame = surname + " et al., ";
    if (!metadata.title.empty()) frame += "in \"" + metadata.title + "\", ";
    text = frame + lower_first_letter(summary);
  } else if (surname.empty() && !metadata.title.empty() && !mentions(summary, metadata.title)) {
    text = "In \"" + metadata.title + "\", " + lower_first_letter(summary);
  }

  return {metadata, enforce_word_cap(text, word_cap), order};
}

LiteratureReview merge_review(std::vector<ReviewEntry> entries, ReviewLayout layout) {
  if (entries.empty()) throw Error(ErrorKind::invalid_argument, "cannot merge an empty review", "assemble");
  std::set<std::size_t> orders;
  for (const auto& e : entries) {
    if (!orders.insert(e.order).second)
      throw Error(ErrorKind::invalid_argument, "duplicate entry order " + std::to_string(e.order), "assemble");
    if (trim(e.summary).empty())
      throw Error(ErrorKind::invalid_argument, "entry " + std::to_string(e.order) + " has an empty summary",
                  "assemble");
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.order < b.order; });

  LiteratureReview review;
  const std::string_view separator = layout == ReviewLayout::paragraphs ? "\n\n" : " ";
  for (const auto& e : entries) {
    if (!review.rendered.empty()) review.rendered += separator;
    review.rendered += e.summary;
  }
  review.entries = std::move(entries);
  return review;
}

std::string render_markdown(const LiteratureReview& review, const RenderOptions& options) {
  std::string out;
  if (options.heading) out += "## Literature Review\n\n";
  out += review.rendered;
  out += '\n';
  return out;
}

std::string render_plain_text(const LiteratureReview& review) { return review.rendered + "\n"; }

}  // namespace litrev
