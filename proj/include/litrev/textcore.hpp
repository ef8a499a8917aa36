#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace litrev {

// Half-open [start, end) byte range into the text a token or sentence came from.
struct ByteSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool empty() const { return end <= start; }
  std::string_view slice(std::string_view text) const { return text.substr(start, end - start); }
  friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

struct Token {
  std::string text;  // NFC, lowercased when the config asks for it
  bool is_stopword = false;
  bool is_punct = false;
  ByteSpan span;

  friend bool operator==(const Token&, const Token&) = default;
};

struct SentenceSpan {
  std::size_t index = 0;
  ByteSpan span;
  std::vector<Token> tokens;  // spans are document offsets, not sentence offsets
};

enum class TokenPattern {
  // Maximal alphanumeric runs, allowing single internal hyphens/apostrophes
  // ("state-of-the-art", "don't").
  words_with_joiners,
  // Maximal alphanumeric runs only; joiners become punctuation.
  alnum_runs,
};

struct TokenizerConfig {
  bool lowercase = true;
  std::string stopword_list_id = "english-v1";
  TokenPattern token_pattern = TokenPattern::words_with_joiners;
};

// A set of lowercase words loaded from a bundled list or a plain-text file
// (one entry per line, '#' starts a comment).
class WordList {
 public:
  WordList() = default;
  explicit WordList(std::unordered_set<std::string> words) : words_(std::move(words)) {}

  static WordList parse(std::string_view contents);
  static WordList from_file(const std::string& path);

  bool contains(std::string_view word) const { return words_.contains(std::string(word)); }
  std::size_t size() const { return words_.size(); }
  const std::unordered_set<std::string>& words() const { return words_; }

 private:
  std::unordered_set<std::string> words_;
};

// Resolves a stopword list id. Bundled ids: "english-v1" (default), "none".
// "file:<path>" loads a list from disk. Unknown ids throw invalid_argument.
// Lists are loaded once and shared for the process lifetime.
const WordList& stopword_list(const std::string& id);

// Abbreviations (lowercase, without the trailing period) that do not end a sentence.
const WordList& abbreviation_list();

std::string normalize_nfc(std::string_view text);

std::vector<Token> tokenize(std::string_view text, const TokenizerConfig& config = {});

// Rule-based segmentation: '.', '!' or '?' (plus closing quotes/brackets)
// followed by whitespace and an uppercase letter, a digit, or end of text.
std::vector<SentenceSpan> split_sentences(std::string_view text, const TokenizerConfig& config = {});

using Ngram = std::vector<std::string>;
using NgramCounts = std::map<Ngram, std::size_t>;

NgramCounts ngrams(std::span<const Token> tokens, std::size_t n, bool skip_stopwords = false,
                   bool skip_punct = false);

// Whitespace-delimited word count.
std::size_t word_count(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace litrev
