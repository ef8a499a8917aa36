#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "litrev/summary.hpp"
#include "litrev/textcore.hpp"

namespace litrev {

// Occurrence counts of normalized content words (stopwords and punctuation removed).
struct FrequencyTable {
  std::map<std::string, std::size_t> counts;
  std::size_t max_count = 0;

  std::size_t count(const std::string& word) const {
    auto it = counts.find(word);
    return it == counts.end() ? 0 : it->second;
  }
};

struct SentenceScore {
  std::size_t sentence_index = 0;
  double weight = 0.0;
};

struct FreqConfig {
  double ratio = 0.10;
  TokenizerConfig tokenizer;
};

FrequencyTable word_frequencies(std::span<const Token> tokens);

// weight = sum over the sentence's content tokens of count / max_count.
std::vector<SentenceScore> score_sentences(std::span<const SentenceSpan> sentences, const FrequencyTable& table);

// Number of sentences kept out of `sentence_count`: max(1, ceil(ratio * N)).
std::size_t selection_size(std::size_t sentence_count, double ratio);

// The highest-weight sentences (earlier index wins ties), returned in document order.
std::vector<std::size_t> select_top_sentences(std::span<const SentenceScore> scores, double ratio);

SummaryResult summarize_freq(std::string_view text, const FreqConfig& config = {});

}  // namespace litrev
