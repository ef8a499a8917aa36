#include "litrev/freqsum.hpp"

#include <algorithm>
#include <cmath>

#include "litrev/error.hpp"

namespace litrev {

namespace {

void check_ratio(double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0))
    throw Error(ErrorKind::invalid_argument, "selection ratio must be in (0, 1]", "freqsum");
}

}  // namespace

FrequencyTable word_frequencies(std::span<const Token> tokens) {
  FrequencyTable table;
  for (const auto& t : tokens) {
    if (t.is_stopword || t.is_punct) continue;
    auto c = ++table.counts[t.text];
    table.max_count = std::max(table.max_count, c);
  }
  return table;
}

std::vector<SentenceScore> score_sentences(std::span<const SentenceSpan> sentences, const FrequencyTable& table) {
  std::vector<SentenceScore> scores;
  scores.reserve(sentences.size());
  const auto max = static_cast<double>(table.max_count);
  for (const auto& s : sentences) {
    double weight = 0.0;
    if (table.max_count > 0) {
      for (const auto& t : s.tokens) {
        if (t.is_stopword || t.is_punct) continue;
        weight += static_cast<double>(table.count(t.text)) / max;
      }
    }
    scores.push_back({s.index, weight});
  }
  return scores;
}

std::size_t selection_size(std::size_t sentence_count, double ratio) {
  check_ratio(ratio);
  if (sentence_count == 0) return 0;
  // ratio * N is inexact in binary (0.1 * 30 > 3), so shave a relative epsilon before ceil.
  const double exact = ratio * static_cast<double>(sentence_count);
  auto k = static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
  return std::clamp<std::size_t>(k, 1, sentence_count);
}

std::vector<std::size_t> select_top_sentences(std::span<const SentenceScore> scores, double ratio) {
  check_ratio(ratio);
  if (scores.empty()) return {};
  const auto k = selection_size(scores.size(), ratio);

  std::vector<SentenceScore> ranked(scores.begin(), scores.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const SentenceScore& a, const SentenceScore& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.sentence_index < b.sentence_index;
  });

  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  for (std::size_t i = 0; i < k; ++i) chosen.push_back(ranked[i].sentence_index);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

SummaryResult summarize_freq(std::string_view text, const FreqConfig& config) {
  check_ratio(config.ratio);
  SummaryResult result;
  result.backend_id = "freq";

  const auto sentences = split_sentences(text, config.tokenizer);
  result.diagnostics["sentences"] = std::to_string(sentences.size());
  if (sentences.empty()) {
    result.degenerate = true;
    return result;
  }

  std::vector<Token> tokens;
  for (const auto& s : sentences) tokens.insert(tokens.end(), s.tokens.begin(), s.tokens.end());
  const auto table = word_frequencies(tokens);
  const auto scores = score_sentences(sentences, table);
  const auto chosen = select_top_sentences(scores, config.ratio);

  for (auto index : chosen) {
    if (!result.summary.empty()) result.summary += ' ';
    result.summary += sentences[index].span.slice(text);
  }
  result.diagnostics["selected"] = std::to_string(chosen.size());
  result.diagnostics["vocabulary"] = std::to_string(table.counts.size());
  return result;
}

}  // namespace litrev
