#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace litrev {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  // Zero denominators yield 0 for the affected component.
  static RougeScore from_counts(std::size_t hits, std::size_t candidate_total, std::size_t reference_total);
  static RougeScore from_pr(double precision, double recall);

  friend bool operator==(const RougeScore&, const RougeScore&) = default;
};

struct RougeReport {
  RougeScore rouge1;
  RougeScore rouge2;
  RougeScore rougeL;
  RougeScore rougeLsum;

  friend bool operator==(const RougeReport&, const RougeReport&) = default;
};

enum class ReferencePolicy { max, first };

// Lowercased word tokens with punctuation dropped; stopwords are kept.
std::vector<std::string> rouge_tokens(std::string_view text);

// Sum over n-grams of min(count in candidate, count in reference).
std::size_t clipped_ngram_overlap(std::span<const std::string> candidate, std::span<const std::string> reference,
                                  std::size_t n);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

// Indices into `reference` of one longest common subsequence with `candidate`.
std::vector<std::size_t> lcs_reference_indices(std::span<const std::string> reference,
                                               std::span<const std::string> candidate);

RougeScore rouge_n(std::string_view candidate, std::string_view reference, std::size_t n);
RougeScore rouge_l(std::string_view candidate, std::string_view reference);
RougeScore rouge_lsum(std::string_view candidate, std::string_view reference);

// Token-level forms used by the text entry points above.
RougeScore rouge_n_tokens(std::span<const std::string> candidate, std::span<const std::string> reference,
                          std::size_t n);
RougeScore rouge_l_tokens(std::span<const std::string> candidate, std::span<const std::string> reference);
RougeScore rouge_lsum_sentences(const std::vector<std::vector<std::string>>& candidate,
                                const std::vector<std::vector<std::string>>& reference);

RougeReport score_pair(std::string_view candidate, std::string_view reference);

// `max`: per metric, the triple from the reference with the highest F1 (first
// wins ties); metrics may pick different references. `first`: only references[0].
RougeReport best_against_references(std::string_view candidate, std::span<const std::string> references,
                                    ReferencePolicy policy = ReferencePolicy::max);

// Field-wise arithmetic mean.
RougeReport aggregate_corpus(std::span<const RougeReport> reports);

nlohmann::json to_json(const RougeScore& score);
nlohmann::json to_json(const RougeReport& report);
RougeReport report_from_json(const nlohmann::json& j);

std::string format_table(const RougeReport& report);

}  // namespace litrev
