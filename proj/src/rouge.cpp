#include "litrev/rouge.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>

#include "litrev/error.hpp"
#include "litrev/textcore.hpp"

namespace litrev {

namespace {

const TokenizerConfig& rouge_tokenizer() {
  static const TokenizerConfig config{.lowercase = true, .stopword_list_id = "none"};
  return config;
}

struct SpanLess {
  bool operator()(std::span<const std::string> a, std::span<const std::string> b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

using GramCounts = std::map<std::span<const std::string>, std::size_t, SpanLess>;

std::vector<std::vector<std::size_t>> lcs_table(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
  return t;
}

// Lines first, then rule-based sentences within each line.
std::vector<std::vector<std::string>> sentence_tokens(std::string_view text) {
  std::vector<std::vector<std::string>> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    for (const auto& s : split_sentences(line, rouge_tokenizer())) {
      std::vector<std::string> words;
      for (const auto& t : s.tokens)
        if (!t.is_punct) words.push_back(t.text);
      if (!words.empty()) out.push_back(std::move(words));
    }
    pos = nl + 1;
  }
  return out;
}

}  // namespace

RougeScore RougeScore::from_pr(double precision, double recall) {
  RougeScore s{precision, recall, 0.0};
  if (precision + recall > 0.0) s.f1 = 2.0 * precision * recall / (precision + recall);
  return s;
}

RougeScore RougeScore::from_counts(std::size_t hits, std::size_t candidate_total, std::size_t reference_total) {
  double p = candidate_total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(candidate_total);
  double r = reference_total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(reference_total);
  return from_pr(p, r);
}

std::vector<std::string> rouge_tokens(std::string_view text) {
  std::vector<std::string> words;
  for (auto& t : tokenize(text, rouge_tokenizer()))
    if (!t.is_punct) words.push_back(std::move(t.text));
  return words;
}

std::size_t clipped_ngram_overlap(std::span<const std::string> candidate, std::span<const std::string> reference,
                                  std::size_t n) {
  if (n == 0) throw Error(ErrorKind::invalid_argument, "n-gram order must be at least 1", "rouge");
  auto count = [n](std::span<const std::string> seq) {
    GramCounts counts;
    for (std::size_t i = 0; i + n <= seq.size(); ++i) ++counts[seq.subspan(i, n)];
    return counts;
  };
  auto cand = count(candidate);
  auto ref = count(reference);
  std::size_t overlap = 0;
  for (const auto& [gram, c] : cand)
    if (auto it = ref.find(gram); it != ref.end()) overlap += std::min(c, it->second);
  return overlap;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::vector<std::size_t> lcs_reference_indices(std::span<const std::string> reference,
                                               std::span<const std::string> candidate) {
  auto t = lcs_table(reference, candidate);
  std::vector<std::size_t> indices;
  std::size_t i = reference.size();
  std::size_t j = candidate.size();
  while (i > 0 && j > 0) {
    if (reference[i - 1] == candidate[j - 1]) {
      indices.push_back(i - 1);
      --i;
      --j;
    } else if (t[i][j - 1] > t[i - 1][j]) {
      --j;
    } else {
      --i;
    }
  }
  std::reverse(indices.begin(), indices.end());
  return indices;
}

RougeScore rouge_n_tokens(std::span<const std::string> candidate, std::span<const std::string> reference,
                          std::size_t n) {
  if (n == 0) throw Error(ErrorKind::invalid_argument, "n-gram order must be at least 1", "rouge");
  auto total = [n](std::size_t len) { return len >= n ? len - n + 1 : 0; };
  return RougeScore::from_counts(clipped_ngram_overlap(candidate, reference, n), total(candidate.size()),
                                 total(reference.size()));
}

RougeScore rouge_l_tokens(std::span<const std::string> candidate, std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) return {};
  return RougeScore::from_counts(lcs_length(candidate, reference), candidate.size(), reference.size());
}

RougeScore rouge_lsum_sentences(const std::vector<std::vector<std::string>>& candidate,
                                const std::vector<std::vector<std::string>>& reference) {
  std::unordered_map<std::string, std::size_t> cand_counts, ref_counts;
  std::size_t cand_total = 0, ref_total = 0;
  for (const auto& s : candidate) {
    cand_total += s.size();
    for (const auto& w : s) ++cand_counts[w];
  }
  for (const auto& s : reference) {
    ref_total += s.size();
    for (const auto& w : s) ++ref_counts[w];
  }
  if (cand_total == 0 || ref_total == 0) return {};

  std::size_t hits = 0;
  for (const auto& ref_sentence : reference) {
    std::set<std::size_t> matched;
    for (const auto& cand_sentence : candidate)
      for (auto idx : lcs_reference_indices(ref_sentence, cand_sentence)) matched.insert(idx);
    for (auto idx : matched) {
      const auto& word = ref_sentence[idx];
      auto c = cand_counts.find(word);
      auto r = ref_counts.find(word);
      if (c != cand_counts.end() && r != ref_counts.end() && c->second > 0 && r->second > 0) {
        ++hits;
        --c->second;
        --r->second;
      }
    }
  }
  return RougeScore::from_counts(hits, cand_total, ref_total);
}

RougeScore rouge_n(std::string_view candidate, std::string_view reference, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::invalid_argument, "n-gram order must be at least 1", "rouge");
  return rouge_n_tokens(rouge_tokens(candidate), rouge_tokens(reference), n);
}

RougeScore rouge_l(std::string_view candidate, std::string_view reference) {
  return rouge_l_tokens(rouge_tokens(candidate), rouge_tokens(reference));
}

RougeScore rouge_lsum(std::string_view candidate, std::string_view reference) {
  return rouge_lsum_sentences(sentence_tokens(candidate), sentence_tokens(reference));
}

RougeReport score_pair(std::string_view candidate, std::string_view reference) {
  auto cand = rouge_tokens(candidate);
  auto ref = rouge_tokens(reference);
  RougeReport r;
  r.rouge1 = rouge_n_tokens(cand, ref, 1);
  r.rouge2 = rouge_n_tokens(cand, ref, 2);
  r.rougeL = rouge_l_tokens(cand, ref);
  r.rougeLsum = rouge_lsum(candidate, reference);
  return r;
}

RougeReport best_against_references(std::string_view candidate, std::span<const std::string> references,
                                    ReferencePolicy policy) {
  if (references.empty())
    throw Error(ErrorKind::invalid_argument, "at least one reference summary is required", "rouge");
  if (policy == ReferencePolicy::first) return score_pair(candidate, references.front());

  RougeReport best = score_pair(candidate, references.front());
  for (std::size_t i = 1; i < references.size(); ++i) {
    auto r = score_pair(candidate, references[i]);
    if (r.rouge1.f1 > best.rouge1.f1) best.rouge1 = r.rouge1;
    if (r.rouge2.f1 > best.rouge2.f1) best.rouge2 = r.rouge2;
    if (r.rougeL.f1 > best.rougeL.f1) best.rougeL = r.rougeL;
    if (r.rougeLsum.f1 > best.rougeLsum.f1) best.rougeLsum = r.rougeLsum;
  }
  return best;
}

RougeReport aggregate_corpus(std::span<const RougeReport> reports) {
  if (reports.empty()) throw Error(ErrorKind::invalid_argument, "cannot aggregate an empty report list", "rouge");
  RougeReport sum;
  auto add = [](RougeScore& acc, const RougeScore& s) {
    acc.precision += s.precision;
    acc.recall += s.recall;
    acc.f1 += s.f1;
  };
  for (const auto& r : reports) {
    add(sum.rouge1, r.rouge1);
    add(sum.rouge2, r.rouge2);
    add(sum.rougeL, r.rougeL);
    add(sum.rougeLsum, r.rougeLsum);
  }
  const double n = static_cast<double>(reports.size());
  for (auto* s : {&sum.rouge1, &sum.rouge2, &sum.rougeL, &sum.rougeLsum}) {
    s->precision /= n;
    s->recall /= n;
    s->f1 /= n;
  }
  return sum;
}

nlohmann::json to_json(const RougeScore& score) {
  return {{"precision", score.precision}, {"recall", score.recall}, {"f1", score.f1}};
}

nlohmann::json to_json(const RougeReport& report) {
  return {{"rouge1", to_json(report.rouge1)},
          {"rouge2", to_json(report.rouge2)},
          {"rougeL", to_json(report.rougeL)},
          {"rougeLsum", to_json(report.rougeLsum)}};
}

RougeReport report_from_json(const nlohmann::json& j) {
  auto score = [&](const char* key) {
    const auto& s = j.at(key);
    return RougeScore{s.at("precision").get<double>(), s.at("recall").get<double>(), s.at("f1").get<double>()};
  };
  return {score("rouge1"), score("rouge2"), score("rougeL"), score("rougeLsum")};
}

std::string format_table(const RougeReport& report) {
  std::string out = "metric      precision  recall     f1\n";
  auto row = [&](const char* name, const RougeScore& s) {
    char line[96];
    std::snprintf(line, sizeof line, "%-11s %-10.4f %-10.4f %.4f\n", name, s.precision, s.recall, s.f1);
    out += line;
  };
  row("ROUGE-1", report.rouge1);
  row("ROUGE-2", report.rouge2);
  row("ROUGE-L", report.rougeL);
  row("ROUGE-Lsum", report.rougeLsum);
  return out;
}

}  // namespace litrev
