#include <gtest/gtest.h>

#include <random>

#include "litrev/error.hpp"
#include "litrev/freqsum.hpp"
#include "test_support.hpp"

using namespace litrev;

namespace {

// Random document whose sentence boundaries are known by construction.
struct RandomDoc {
  std::string text;
  std::vector<std::string> sentences;
};

RandomDoc random_doc(std::mt19937& rng) {
  static const std::vector<std::string> vocab = {"graph", "model", "the",  "of",    "data",   "network", "learns",
                                                 "fast",  "and",   "node", "layer", "a",      "result",  "shows",
                                                 "is",    "deep",  "with", "loss",  "sparse", "token"};
  std::uniform_int_distribution<int> n_sentences(1, 40);
  std::uniform_int_distribution<int> n_words(1, 12);
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  RandomDoc doc;
  for (int s = n_sentences(rng); s > 0; --s) {
    std::string sentence;
    for (int w = n_words(rng); w > 0; --w) {
      auto word = vocab[pick(rng)];
      if (sentence.empty()) word[0] = static_cast<char>(std::toupper(word[0]));
      sentence += (sentence.empty() ? "" : " ") + word;
    }
    sentence += ".";
    doc.sentences.push_back(sentence);
    doc.text += (doc.text.empty() ? "" : " ") + sentence;
  }
  return doc;
}

std::vector<std::size_t> expected_selection(const std::vector<SentenceScore>& scores, std::size_t k) {
  std::vector<SentenceScore> sorted(scores.begin(), scores.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.weight > b.weight; });
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k && i < sorted.size(); ++i) out.push_back(sorted[i].sentence_index);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(WordFrequencies, ApplesExample) {
  auto table = word_frequencies(tokenize("Apples are red. Apples are sweet."));
  EXPECT_EQ(table.counts, (std::map<std::string, std::size_t>{{"apples", 2}, {"red", 1}, {"sweet", 1}}));
  EXPECT_EQ(table.max_count, 2u);
}

TEST(WordFrequencies, AllStopwordsAndSingleton) {
  auto empty = word_frequencies(tokenize("the of and"));
  EXPECT_TRUE(empty.counts.empty());
  EXPECT_EQ(empty.max_count, 0u);
  auto single = word_frequencies(tokenize("x"));
  EXPECT_EQ(single.counts, (std::map<std::string, std::size_t>{{"x", 1}}));
  EXPECT_EQ(single.max_count, 1u);
}

TEST(ScoreSentences, ApplesBananasExample) {
  const std::string text = "Apples are red. Apples are sweet. Bananas exist.";
  auto table = word_frequencies(tokenize(text));
  EXPECT_EQ(table.counts,
            (std::map<std::string, std::size_t>{{"apples", 2}, {"red", 1}, {"sweet", 1}, {"bananas", 1}, {"exist", 1}}));
  auto scores = score_sentences(split_sentences(text), table);
  ASSERT_EQ(scores.size(), 3u);
  EXPECT_DOUBLE_EQ(scores[0].weight, 1.5);
  EXPECT_DOUBLE_EQ(scores[1].weight, 1.5);
  EXPECT_DOUBLE_EQ(scores[2].weight, 1.0);
}

TEST(ScoreSentences, SingleAndStopwordOnly) {
  auto scores = score_sentences(split_sentences("x."), word_frequencies(tokenize("x.")));
  ASSERT_EQ(scores.size(), 1u);
  EXPECT_DOUBLE_EQ(scores[0].weight, 1.0);
  const std::string text = "Cats nap. The of and.";
  auto s2 = score_sentences(split_sentences(text), word_frequencies(tokenize(text)));
  EXPECT_DOUBLE_EQ(s2[1].weight, 0.0);
  auto s3 = score_sentences(split_sentences(text), FrequencyTable{});
  for (const auto& s : s3) EXPECT_DOUBLE_EQ(s.weight, 0.0);
}

TEST(SelectTop, SelectionSizeRounding) {
  EXPECT_EQ(selection_size(25, 0.10), 3u);
  EXPECT_EQ(selection_size(30, 0.10), 3u);  // 0.1 * 30 is 3.0000000000000004 in binary
  EXPECT_EQ(selection_size(31, 0.10), 4u);
  EXPECT_EQ(selection_size(1, 0.10), 1u);
  EXPECT_EQ(selection_size(3, 1.0), 3u);
  EXPECT_EQ(selection_size(0, 0.10), 0u);
  EXPECT_THROW(selection_size(3, 0.0), Error);
  EXPECT_THROW(selection_size(3, 1.5), Error);
}

TEST(SelectTop, TieBrokenByIndex) {
  std::vector<SentenceScore> scores = {{0, 1.5}, {1, 1.5}, {2, 1.0}};
  EXPECT_EQ(select_top_sentences(scores, 0.10), std::vector<std::size_t>{0});
  EXPECT_EQ(select_top_sentences(std::vector<SentenceScore>{{0, 0.3}}, 0.5), std::vector<std::size_t>{0});
  EXPECT_TRUE(select_top_sentences(std::vector<SentenceScore>{}, 0.10).empty());
}

TEST(SummarizeFreq, Examples) {
  EXPECT_EQ(summarize_freq("Apples are red. Apples are sweet. Bananas exist.").summary, "Apples are red.");
  EXPECT_EQ(summarize_freq("Only one sentence here.").summary, "Only one sentence here.");
  FreqConfig all;
  all.ratio = 1.0;
  EXPECT_EQ(summarize_freq("B second. A first. C third.", all).summary, "B second. A first. C third.");
  auto degenerate = summarize_freq("   ");
  EXPECT_TRUE(degenerate.degenerate);
  EXPECT_EQ(degenerate.summary, "");
  EXPECT_EQ(summarize_freq("x.").backend_id, "freq");
}

TEST(SummarizeFreq, RandomizedProperties) {
  std::mt19937 rng(2024);
  for (int i = 0; i < 600; ++i) {
    auto doc = random_doc(rng);
    const std::size_t n = doc.sentences.size();
    auto sentences = split_sentences(doc.text);
    ASSERT_EQ(sentences.size(), n) << doc.text;

    auto table = word_frequencies(tokenize(doc.text));
    auto scores = score_sentences(sentences, table);
    auto selected = select_top_sentences(scores, 0.10);

    // Weights against counts taken straight from the construction.
    std::map<std::string, std::size_t> counts;
    std::vector<std::vector<std::string>> words(n);
    const auto& stop = stopword_list("english-v1");
    for (std::size_t s = 0; s < n; ++s) {
      std::istringstream in(doc.sentences[s].substr(0, doc.sentences[s].size() - 1));
      for (std::string w; in >> w;) {
        w[0] = static_cast<char>(std::tolower(w[0]));
        if (stop.contains(w)) continue;
        words[s].push_back(w);
        ++counts[w];
      }
    }
    std::size_t max_count = 0;
    for (const auto& [_, c] : counts) max_count = std::max(max_count, c);
    ASSERT_EQ(table.counts, counts);
    for (std::size_t s = 0; s < n; ++s) {
      double w = 0.0;
      for (const auto& word : words[s]) w += static_cast<double>(counts[word]) / static_cast<double>(max_count);
      ASSERT_NEAR(scores[s].weight, w, 1e-12);
    }

    // Cardinality.
    const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.1 * n - 1e-9)));
    ASSERT_EQ(selected.size(), k);
    // Order preservation and tie-break determinism (stable sort oracle).
    ASSERT_TRUE(std::is_sorted(selected.begin(), selected.end()));
    ASSERT_EQ(selected, expected_selection(scores, k));
    // Selection invariance under uniform frequency scaling.
    for (std::size_t factor : {2u, 7u}) {
      FrequencyTable scaled = table;
      for (auto& [_, c] : scaled.counts) c *= factor;
      scaled.max_count *= factor;
      ASSERT_EQ(select_top_sentences(score_sentences(sentences, scaled), 0.10), selected);
    }
    // Extractiveness: the summary is exactly the selected input sentences.
    auto result = summarize_freq(doc.text);
    std::string expected;
    for (auto idx : selected) expected += (expected.empty() ? "" : " ") + doc.sentences[idx];
    ASSERT_EQ(result.summary, expected);
    ASSERT_EQ(summarize_freq(doc.text).summary, result.summary);
  }
}

TEST(SummarizeFreq, RatioValidation) {
  FreqConfig bad;
  bad.ratio = 0.0;
  EXPECT_THROW(summarize_freq("A b.", bad), Error);
}
