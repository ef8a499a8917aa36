#include <gtest/gtest.h>

#include <random>

#include "litrev/error.hpp"
#include "litrev/rouge.hpp"
#include "test_support.hpp"

using namespace litrev;
using namespace litrev::testkit;

namespace {

std::vector<std::string> random_tokens(std::mt19937& rng, std::size_t max_len = 8) {
  static const std::vector<std::string> alphabet = {"a", "b", "c"};
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> sym(0, alphabet.size() - 1);
  std::vector<std::string> out(len(rng));
  for (auto& t : out) t = alphabet[sym(rng)];
  return out;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) out += (out.empty() ? "" : " ") + t;
  return out;
}

void expect_score(const RougeScore& s, double p, double r, double f) {
  EXPECT_NEAR(s.precision, p, 1e-12);
  EXPECT_NEAR(s.recall, r, 1e-12);
  EXPECT_NEAR(s.f1, f, 1e-12);
}

}  // namespace

TEST(RougeN, CatSatCatRan) {
  expect_score(rouge_n("the cat sat", "the cat ran", 1), 2.0 / 3, 2.0 / 3, 2.0 / 3);
  expect_score(rouge_n("the cat sat", "the cat ran", 2), 0.5, 0.5, 0.5);
  EXPECT_THROW(rouge_n("a", "a", 0), Error);
}

TEST(RougeN, IdentityAndClipping) {
  for (std::size_t n = 1; n <= 3; ++n) expect_score(rouge_n("one two three four", "one two three four", n), 1, 1, 1);
  // Candidate repeats "the" three times; the reference has it twice.
  expect_score(rouge_n("the the the", "the cat the", 1), 2.0 / 3, 2.0 / 3, 2.0 / 3);
  expect_score(rouge_n("", "something", 1), 0, 0, 0);
}

TEST(RougeN, PunctuationIgnoredStopwordsKept) {
  EXPECT_EQ(rouge_tokens("The cat, sat!"), (std::vector<std::string>{"the", "cat", "sat"}));
  expect_score(rouge_n("The cat sat.", "the cat sat", 1), 1, 1, 1);
}

TEST(Lcs, Examples) {
  auto a = rouge_tokens("the cat sat on the mat");
  auto b = rouge_tokens("the cat lay on the mat");
  EXPECT_EQ(lcs_length(a, b), 5u);
  EXPECT_EQ(lcs_length(a, a), a.size());
  EXPECT_EQ(lcs_length(rouge_tokens("x y"), rouge_tokens("p q")), 0u);
  expect_score(rouge_l("the cat sat on the mat", "the cat lay on the mat"), 5.0 / 6, 5.0 / 6, 5.0 / 6);
  expect_score(rouge_l("", "the cat"), 0, 0, 0);
  expect_score(rouge_l("the cat", "the cat"), 1, 1, 1);
}

TEST(Lcs, ReferenceIndicesFormACommonSubsequence) {
  std::mt19937 rng(5);
  for (int i = 0; i < 500; ++i) {
    auto ref = random_tokens(rng);
    auto cand = random_tokens(rng);
    auto idx = lcs_reference_indices(ref, cand);
    ASSERT_EQ(idx.size(), lcs_length(ref, cand));
    ASSERT_TRUE(std::is_sorted(idx.begin(), idx.end()));
    std::vector<std::string> sub;
    for (auto k : idx) sub.push_back(ref[k]);
    ASSERT_EQ(brute_force_lcs(sub, cand), sub.size());
  }
}

TEST(OracleEquivalence, LcsAndOverlapOnRandomPairs) {
  std::mt19937 rng(42);
  for (int i = 0; i < 1000; ++i) {
    auto a = random_tokens(rng);
    auto b = random_tokens(rng);
    ASSERT_EQ(lcs_length(a, b), brute_force_lcs(a, b)) << join(a) << " | " << join(b);
    ASSERT_EQ(lcs_length(a, b), lcs_length(b, a));
    ASSERT_LE(lcs_length(a, b), std::min(a.size(), b.size()));
    for (std::size_t n = 1; n <= 3; ++n) ASSERT_EQ(clipped_ngram_overlap(a, b, n), brute_force_overlap(a, b, n));
  }
}

TEST(RougeProperties, RangeF1IdentityDuality) {
  std::mt19937 rng(9);
  for (int i = 0; i < 500; ++i) {
    auto c = join(random_tokens(rng));
    auto r = join(random_tokens(rng));
    for (std::size_t n = 1; n <= 2; ++n) {
      auto s = rouge_n(c, r, n);
      auto dual = rouge_n(r, c, n);
      ASSERT_DOUBLE_EQ(s.precision, dual.recall);
      ASSERT_DOUBLE_EQ(s.recall, dual.precision);
    }
    auto report = score_pair(c, r);
    for (const auto* s : {&report.rouge1, &report.rouge2, &report.rougeL, &report.rougeLsum}) {
      for (double v : {s->precision, s->recall, s->f1}) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
      }
      double expected = s->precision + s->recall > 0 ? 2 * s->precision * s->recall / (s->precision + s->recall) : 0;
      ASSERT_DOUBLE_EQ(s->f1, expected);
    }
    // Single-sentence texts: Lsum equals L.
    ASSERT_DOUBLE_EQ(report.rougeLsum.f1, report.rougeL.f1);
  }
}

TEST(RougeLsum, Examples) {
  auto s = rouge_lsum("a b. c d.", "a b. c e.");
  EXPECT_NEAR(s.recall, 3.0 / 4, 1e-12);
  EXPECT_NEAR(s.precision, 3.0 / 4, 1e-12);
  expect_score(rouge_lsum("One two. Three four.", "One two. Three four."), 1, 1, 1);
  EXPECT_EQ(rouge_lsum("the cat sat on the mat", "the cat lay on the mat"),
            rouge_l("the cat sat on the mat", "the cat lay on the mat"));
}

TEST(RougeLsum, NewlinesSplitAndUnionConsumesOnce) {
  // The candidate's single "a" can satisfy only one reference sentence.
  auto s = rouge_lsum("a", "a\na");
  EXPECT_NEAR(s.recall, 0.5, 1e-12);
  EXPECT_NEAR(s.precision, 1.0, 1e-12);
  // Union of matches across candidate sentences for one reference sentence.
  auto u = rouge_lsum("a x.\nb y.", "a b.");
  EXPECT_NEAR(u.recall, 1.0, 1e-12);
  EXPECT_NEAR(u.precision, 0.5, 1e-12);
}

TEST(MultiReference, MaxAndFirstPolicies) {
  std::vector<std::string> one = {"the cat ran"};
  EXPECT_EQ(best_against_references("the cat sat", one), score_pair("the cat sat", "the cat ran"));

  std::vector<std::string> refs = {"the cat sat", "completely unrelated words"};
  auto best = best_against_references("the cat sat", refs);
  EXPECT_DOUBLE_EQ(best.rouge1.f1, 1.0);
  EXPECT_DOUBLE_EQ(best.rouge2.f1, 1.0);
  EXPECT_DOUBLE_EQ(best.rougeL.f1, 1.0);
  EXPECT_DOUBLE_EQ(best.rougeLsum.f1, 1.0);
  auto first = best_against_references("unrelated", refs, ReferencePolicy::first);
  EXPECT_EQ(first, score_pair("unrelated", refs[0]));
  EXPECT_THROW(best_against_references("x", std::vector<std::string>{}), Error);
}

TEST(MultiReference, PerMetricMaxMayMixReferences) {
  // ref A shares more unigrams, ref B shares a longer bigram chain.
  const std::string cand = "w x y z";
  std::vector<std::string> refs = {"z y x w", "w x q q q q"};
  auto a = score_pair(cand, refs[0]);
  auto b = score_pair(cand, refs[1]);
  auto best = best_against_references(cand, refs);
  auto pick = [](const RougeScore& x, const RougeScore& y) { return y.f1 > x.f1 ? y : x; };
  EXPECT_EQ(best.rouge1, pick(a.rouge1, b.rouge1));
  EXPECT_EQ(best.rouge2, pick(a.rouge2, b.rouge2));
  EXPECT_EQ(best.rougeL, pick(a.rougeL, b.rougeL));
  EXPECT_EQ(best.rougeLsum, pick(a.rougeLsum, b.rougeLsum));
  EXPECT_EQ(best.rouge1, a.rouge1);
  EXPECT_EQ(best.rouge2, b.rouge2);
}

TEST(Aggregate, MeanOfFields) {
  RougeReport r1, r2;
  r1.rouge1.f1 = 0.2;
  r2.rouge1.f1 = 0.4;
  std::vector<RougeReport> one = {r1};
  EXPECT_EQ(aggregate_corpus(one), r1);
  std::vector<RougeReport> two = {r1, r2};
  EXPECT_NEAR(aggregate_corpus(two).rouge1.f1, 0.3, 1e-15);
  EXPECT_THROW(aggregate_corpus(std::vector<RougeReport>{}), Error);

  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<RougeReport> ten(10);
  double sum = 0;
  for (auto& r : ten) {
    r.rougeLsum.recall = u(rng);
    sum += r.rougeLsum.recall;
  }
  EXPECT_NEAR(aggregate_corpus(ten).rougeLsum.recall, sum / 10, 1e-12);
}

TEST(Serialization, JsonRoundTripAndTable) {
  auto report = score_pair("the cat sat", "the cat ran");
  auto j = to_json(report);
  EXPECT_TRUE(j.contains("rouge1"));
  EXPECT_TRUE(j["rougeLsum"].contains("f1"));
  EXPECT_EQ(report_from_json(j), report);
  auto table = format_table(report);
  EXPECT_NE(table.find("ROUGE-1"), std::string::npos);
  EXPECT_NE(table.find("0.6667"), std::string::npos);
}
