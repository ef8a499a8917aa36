#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "litrev/dataset.hpp"
#include "litrev/docextract.hpp"
#include "litrev/freqsum.hpp"
#include "litrev/http.hpp"
#include "litrev/summary.hpp"

namespace litrev {

struct SummaryRequest {
  std::string text;
  PaperMetadata metadata;
  std::size_t word_cap = 80;
  std::vector<std::string> prior_entries;  // earlier entries of the same review

  void validate() const;
};

// Which part of a paper a backend is given.
enum class SourcePolicy { automatic, conclusion, aic, full };

std::string_view to_string(SourcePolicy policy);
SourcePolicy parse_source_policy(std::string_view text);

// `conclusion` falls back to AIC, and AIC to the full text.
std::string select_source_text(const SourceDocument& doc, SourcePolicy policy);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  virtual SourcePolicy preferred_source() const = 0;
  virtual SummaryResult summarize(const SummaryRequest& request) = 0;
};

// ---------------------------------------------------------------------------
// Frequency backend

class FreqBackend final : public Backend {
 public:
  explicit FreqBackend(FreqConfig config = {}) : config_(std::move(config)) {}

  std::string id() const override { return "freq"; }
  SourcePolicy preferred_source() const override { return SourcePolicy::conclusion; }
  SummaryResult summarize(const SummaryRequest& request) override;

 private:
  FreqConfig config_;
};

// ---------------------------------------------------------------------------
// Exemplar retrieval

struct Exemplar {
  TldrRecord record;
  double similarity = 0.0;
};

// Token-overlap index over a dataset split, used as the LLM's knowledge base.
class KnowledgeBase {
 public:
  explicit KnowledgeBase(DatasetSplit split);

  const DatasetSplit& split() const { return split_; }
  std::size_t size() const { return split_.records.size(); }

  // Jaccard similarity of stopword-free unigram sets, highest first; ties by paper_id.
  std::vector<Exemplar> retrieve(std::string_view query, std::size_t k) const;

 private:
  DatasetSplit split_;
  std::vector<std::vector<std::string>> terms_;  // sorted unique terms per record
  std::unordered_map<std::string, std::vector<std::size_t>> postings_;
};

std::vector<Exemplar> retrieve_exemplars(const KnowledgeBase& kb, std::string_view query_text, std::size_t k);

// Sorted set of lowercase non-stopword word tokens.
std::vector<std::string> unigram_set(std::string_view text);
double jaccard(std::span<const std::string> a, std::span<const std::string> b);

// ---------------------------------------------------------------------------
// LLM backend

// Caps concurrent chat-completion requests across every LLM backend sharing it.
class InflightLimiter {
 public:
  explicit InflightLimiter(std::ptrdiff_t slots) : semaphore_(std::max<std::ptrdiff_t>(1, slots)) {}

  class Slot {
   public:
    explicit Slot(InflightLimiter& l) : limiter_(l) { limiter_.semaphore_.acquire(); }
    ~Slot() { limiter_.semaphore_.release(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    InflightLimiter& limiter_;
  };

 private:
  std::counting_semaphore<1024> semaphore_;
};

// Process-wide limiter with 2 slots.
std::shared_ptr<InflightLimiter> default_llm_limiter();

struct LlmConfig {
  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  std::string model_name = "gpt-3.5-turbo-0125";
  // Name of the environment variable holding the API key. Empty means the
  // endpoint takes no authentication (local servers).
  std::string api_key_env = "OPENAI_API_KEY";
  double temperature = 0.0;
  int max_retries = 3;
  std::chrono::milliseconds request_timeout{60000};
  std::size_t exemplar_count = 3;
  std::size_t input_token_budget = 24000;  // characters of paper text
  std::size_t exemplar_input_chars = 1500;
  std::size_t max_inflight = 2;
  Backoff backoff;

  void validate() const;
};

struct PromptPayload {
  std::string system;
  std::string user;
};

// The generation instruction, byte-for-byte as bundled in data/prompts.
std::string_view literature_review_instruction();

constexpr std::size_t kMaxPriorEntries = 5;
constexpr std::string_view kPriorEntriesHeader = "Previously generated entries:";

// Longest prefix of at most `budget` bytes that ends at whitespace; hard cut
// (at a UTF-8 boundary) when there is no whitespace.
std::string truncate_at_whitespace(std::string_view text, std::size_t budget);

PromptPayload build_llm_prompt(const SummaryRequest& request, std::span<const Exemplar> exemplars,
                               const LlmConfig& config = {});

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

struct LlmCompletion {
  std::string text;
  int requests = 0;
  int retries = 0;
};

// One chat-completion call, retried on 429/5xx/transport failures up to
// config.max_retries. A missing key fails before any request is sent.
LlmCompletion call_llm(const PromptPayload& payload, const LlmConfig& config, HttpTransport& transport,
                       const EnvLookup& env = process_env(), const SleepFn& sleep = real_sleep(),
                       InflightLimiter* limiter = nullptr);

SummaryResult parse_llm_response(std::string_view raw, const SummaryRequest& request);

class LlmBackend final : public Backend {
 public:
  LlmBackend(LlmConfig config, std::shared_ptr<const KnowledgeBase> knowledge_base,
             std::shared_ptr<HttpTransport> transport = make_http_transport(), EnvLookup env = process_env(),
             SleepFn sleep = real_sleep(), std::shared_ptr<InflightLimiter> limiter = default_llm_limiter());

  std::string id() const override { return "llm"; }
  SourcePolicy preferred_source() const override { return SourcePolicy::full; }
  SummaryResult summarize(const SummaryRequest& request) override;

  // Throws ErrorKind::config when the API key is required but missing.
  void check_credentials() const;

 private:
  LlmConfig config_;
  std::shared_ptr<const KnowledgeBase> knowledge_base_;
  std::shared_ptr<HttpTransport> transport_;
  EnvLookup env_;
  SleepFn sleep_;
  std::shared_ptr<InflightLimiter> limiter_;
};

// ---------------------------------------------------------------------------
// External summarization service: POST {"text", "word_cap"} -> {"summary"}

struct ExternalConfig {
  std::string endpoint = "http://127.0.0.1:8000/summarize";
  std::chrono::milliseconds timeout{30000};
  int retries = 1;
  Backoff backoff;
};

SummaryResult call_external_backend(const SummaryRequest& request, const ExternalConfig& config,
                                    HttpTransport& transport, const SleepFn& sleep = real_sleep());

class ExternalBackend final : public Backend {
 public:
  explicit ExternalBackend(ExternalConfig config, std::shared_ptr<HttpTransport> transport = make_http_transport(),
                           SleepFn sleep = real_sleep())
      : config_(std::move(config)), transport_(std::move(transport)), sleep_(std::move(sleep)) {}

  std::string id() const override { return "external"; }
  SourcePolicy preferred_source() const override { return SourcePolicy::aic; }
  SummaryResult summarize(const SummaryRequest& request) override;

 private:
  ExternalConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  SleepFn sleep_;
};

}  // namespace litrev
