#include "litrev/backends.hpp"

#include <algorithm>
#include <cstdlib>

#include <json.hpp>

#include "bundled_data.hpp"
#include "litrev/error.hpp"

namespace litrev {

// ---------------------------------------------------------------------------
// Requests and source selection

void SummaryRequest::validate() const {
  if (trim(text).empty()) throw Error(ErrorKind::invalid_argument, "summary request text is empty", "backends");
  if (word_cap < 1) throw Error(ErrorKind::invalid_argument, "word cap must be at least 1", "backends");
}

std::string_view to_string(SourcePolicy policy) {
  switch (policy) {
    case SourcePolicy::automatic: return "auto";
    case SourcePolicy::conclusion: return "conclusion";
    case SourcePolicy::aic: return "aic";
    case SourcePolicy::full: return "full";
  }
  return "auto";
}

SourcePolicy parse_source_policy(std::string_view text) {
  if (text == "auto") return SourcePolicy::automatic;
  if (text == "conclusion") return SourcePolicy::conclusion;
  if (text == "aic") return SourcePolicy::aic;
  if (text == "full") return SourcePolicy::full;
  throw Error(ErrorKind::config, "unknown source policy '" + std::string(text) + "' (auto|conclusion|aic|full)",
              "backends");
}

std::string select_source_text(const SourceDocument& doc, SourcePolicy policy) {
  switch (policy) {
    case SourcePolicy::conclusion: {
      auto sections = extract_sections(doc.full_text);
      if (sections.conclusion) return *sections.conclusion;
      return extract_aic(doc);
    }
    case SourcePolicy::aic:
      return extract_aic(doc);
    case SourcePolicy::full:
    case SourcePolicy::automatic:
      return doc.full_text;
  }
  return doc.full_text;
}

// ---------------------------------------------------------------------------
// Frequency backend

SummaryResult FreqBackend::summarize(const SummaryRequest& request) {
  request.validate();
  auto result = summarize_freq(request.text, config_);
  result.backend_id = id();
  result.diagnostics["word_count"] = std::to_string(word_count(result.summary));
  return result;
}

// ---------------------------------------------------------------------------
// Retrieval

std::vector<std::string> unigram_set(std::string_view text) {
  std::vector<std::string> terms;
  for (auto& t : tokenize(text))
    if (!t.is_punct && !t.is_stopword) terms.push_back(std::move(t.text));
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  return terms;
}

double jaccard(std::span<const std::string> a, std::span<const std::string> b) {
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  std::size_t uni = a.size() + b.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

KnowledgeBase::KnowledgeBase(DatasetSplit split) : split_(std::move(split)) {
  terms_.reserve(split_.records.size());
  for (std::size_t i = 0; i < split_.records.size(); ++i) {
    terms_.push_back(unigram_set(aic_source_text(split_.records[i])));
    for (const auto& term : terms_.back()) postings_[term].push_back(i);
  }
}

std::vector<Exemplar> KnowledgeBase::retrieve(std::string_view query, std::size_t k) const {
  if (k == 0 || split_.records.empty()) return {};
  auto q = unigram_set(query);

  std::vector<double> similarity(split_.records.size(), 0.0);
  std::vector<bool> touched(split_.records.size(), false);
  for (const auto& term : q) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    for (auto idx : it->second) {
      if (touched[idx]) continue;
      touched[idx] = true;
      similarity[idx] = jaccard(q, terms_[idx]);
    }
  }

  std::vector<std::size_t> order(split_.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto take = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (similarity[a] != similarity[b]) return similarity[a] > similarity[b];
                      return split_.records[a].paper_id < split_.records[b].paper_id;
                    });

  std::vector<Exemplar> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back({split_.records[order[i]], similarity[order[i]]});
  return out;
}

std::vector<Exemplar> retrieve_exemplars(const KnowledgeBase& kb, std::string_view query_text, std::size_t k) {
  return kb.retrieve(query_text, k);
}

// ---------------------------------------------------------------------------
// Prompting

std::shared_ptr<InflightLimiter> default_llm_limiter() {
  static auto limiter = std::make_shared<InflightLimiter>(2);
  return limiter;
}

void LlmConfig::validate() const {
  try {
    Url::parse(endpoint_url);
  } catch (const Error&) {
    throw Error(ErrorKind::config, "llm endpoint_url is not a valid http(s) URL: " + endpoint_url, "llm");
  }
  if (model_name.empty()) throw Error(ErrorKind::config, "llm model_name is empty", "llm");
  if (temperature < 0.0) throw Error(ErrorKind::config, "llm temperature must be >= 0", "llm");
  if (max_retries < 0) throw Error(ErrorKind::config, "llm max_retries must be >= 0", "llm");
  if (request_timeout.count() <= 0) throw Error(ErrorKind::config, "llm request_timeout must be positive", "llm");
}

std::string_view literature_review_instruction() { return bundled::literature_review_system_prompt_v1(); }

std::string truncate_at_whitespace(std::string_view text, std::size_t budget) {
  if (text.size() <= budget) return std::string(text);
  auto cut = text.find_last_of(" \t\n\r", budget);
  if (cut == std::string_view::npos || cut == 0) {
    cut = budget;
    while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
  }
  return std::string(text.substr(0, cut));
}

PromptPayload build_llm_prompt(const SummaryRequest& request, std::span<const Exemplar> exemplars,
                               const LlmConfig& config) {
  PromptPayload payload;
  payload.system = std::string(literature_review_instruction());
  if (!exemplars.empty()) {
    payload.system += "\n\nExamples from the knowledge base, each an \"input\" with its expected \"output\":";
    for (std::size_t i = 0; i < exemplars.size(); ++i) {
      const auto& r = exemplars[i].record;
      payload.system += "\n\nExample " + std::to_string(i + 1) + "\ninput: ";
      payload.system += truncate_at_whitespace(aic_source_text(r), config.exemplar_input_chars);
      payload.system += "\noutput: " + (r.targets.empty() ? std::string() : r.targets.front());
    }
  }

  std::string& user = payload.user;
  const auto& m = request.metadata;
  if (!m.title.empty()) user += "Title: " + m.title + "\n";
  if (!m.first_author.empty()) user += "First author: " + m.first_author + "\n";
  if (!m.doi.empty()) user += "DOI: " + m.doi + "\n";
  if (!user.empty()) user += "\n";
  user += "Paper text:\n";
  user += truncate_at_whitespace(request.text, config.input_token_budget);

  if (!request.prior_entries.empty()) {
    user += "\n\n";
    user += kPriorEntriesHeader;
    const auto skip = request.prior_entries.size() > kMaxPriorEntries ? request.prior_entries.size() - kMaxPriorEntries
                                                                      : 0;
    for (std::size_t i = skip; i < request.prior_entries.size(); ++i)
      user += "\n" + std::to_string(i - skip + 1) + ". " + request.prior_entries[i];
  }
  return payload;
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
}

// ---------------------------------------------------------------------------
// Chat completion

LlmCompletion call_llm(const PromptPayload& payload, const LlmConfig& config, HttpTransport& transport,
                       const EnvLookup& env, const SleepFn& sleep, InflightLimiter* limiter) {
  config.validate();
  std::optional<std::string> key;
  if (!config.api_key_env.empty()) {
    key = env(config.api_key_env);
    if (!key)
      throw Error(ErrorKind::config, "environment variable " + config.api_key_env + " holding the API key is not set",
                  "llm");
  }

  nlohmann::json body = {{"model", config.model_name},
                         {"temperature", config.temperature},
                         {"messages",
                          {{{"role", "system"}, {"content", payload.system}},
                           {{"role", "user"}, {"content", payload.user}}}}};
  HttpRequest request;
  request.method = "POST";
  request.url = config.endpoint_url;
  request.body = body.dump();
  request.content_type = "application/json";
  request.timeout = config.request_timeout;
  if (key) request.headers.emplace_back("Authorization", "Bearer " + *key);

  LlmCompletion completion;
  std::string last_error;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0) {
      sleep(config.backoff.delay(attempt - 1));
      ++completion.retries;
    }
    HttpResponse response;
    try {
      std::optional<InflightLimiter::Slot> slot;
      if (limiter) slot.emplace(*limiter);
      ++completion.requests;
      response = transport.send(request);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::transport) throw Error(e.kind(), e.what(), "llm");
      last_error = e.what();
      continue;
    }
    if (response.status == 429 || response.status >= 500) {
      last_error = "HTTP " + std::to_string(response.status) + ": " + excerpt(response.body);
      continue;
    }
    if (response.status != 200)
      throw Error(ErrorKind::request,
                  "chat completion failed with HTTP " + std::to_string(response.status) + ": " + excerpt(response.body),
                  "llm");
    try {
      auto j = nlohmann::json::parse(response.body);
      completion.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::protocol, std::string("unexpected chat completion response: ") + e.what(), "llm");
    }
    return completion;
  }
  throw Error(ErrorKind::transport,
              "chat completion failed after " + std::to_string(completion.requests) + " request(s): " + last_error,
              "llm");
}

SummaryResult parse_llm_response(std::string_view raw, const SummaryRequest& request) {
  (void)request;
  SummaryResult result;
  result.backend_id = "llm";
  auto text = trim(raw);

  constexpr std::string_view banned = "literature review of";
  auto first_line_end = text.find('\n');
  auto first_line = text.substr(0, first_line_end);
  std::string lowered(first_line.substr(0, banned.size()));
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lowered == banned) {
    text = first_line_end == std::string_view::npos ? std::string_view{} : trim(text.substr(first_line_end + 1));
    result.diagnostics["stripped_heading"] = "true";
  }

  result.summary = std::string(text);
  result.degenerate = result.summary.empty();
  result.diagnostics["word_count"] = std::to_string(word_count(result.summary));
  return result;
}

LlmBackend::LlmBackend(LlmConfig config, std::shared_ptr<const KnowledgeBase> knowledge_base,
                       std::shared_ptr<HttpTransport> transport, EnvLookup env, SleepFn sleep,
                       std::shared_ptr<InflightLimiter> limiter)
    : config_(std::move(config)),
      knowledge_base_(std::move(knowledge_base)),
      transport_(std::move(transport)),
      env_(std::move(env)),
      sleep_(std::move(sleep)),
      limiter_(std::move(limiter)) {
  config_.validate();
}

void LlmBackend::check_credentials() const {
  if (!config_.api_key_env.empty() && !env_(config_.api_key_env))
    throw Error(ErrorKind::config, "environment variable " + config_.api_key_env + " holding the API key is not set",
                "llm");
}

SummaryResult LlmBackend::summarize(const SummaryRequest& request) {
  request.validate();
  check_credentials();
  std::vector<Exemplar> exemplars;
  if (knowledge_base_) exemplars = knowledge_base_->retrieve(request.text, config_.exemplar_count);
  auto payload = build_llm_prompt(request, exemplars, config_);
  auto completion = call_llm(payload, config_, *transport_, env_, sleep_, limiter_.get());
  auto result = parse_llm_response(completion.text, request);
  result.diagnostics["retries"] = std::to_string(completion.retries);
  result.diagnostics["requests"] = std::to_string(completion.requests);
  std::string ids;
  for (const auto& e : exemplars) ids += (ids.empty() ? "" : ",") + e.record.paper_id;
  result.diagnostics["exemplars"] = ids;
  return result;
}

// ---------------------------------------------------------------------------
// External service

SummaryResult call_external_backend(const SummaryRequest& request, const ExternalConfig& config,
                                    HttpTransport& transport, const SleepFn& sleep) {
  request.validate();
  HttpRequest http;
  http.method = "POST";
  http.url = config.endpoint;
  http.content_type = "application/json";
  http.timeout = config.timeout;
  http.body = nlohmann::json{{"text", request.text}, {"word_cap", request.word_cap}}.dump();

  std::string last_error;
  int attempts = 0;
  for (int attempt = 0; attempt <= config.retries; ++attempt) {
    if (attempt > 0) sleep(config.backoff.delay(attempt - 1));
    ++attempts;
    HttpResponse response;
    try {
      response = transport.send(http);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::transport) throw Error(e.kind(), e.what(), "external");
      last_error = e.what();
      continue;
    }
    if (response.status >= 500 && attempt < config.retries) {
      last_error = "HTTP " + std::to_string(response.status);
      continue;
    }
    if (response.status != 200)
      throw Error(ErrorKind::request,
                  "summarization service returned HTTP " + std::to_string(response.status) + ": " +
                      excerpt(response.body),
                  "external");

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(response.body);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::protocol, std::string("summarization service sent invalid JSON: ") + e.what(),
                  "external");
    }
    if (!j.is_object() || !j.contains("summary") || !j["summary"].is_string())
      throw Error(ErrorKind::protocol, "summarization service response lacks a string \"summary\"", "external");

    SummaryResult result;
    result.backend_id = "external";
    result.summary = std::string(trim(j["summary"].get<std::string>()));
    result.degenerate = result.summary.empty();
    result.diagnostics["attempts"] = std::to_string(attempts);
    result.diagnostics["word_count"] = std::to_string(word_count(result.summary));
    return result;
  }
  throw Error(ErrorKind::transport,
              "summarization service unreachable after " + std::to_string(attempts) + " attempt(s): " + last_error,
              "external");
}

SummaryResult ExternalBackend::summarize(const SummaryRequest& request) {
  return call_external_backend(request, config_, *transport_, sleep_);
}

}  // namespace litrev
