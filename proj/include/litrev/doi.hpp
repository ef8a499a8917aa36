#pragma once

#include <chrono>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "litrev/docextract.hpp"
#include "litrev/http.hpp"

namespace litrev {

struct DoiClientConfig {
  std::string base_url = "https://doi.org/";
  std::chrono::milliseconds timeout{10000};
  int retries = 2;
  // Public DOI services ask clients to identify themselves with a contact.
  std::string user_agent = "litrev/0.1 (mailto:litrev-user@example.org)";
  Backoff backoff;

  void validate() const;
};

// Strips "doi:" and "https://doi.org/" style prefixes and surrounding space.
std::string normalize_doi(std::string_view doi);
bool is_valid_doi(std::string_view doi);

// Title and first author from a CSL-JSON citation record.
PaperMetadata parse_csl_json(std::string_view body, const std::string& doi);

// Resolves DOIs through content negotiation (Accept: CSL JSON), retrying
// 5xx responses and transport failures. Successful lookups are cached for
// the lifetime of the client; concurrent lookups of one DOI share a request.
class DoiClient {
 public:
  explicit DoiClient(DoiClientConfig config, std::shared_ptr<HttpTransport> transport = make_http_transport(),
                     SleepFn sleep = real_sleep());

  PaperMetadata fetch(std::string_view doi);

  const DoiClientConfig& config() const { return config_; }

 private:
  PaperMetadata fetch_uncached(const std::string& doi);

  DoiClientConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  SleepFn sleep_;
  std::mutex mutex_;
  std::map<std::string, std::shared_future<PaperMetadata>> cache_;
};

// Uses a process-wide client per base URL.
PaperMetadata fetch_doi_metadata(std::string_view doi, const DoiClientConfig& config);

}  // namespace litrev
