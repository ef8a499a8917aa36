#include "litrev/doi.hpp"

#include <regex>

#include <json.hpp>

#include "litrev/error.hpp"

namespace litrev {

namespace {

bool unreserved(unsigned char c) {
  return std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~' || c == '/' || c == ':' || c == '(' ||
         c == ')';
}

std::string percent_encode(std::string_view s) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (unreserved(c)) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xF];
    }
  }
  return out;
}

std::string json_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array() && !v.empty() && v.front().is_string()) return v.front().get<std::string>();
  return {};
}

}  // namespace

void DoiClientConfig::validate() const {
  if (retries < 0) throw Error(ErrorKind::config, "doi retries must be >= 0", "doi");
  if (timeout.count() <= 0) throw Error(ErrorKind::config, "doi timeout must be positive", "doi");
  if (user_agent.find("mailto:") == std::string::npos && user_agent.find("http") == std::string::npos)
    throw Error(ErrorKind::config, "doi user_agent must include a contact URL or mailto: address", "doi");
  Url::parse(base_url);
}

std::string normalize_doi(std::string_view doi) {
  auto d = trim(doi);
  for (std::string_view prefix : {"https://doi.org/", "http://doi.org/", "https://dx.doi.org/", "http://dx.doi.org/",
                                  "doi:", "DOI:"}) {
    if (d.starts_with(prefix)) {
      d = trim(d.substr(prefix.size()));
      break;
    }
  }
  return std::string(d);
}

bool is_valid_doi(std::string_view doi) {
  static const std::regex pattern(R"(^10\.[0-9]{4,9}(?:\.[0-9]+)*/\S+$)");
  return std::regex_match(doi.begin(), doi.end(), pattern);
}

PaperMetadata parse_csl_json(std::string_view body, const std::string& doi) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::protocol, "DOI metadata for " + doi + " is not JSON: " + e.what(), "doi");
  }
  if (!j.is_object()) throw Error(ErrorKind::protocol, "DOI metadata for " + doi + " is not an object", "doi");

  PaperMetadata meta;
  meta.doi = doi;
  meta.source = MetadataSource::doi_lookup;
  if (auto t = j.find("title"); t != j.end()) meta.title = std::string(trim(json_text(*t)));

  if (auto authors = j.find("author"); authors != j.end() && authors->is_array()) {
    for (const auto& a : *authors) {
      std::string family = a.contains("family") ? json_text(a["family"]) : "";
      std::string given = a.contains("given") ? json_text(a["given"]) : "";
      std::string literal = a.contains("literal") ? json_text(a["literal"]) : "";
      if (!family.empty()) {
        meta.first_author = given.empty() ? family : family + ", " + given;
      } else if (!literal.empty()) {
        meta.first_author = literal;
      }
      if (!meta.first_author.empty()) break;
    }
  }
  if (meta.title.empty() || meta.first_author.empty())
    throw Error(ErrorKind::protocol, "DOI metadata for " + doi + " lacks a title or author", "doi");
  return meta;
}

DoiClient::DoiClient(DoiClientConfig config, std::shared_ptr<HttpTransport> transport, SleepFn sleep)
    : config_(std::move(config)), transport_(std::move(transport)), sleep_(std::move(sleep)) {
  config_.validate();
}

PaperMetadata DoiClient::fetch(std::string_view raw_doi) {
  auto doi = normalize_doi(raw_doi);
  if (!is_valid_doi(doi))
    throw Error(ErrorKind::validation, "not a DOI: '" + std::string(raw_doi) + "'", "doi");

  std::promise<PaperMetadata> promise;
  std::shared_future<PaperMetadata> future;
  bool owner = false;
  {
    std::lock_guard lock(mutex_);
    auto [it, inserted] = cache_.try_emplace(doi);
    if (inserted) {
      it->second = promise.get_future().share();
      owner = true;
    }
    future = it->second;
  }
  if (!owner) return future.get();

  try {
    auto meta = fetch_uncached(doi);
    promise.set_value(meta);
    return meta;
  } catch (...) {
    {
      std::lock_guard lock(mutex_);
      cache_.erase(doi);  // failures are not cached
    }
    promise.set_exception(std::current_exception());
    throw;
  }
}

PaperMetadata DoiClient::fetch_uncached(const std::string& doi) {
  HttpRequest request;
  request.url = config_.base_url + percent_encode(doi);
  request.timeout = config_.timeout;
  request.headers = {{"Accept", "application/vnd.citationstyles.csl+json"}, {"User-Agent", config_.user_agent}};

  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) sleep_(config_.backoff.delay(attempt - 1));
    HttpResponse response;
    try {
      response = transport_->send(request);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::transport) throw;
      last_error = e.what();
      continue;
    }
    if (response.status == 200) return parse_csl_json(response.body, doi);
    if (response.status == 404) throw Error(ErrorKind::not_found, "DOI not found: " + doi, "doi");
    if (response.status >= 500) {
      last_error = "HTTP " + std::to_string(response.status);
      continue;
    }
    throw Error(ErrorKind::request,
                "DOI lookup for " + doi + " failed with HTTP " + std::to_string(response.status) + ": " +
                    excerpt(response.body),
                "doi");
  }
  throw Error(ErrorKind::transport,
              "DOI lookup for " + doi + " failed after " + std::to_string(config_.retries + 1) +
                  " attempt(s): " + last_error,
              "doi");
}

PaperMetadata fetch_doi_metadata(std::string_view doi, const DoiClientConfig& config) {
  static std::mutex mutex;
  static std::map<std::string, std::unique_ptr<DoiClient>> clients;
  DoiClient* client = nullptr;
  {
    std::lock_guard lock(mutex);
    auto& slot = clients[config.base_url + "\n" + config.user_agent];
    if (!slot) slot = std::make_unique<DoiClient>(config);
    client = slot.get();
  }
  return client->fetch(doi);
}

}  // namespace litrev
