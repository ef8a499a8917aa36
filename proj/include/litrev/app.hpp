#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "litrev/assemble.hpp"
#include "litrev/backends.hpp"
#include "litrev/dataset.hpp"
#include "litrev/doi.hpp"
#include "litrev/rouge.hpp"

namespace litrev {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t max_upload_bytes = 50u * 1024u * 1024u;
  std::filesystem::path jobs_dir;    // finished reviews persisted as <job_id>.md when set
  std::filesystem::path static_dir;  // UI assets served at / when set
};

struct AppConfig {
  std::string backend = "freq";
  std::filesystem::path dataset;         // eval input
  std::string split = "test";
  std::filesystem::path knowledge_base;  // JSONL split used for LLM exemplars
  std::string knowledge_base_split = "train";
  SourcePolicy source_policy = SourcePolicy::automatic;
  ReferencePolicy ref_policy = ReferencePolicy::max;
  std::size_t word_cap = 80;
  std::filesystem::path out;
  std::filesystem::path manifest;
  ReviewLayout layout = ReviewLayout::paragraphs;
  bool markdown_heading = false;
  bool fallback_to_freq = false;  // retry failed papers with the freq backend
  unsigned eval_threads = 0;      // 0 = hardware concurrency

  FreqConfig freq;
  LlmConfig llm;
  ExternalConfig external;
  DoiClientConfig doi;
  ServiceConfig service;

  // Range checks plus existence of every referenced path.
  void validate() const;
};

// Applies a JSON object of config keys onto `config`. Unknown keys and any
// "api_key" entry are rejected: credentials only come from the environment.
void apply_config_json(AppConfig& config, const nlohmann::json& j);
AppConfig load_config_file(const std::filesystem::path& path);

// Stable JSON of every setting that can change evaluation scores.
nlohmann::json score_affecting_config(const AppConfig& config, std::string_view backend_id);
std::string sha256_hex(std::string_view data);

// Shared collaborators, replaceable in tests.
struct AppContext {
  std::shared_ptr<HttpTransport> transport = make_http_transport();
  EnvLookup env = process_env();
  SleepFn sleep = real_sleep();
  std::shared_ptr<InflightLimiter> llm_limiter;  // defaults to one sized by LlmConfig::max_inflight
  std::shared_ptr<DoiClient> doi_client;  // created from AppConfig::doi on first use

  // Extra backends (tests register wrappers here); consulted before the built-ins.
  std::map<std::string, std::function<std::unique_ptr<Backend>(const AppConfig&)>, std::less<>> extra_backends;

  std::shared_ptr<const KnowledgeBase> knowledge_base(const AppConfig& config);
  DoiClient& doi(const AppConfig& config);

 private:
  std::mutex mutex_;
  std::shared_ptr<const KnowledgeBase> kb_;
};

// "freq", "llm" or "external"; anything else raises ErrorKind::config. The LLM
// backend's credentials are checked here.
std::unique_ptr<Backend> make_backend(std::string_view id, const AppConfig& config, AppContext& context);

// JSON object mapping file name (or path as given) to DOI.
std::map<std::string, std::string> load_doi_manifest(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// generate

struct PaperOutcome {
  std::string name;
  bool ok = false;
  std::string error;
};

struct PaperInput {
  std::string name;
  std::string bytes;
};

struct GenerateOutcome {
  int exit_code = 1;  // 0 all papers, 2 some skipped, 1 none
  std::optional<LiteratureReview> review;
  std::string rendered;  // markdown; empty when no review
  std::vector<PaperOutcome> papers;
};

// Metadata for one document: DOI lookup when a DOI is known, heuristic otherwise.
PaperMetadata resolve_metadata(const SourceDocument& doc, const AppConfig& config, AppContext& context,
                               std::ostream& diag);

// load -> sections -> metadata -> summarize -> entry for one paper.
ReviewEntry process_paper(const SourceDocument& doc, Backend& backend, const AppConfig& config, AppContext& context,
                          std::size_t order, std::vector<std::string> prior_entries, std::ostream& diag);

GenerateOutcome run_generate(const std::vector<std::filesystem::path>& inputs, const AppConfig& config,
                             AppContext& context, std::ostream& diag);

// ---------------------------------------------------------------------------
// eval / rouge

struct EvalReport {
  std::string backend_id;
  std::string split;
  std::size_t n_examples = 0;
  std::size_t n_failed = 0;
  RougeReport report;
  std::string config_fingerprint;

  double failure_rate() const;
  nlohmann::json to_json() const;
};

// Scores records in parallel and aggregates in record order, so the report
// does not depend on thread scheduling.
EvalReport run_eval(const DatasetSplit& split, Backend& backend, const AppConfig& config,
                    std::ostream* diag = nullptr);

RougeReport run_rouge(const std::filesystem::path& candidate, const std::vector<std::filesystem::path>& references,
                      ReferencePolicy policy);

// ---------------------------------------------------------------------------
// review jobs

enum class JobStatus { pending, running, done, failed };
std::string_view to_string(JobStatus status);

struct JobState {
  std::string job_id;
  std::size_t total = 0;
  std::size_t processed = 0;
  JobStatus state = JobStatus::pending;
  std::optional<std::string> review;
  std::optional<std::string> partial_review;
  std::vector<PaperOutcome> per_paper;
  std::string backend_id;

  nlohmann::json to_json() const;
};

struct JobParams {
  std::string backend;
  std::size_t word_cap = 80;
  std::vector<std::string> prior_entries;
};

// Runs each job on its own thread; papers within a job go in upload order.
class JobManager {
 public:
  JobManager(AppConfig config, std::shared_ptr<AppContext> context);
  ~JobManager();
  JobManager(const JobManager&) = delete;
  JobManager& operator=(const JobManager&) = delete;

  // Throws ErrorKind::config for an unknown backend and invalid_argument for
  // an empty file list, before anything is queued.
  std::string create(std::vector<PaperInput> files, JobParams params);
  std::optional<JobState> snapshot(const std::string& job_id) const;
  void wait_all();

 private:
  void run(std::string job_id, std::vector<PaperInput> files, JobParams params, std::unique_ptr<Backend> backend);
  std::string next_id();

  AppConfig config_;
  std::shared_ptr<AppContext> context_;
  mutable std::mutex mutex_;
  std::map<std::string, JobState> jobs_;
  std::vector<std::jthread> workers_;
};

// The HTTP API: POST /api/reviews, GET /api/reviews/{id}, GET /healthz.
class ReviewServer {
 public:
  ReviewServer(AppConfig config, std::shared_ptr<AppContext> context);
  ~ReviewServer();

  // Binds and serves on a background thread; returns the bound port
  // (config.service.port, or an ephemeral port when that is 0).
  int start();
  void wait();  // blocks until stop()
  void stop();
  JobManager& jobs() { return *jobs_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::unique_ptr<JobManager> jobs_;
};

}  // namespace litrev
