#include "litrev/app.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "litrev/error.hpp"
#include "litrev/textcore.hpp"

namespace litrev {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::config, msg, "app"); }

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, std::string_view where) {
  for (const auto& [key, _] : j.items()) {
    if (key.find("api_key") != std::string::npos && key != "api_key_env")
      config_error("config key '" + std::string(where) + key +
                   "' is not allowed: API keys are read from the environment variable named by llm.api_key_env");
    if (std::find(known.begin(), known.end(), key) == known.end())
      config_error("unknown config key '" + std::string(where) + key + "'");
  }
}

template <typename T>
void read(const json& j, std::string_view key, T& out, std::string_view where) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    config_error("config key '" + std::string(where) + std::string(key) + "' has the wrong type");
  }
}

void read_ms(const json& j, std::string_view key, std::chrono::milliseconds& out, std::string_view where) {
  long long ms = out.count();
  read(j, key, ms, where);
  out = std::chrono::milliseconds(ms);
}

void read_path(const json& j, std::string_view key, fs::path& out, std::string_view where) {
  std::string s = out.string();
  read(j, key, s, where);
  out = s;
}

const json& section(const json& j, std::string_view key) {
  static const json empty = json::object();
  auto it = j.find(key);
  if (it == j.end()) return empty;
  if (!it->is_object()) config_error("config key '" + std::string(key) + "' must be an object");
  return *it;
}

std::string_view to_string(ReferencePolicy p) { return p == ReferencePolicy::max ? "max" : "first"; }

std::string_view to_string(TokenPattern p) {
  return p == TokenPattern::words_with_joiners ? "words_with_joiners" : "alnum_runs";
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path.string(), "app");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class NullBuffer : public std::streambuf {
 protected:
  int overflow(int c) override { return c; }
};

std::ostream& null_stream() {
  static NullBuffer buffer;
  static std::ostream stream(&buffer);
  return stream;
}

std::string doi_for(const std::map<std::string, std::string>& manifest, const fs::path& path) {
  if (auto it = manifest.find(path.string()); it != manifest.end()) return it->second;
  if (auto it = manifest.find(path.filename().string()); it != manifest.end()) return it->second;
  return {};
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

void AppConfig::validate() const {
  if (backend.empty()) config_error("backend must not be empty");
  if (word_cap < 1) config_error("word_cap must be at least 1");
  if (!(freq.ratio > 0.0 && freq.ratio <= 1.0)) config_error("freq.ratio must be in (0, 1]");
  stopword_list(freq.tokenizer.stopword_list_id);
  for (const auto& s : {split, knowledge_base_split})
    if (s != "train" && s != "validation" && s != "test")
      config_error("split must be train, validation or test, got '" + s + "'");
  llm.validate();
  doi.validate();
  if (external.retries < 0) config_error("external.retries must be >= 0");
  if (external.timeout.count() <= 0) config_error("external.timeout_ms must be positive");
  if (service.port < 0 || service.port > 65535) config_error("service.port must be in 0..65535");
  if (service.max_upload_bytes == 0) config_error("service.max_upload_bytes must be positive");
  for (const auto* p : {&dataset, &knowledge_base, &manifest, &service.static_dir})
    if (!p->empty() && !fs::exists(*p)) config_error("path does not exist: " + p->string());
}

void apply_config_json(AppConfig& c, const json& j) {
  if (!j.is_object()) config_error("config must be a JSON object");
  reject_unknown(j,
                 {"backend", "dataset", "split", "knowledge_base", "knowledge_base_split", "source_policy",
                  "ref_policy", "word_cap", "out", "manifest", "layout", "markdown_heading", "fallback_to_freq",
                  "eval_threads", "freq", "llm", "external", "doi", "service"},
                 "");
  read(j, "backend", c.backend, "");
  read_path(j, "dataset", c.dataset, "");
  read(j, "split", c.split, "");
  read_path(j, "knowledge_base", c.knowledge_base, "");
  read(j, "knowledge_base_split", c.knowledge_base_split, "");
  if (j.contains("source_policy")) {
    std::string s;
    read(j, "source_policy", s, "");
    c.source_policy = parse_source_policy(s);
  }
  if (j.contains("ref_policy")) {
    std::string s;
    read(j, "ref_policy", s, "");
    if (s == "max") c.ref_policy = ReferencePolicy::max;
    else if (s == "first") c.ref_policy = ReferencePolicy::first;
    else config_error("ref_policy must be max or first");
  }
  read(j, "word_cap", c.word_cap, "");
  read_path(j, "out", c.out, "");
  read_path(j, "manifest", c.manifest, "");
  if (j.contains("layout")) {
    std::string s;
    read(j, "layout", s, "");
    if (s == "paragraphs") c.layout = ReviewLayout::paragraphs;
    else if (s == "single_block") c.layout = ReviewLayout::single_block;
    else config_error("layout must be paragraphs or single_block");
  }
  read(j, "markdown_heading", c.markdown_heading, "");
  read(j, "fallback_to_freq", c.fallback_to_freq, "");
  read(j, "eval_threads", c.eval_threads, "");

  const auto& f = section(j, "freq");
  reject_unknown(f, {"ratio", "stopwords", "lowercase", "token_pattern"}, "freq.");
  read(f, "ratio", c.freq.ratio, "freq.");
  read(f, "stopwords", c.freq.tokenizer.stopword_list_id, "freq.");
  read(f, "lowercase", c.freq.tokenizer.lowercase, "freq.");
  if (f.contains("token_pattern")) {
    std::string s;
    read(f, "token_pattern", s, "freq.");
    if (s == "words_with_joiners") c.freq.tokenizer.token_pattern = TokenPattern::words_with_joiners;
    else if (s == "alnum_runs") c.freq.tokenizer.token_pattern = TokenPattern::alnum_runs;
    else config_error("freq.token_pattern must be words_with_joiners or alnum_runs");
  }

  const auto& l = section(j, "llm");
  reject_unknown(l,
                 {"endpoint_url", "model_name", "api_key_env", "temperature", "max_retries", "request_timeout_ms",
                  "exemplar_count", "input_token_budget", "exemplar_input_chars", "max_inflight"},
                 "llm.");
  read(l, "endpoint_url", c.llm.endpoint_url, "llm.");
  read(l, "model_name", c.llm.model_name, "llm.");
  read(l, "api_key_env", c.llm.api_key_env, "llm.");
  read(l, "temperature", c.llm.temperature, "llm.");
  read(l, "max_retries", c.llm.max_retries, "llm.");
  read_ms(l, "request_timeout_ms", c.llm.request_timeout, "llm.");
  read(l, "exemplar_count", c.llm.exemplar_count, "llm.");
  read(l, "input_token_budget", c.llm.input_token_budget, "llm.");
  read(l, "exemplar_input_chars", c.llm.exemplar_input_chars, "llm.");
  read(l, "max_inflight", c.llm.max_inflight, "llm.");

  const auto& e = section(j, "external");
  reject_unknown(e, {"endpoint", "timeout_ms", "retries"}, "external.");
  read(e, "endpoint", c.external.endpoint, "external.");
  read_ms(e, "timeout_ms", c.external.timeout, "external.");
  read(e, "retries", c.external.retries, "external.");

  const auto& d = section(j, "doi");
  reject_unknown(d, {"base_url", "timeout_ms", "retries", "user_agent"}, "doi.");
  read(d, "base_url", c.doi.base_url, "doi.");
  read_ms(d, "timeout_ms", c.doi.timeout, "doi.");
  read(d, "retries", c.doi.retries, "doi.");
  read(d, "user_agent", c.doi.user_agent, "doi.");

  const auto& s = section(j, "service");
  reject_unknown(s, {"host", "port", "max_upload_bytes", "jobs_dir", "static_dir"}, "service.");
  read(s, "host", c.service.host, "service.");
  read(s, "port", c.service.port, "service.");
  read(s, "max_upload_bytes", c.service.max_upload_bytes, "service.");
  read_path(s, "jobs_dir", c.service.jobs_dir, "service.");
  read_path(s, "static_dir", c.service.static_dir, "service.");
}

AppConfig load_config_file(const fs::path& path) {
  auto text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  AppConfig config;
  apply_config_json(config, j);
  return config;
}

json score_affecting_config(const AppConfig& c, std::string_view backend_id) {
  json j = {
      {"backend", backend_id},
      {"split", c.split},
      {"source_policy", to_string(c.source_policy)},
      {"ref_policy", to_string(c.ref_policy)},
  };
  if (backend_id == "freq") {
    j["freq"] = {{"ratio", c.freq.ratio},
                 {"stopwords", c.freq.tokenizer.stopword_list_id},
                 {"lowercase", c.freq.tokenizer.lowercase},
                 {"token_pattern", to_string(c.freq.tokenizer.token_pattern)}};
  } else if (backend_id == "llm") {
    j["llm"] = {{"endpoint_url", c.llm.endpoint_url},
                {"model_name", c.llm.model_name},
                {"temperature", c.llm.temperature},
                {"exemplar_count", c.llm.exemplar_count},
                {"input_token_budget", c.llm.input_token_budget},
                {"exemplar_input_chars", c.llm.exemplar_input_chars},
                {"knowledge_base", c.knowledge_base.string()},
                {"knowledge_base_split", c.knowledge_base_split},
                {"word_cap", c.word_cap}};
  } else if (backend_id == "external") {
    j["external"] = {{"endpoint", c.external.endpoint}, {"word_cap", c.word_cap}};
  }
  return j;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::invalid_argument, "SHA-256 failed", "app");
  std::ostringstream out;
  for (unsigned i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

// ---------------------------------------------------------------------------
// Context and backends

std::shared_ptr<const KnowledgeBase> AppContext::knowledge_base(const AppConfig& config) {
  if (config.knowledge_base.empty()) return nullptr;
  std::lock_guard lock(mutex_);
  if (!kb_) kb_ = std::make_shared<KnowledgeBase>(load_jsonl_split(config.knowledge_base, config.knowledge_base_split));
  return kb_;
}

DoiClient& AppContext::doi(const AppConfig& config) {
  std::lock_guard lock(mutex_);
  if (!doi_client) doi_client = std::make_shared<DoiClient>(config.doi, transport, sleep);
  return *doi_client;
}

std::unique_ptr<Backend> make_backend(std::string_view id, const AppConfig& config, AppContext& context) {
  if (auto it = context.extra_backends.find(id); it != context.extra_backends.end()) return it->second(config);
  if (id == "freq") return std::make_unique<FreqBackend>(config.freq);
  if (id == "llm") {
    if (!context.llm_limiter)
      context.llm_limiter = std::make_shared<InflightLimiter>(static_cast<std::ptrdiff_t>(config.llm.max_inflight));
    auto backend = std::make_unique<LlmBackend>(config.llm, context.knowledge_base(config), context.transport,
                                                context.env, context.sleep, context.llm_limiter);
    backend->check_credentials();
    return backend;
  }
  if (id == "external") return std::make_unique<ExternalBackend>(config.external, context.transport, context.sleep);
  config_error("unknown backend '" + std::string(id) + "' (freq|llm|external)");
}

std::map<std::string, std::string> load_doi_manifest(const fs::path& path) {
  auto text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::schema, "DOI manifest " + path.string() + " is not valid JSON: " + e.what(), "app");
  }
  if (!j.is_object()) throw Error(ErrorKind::schema, "DOI manifest must map file names to DOIs", "app");
  std::map<std::string, std::string> out;
  for (const auto& [name, doi] : j.items()) {
    if (!doi.is_string())
      throw Error(ErrorKind::schema, "DOI manifest entry '" + name + "' is not a string", "app");
    out[name] = doi.get<std::string>();
  }
  return out;
}

// ---------------------------------------------------------------------------
// generate

PaperMetadata resolve_metadata(const SourceDocument& doc, const AppConfig& config, AppContext& context,
                               std::ostream& diag) {
  if (doc.doi && !doc.doi->empty()) {
    try {
      return context.doi(config).fetch(*doc.doi);
    } catch (const Error& e) {
      diag << doc.origin << ": DOI lookup failed (" << e.what() << "); using heuristic metadata\n";
      auto meta = heuristic_metadata(doc);
      meta.doi = normalize_doi(*doc.doi);
      return meta;
    }
  }
  return heuristic_metadata(doc);
}

ReviewEntry process_paper(const SourceDocument& doc, Backend& backend, const AppConfig& config, AppContext& context,
                          std::size_t order, std::vector<std::string> prior_entries, std::ostream& diag) {
  auto metadata = resolve_metadata(doc, config, context, diag);
  auto policy = config.source_policy == SourcePolicy::automatic ? backend.preferred_source() : config.source_policy;

  SummaryRequest request{select_source_text(doc, policy), metadata, config.word_cap, std::move(prior_entries)};
  SummaryResult result;
  try {
    result = backend.summarize(request);
  } catch (const Error& e) {
    if (!config.fallback_to_freq || backend.id() == "freq") throw;
    diag << doc.origin << ": " << backend.id() << " backend failed (" << e.what() << "); falling back to freq\n";
    FreqBackend fallback(config.freq);
    if (config.source_policy == SourcePolicy::automatic)
      request.text = select_source_text(doc, fallback.preferred_source());
    result = fallback.summarize(request);
  }
  return make_entry(result, metadata, order, config.word_cap);
}

GenerateOutcome run_generate(const std::vector<fs::path>& inputs, const AppConfig& config, AppContext& context,
                             std::ostream& diag) {
  // Backend first, so a missing credential fails before any input is read.
  auto backend = make_backend(config.backend, config, context);
  if (inputs.empty()) throw Error(ErrorKind::invalid_argument, "generate needs at least one input file", "app");
  std::map<std::string, std::string> manifest;
  if (!config.manifest.empty()) manifest = load_doi_manifest(config.manifest);

  GenerateOutcome outcome;
  std::vector<ReviewEntry> entries;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& path = inputs[i];
    PaperOutcome paper{path.string(), false, {}};
    try {
      auto doc = load_document(path);
      if (auto doi = doi_for(manifest, path); !doi.empty()) doc.doi = doi;
      std::vector<std::string> prior;
      for (const auto& e : entries) prior.push_back(e.summary);
      entries.push_back(process_paper(doc, *backend, config, context, i, std::move(prior), diag));
      paper.ok = true;
    } catch (const Error& e) {
      paper.error = e.what();
      diag << "skipped " << path.string() << ": " << e.what() << "\n";
    }
    outcome.papers.push_back(std::move(paper));
  }

  if (entries.empty()) {
    outcome.exit_code = 1;
    return outcome;
  }
  outcome.exit_code = entries.size() == inputs.size() ? 0 : 2;
  outcome.review = merge_review(std::move(entries), config.layout);
  outcome.rendered = render_markdown(*outcome.review, {config.markdown_heading});
  return outcome;
}

// ---------------------------------------------------------------------------
// eval / rouge

double EvalReport::failure_rate() const {
  auto total = n_examples + n_failed;
  return total == 0 ? 0.0 : static_cast<double>(n_failed) / static_cast<double>(total);
}

json EvalReport::to_json() const {
  return {{"backend_id", backend_id},
          {"split", split},
          {"n_examples", n_examples},
          {"n_failed", n_failed},
          {"failure_rate", failure_rate()},
          {"config_fingerprint", config_fingerprint},
          {"report", litrev::to_json(report)}};
}

EvalReport run_eval(const DatasetSplit& split, Backend& backend, const AppConfig& config, std::ostream* diag) {
  if (split.records.empty()) throw Error(ErrorKind::invalid_argument, "dataset split is empty", "app");

  const auto n = split.records.size();
  std::vector<std::optional<RougeReport>> scores(n);
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const auto& record = split.records[i];
      try {
        SummaryRequest request;
        request.metadata.title = record.paper_id;
        request.word_cap = config.word_cap;
        auto policy = config.source_policy;
        if (policy == SourcePolicy::automatic || policy == SourcePolicy::aic) {
          request.text = aic_source_text(record);
        } else {
          request.text = select_source_text(SourceDocument{record.paper_id, aic_source_text(record), {}}, policy);
        }
        auto result = backend.summarize(request);
        if (result.degenerate) throw Error(ErrorKind::entry_skipped, "degenerate summary", backend.id());
        if (record.targets.empty()) throw Error(ErrorKind::schema, "record has no targets", "app");
        scores[i] = best_against_references(result.summary, record.targets, config.ref_policy);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  unsigned threads = config.eval_threads ? config.eval_threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  EvalReport out;
  out.backend_id = backend.id();
  out.split = split.name;
  std::vector<RougeReport> ok;
  ok.reserve(n);
  std::string first_error;
  for (std::size_t i = 0; i < n; ++i) {
    if (scores[i]) {
      ok.push_back(*scores[i]);
    } else {
      ++out.n_failed;
      if (first_error.empty()) first_error = split.records[i].paper_id + ": " + errors[i];
      if (diag) *diag << "record " << split.records[i].paper_id << " failed: " << errors[i] << "\n";
    }
  }
  if (ok.empty())
    throw Error(ErrorKind::request, "every record failed; first error: " + first_error, backend.id());
  out.n_examples = ok.size();
  out.report = aggregate_corpus(ok);
  out.config_fingerprint = sha256_hex(score_affecting_config(config, out.backend_id).dump());
  return out;
}

RougeReport run_rouge(const fs::path& candidate, const std::vector<fs::path>& references, ReferencePolicy policy) {
  if (references.empty()) throw Error(ErrorKind::invalid_argument, "rouge needs at least one reference file", "app");
  auto cand = normalize_nfc(read_file(candidate));
  std::vector<std::string> refs;
  for (const auto& r : references) refs.push_back(normalize_nfc(read_file(r)));
  return best_against_references(cand, refs, policy);
}

// ---------------------------------------------------------------------------
// Jobs

std::string_view to_string(JobStatus status) {
  switch (status) {
    case JobStatus::pending: return "pending";
    case JobStatus::running: return "running";
    case JobStatus::done: return "done";
    case JobStatus::failed: return "failed";
  }
  return "unknown";
}

json JobState::to_json() const {
  json papers = json::array();
  for (const auto& p : per_paper) {
    json entry = {{"name", p.name}, {"status", p.ok ? "done" : (p.error.empty() ? "pending" : "failed")}};
    if (!p.error.empty()) entry["error"] = p.error;
    papers.push_back(std::move(entry));
  }
  json j = {{"job_id", job_id},         {"total", total},     {"processed", processed},
            {"state", to_string(state)}, {"per_paper", papers}, {"backend_id", backend_id}};
  j["review"] = review ? json(*review) : json(nullptr);
  j["partial_review"] = partial_review ? json(*partial_review) : json(nullptr);
  return j;
}

JobManager::JobManager(AppConfig config, std::shared_ptr<AppContext> context)
    : config_(std::move(config)), context_(std::move(context)) {
  if (!config_.service.jobs_dir.empty()) fs::create_directories(config_.service.jobs_dir);
}

JobManager::~JobManager() { wait_all(); }

std::string JobManager::next_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << rng();
  return out.str();
}

std::string JobManager::create(std::vector<PaperInput> files, JobParams params) {
  if (params.backend.empty()) params.backend = config_.backend;
  auto backend = make_backend(params.backend, config_, *context_);
  if (files.empty()) throw Error(ErrorKind::invalid_argument, "a review job needs at least one file", "app");
  if (params.word_cap < 1) throw Error(ErrorKind::invalid_argument, "word_cap must be at least 1", "app");

  JobState state;
  state.total = files.size();
  state.backend_id = backend->id();
  for (const auto& f : files) state.per_paper.push_back({f.name, false, {}});

  std::lock_guard lock(mutex_);
  std::string id;
  do id = next_id();
  while (jobs_.contains(id));
  state.job_id = id;
  jobs_.emplace(id, std::move(state));
  workers_.emplace_back(
      [this, id, files = std::move(files), params = std::move(params), b = std::move(backend)]() mutable {
        run(id, std::move(files), std::move(params), std::move(b));
      });
  return id;
}

std::optional<JobState> JobManager::snapshot(const std::string& job_id) const {
  std::lock_guard lock(mutex_);
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) return std::nullopt;
  return it->second;
}

void JobManager::wait_all() {
  std::vector<std::jthread> workers;
  {
    std::lock_guard lock(mutex_);
    workers.swap(workers_);
  }
  for (auto& w : workers)
    if (w.joinable()) w.join();
}

void JobManager::run(std::string job_id, std::vector<PaperInput> files, JobParams params,
                     std::unique_ptr<Backend> backend) {
  {
    std::lock_guard lock(mutex_);
    jobs_[job_id].state = JobStatus::running;
  }
  AppConfig config = config_;
  config.word_cap = params.word_cap;

  std::vector<ReviewEntry> entries;
  for (std::size_t i = 0; i < files.size(); ++i) {
    PaperOutcome outcome{files[i].name, false, {}};
    try {
      auto doc = document_from_bytes(files[i].bytes, guess_kind(files[i].name, files[i].bytes), files[i].name);
      auto prior = params.prior_entries;
      for (const auto& e : entries) prior.push_back(e.summary);
      entries.push_back(process_paper(doc, *backend, config, *context_, i, std::move(prior), null_stream()));
      outcome.ok = true;
    } catch (const std::exception& e) {
      outcome.error = e.what();
    }

    std::optional<std::string> partial;
    if (!entries.empty()) partial = merge_review(entries, config.layout).rendered;
    std::lock_guard lock(mutex_);
    auto& state = jobs_[job_id];
    state.per_paper[i] = std::move(outcome);
    state.processed = i + 1;
    state.partial_review = std::move(partial);
  }

  std::optional<std::string> review;
  if (!entries.empty()) {
    review = render_markdown(merge_review(std::move(entries), config.layout), {config.markdown_heading});
    if (!config.service.jobs_dir.empty()) {
      std::ofstream out(config.service.jobs_dir / (job_id + ".md"), std::ios::binary);
      out << *review;
    }
  }
  std::lock_guard lock(mutex_);
  auto& state = jobs_[job_id];
  state.review = std::move(review);
  state.state = state.review ? JobStatus::done : JobStatus::failed;
}

}  // namespace litrev
