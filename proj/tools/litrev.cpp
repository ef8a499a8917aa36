// litrev: generate literature reviews, evaluate summarizers, score ROUGE, serve the upload API.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "litrev/app.hpp"
#include "litrev/error.hpp"

namespace fs = std::filesystem;
using namespace litrev;

namespace {

struct Overrides {
  std::optional<std::string> backend;
  std::optional<std::string> dataset;
  std::optional<std::string> split;
  std::optional<std::string> source_policy;
  std::optional<std::string> ref_policy;
  std::optional<std::size_t> word_cap;
  std::optional<std::string> out;
  std::optional<int> port;
  std::optional<std::string> host;
  std::optional<std::string> manifest;
  std::optional<std::string> knowledge_base;
  std::optional<std::string> jobs_dir;
  std::optional<std::string> static_dir;
  std::optional<unsigned> threads;
  bool heading = false;
  bool fallback = false;
};

AppConfig build_config(const std::string& config_path, const Overrides& o) {
  AppConfig c = config_path.empty() ? AppConfig{} : load_config_file(config_path);
  if (o.backend) c.backend = *o.backend;
  if (o.dataset) c.dataset = *o.dataset;
  if (o.split) c.split = *o.split;
  if (o.source_policy) c.source_policy = parse_source_policy(*o.source_policy);
  if (o.ref_policy) c.ref_policy = *o.ref_policy == "first" ? ReferencePolicy::first : ReferencePolicy::max;
  if (o.word_cap) c.word_cap = *o.word_cap;
  if (o.out) c.out = *o.out;
  if (o.port) c.service.port = *o.port;
  if (o.host) c.service.host = *o.host;
  if (o.manifest) c.manifest = *o.manifest;
  if (o.knowledge_base) c.knowledge_base = *o.knowledge_base;
  if (o.jobs_dir) c.service.jobs_dir = *o.jobs_dir;
  if (o.static_dir) c.service.static_dir = *o.static_dir;
  if (o.threads) c.eval_threads = *o.threads;
  if (o.heading) c.markdown_heading = true;
  if (o.fallback) c.fallback_to_freq = true;
  c.validate();
  return c;
}

void write_output(const fs::path& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cannot write " + out.string(), "cli");
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automated literature-review generation and summary evaluation"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its keys")->check(CLI::ExistingFile);

  Overrides o;
  auto add_backend = [&](CLI::App* sub) {
    sub->add_option("--backend", o.backend, "freq | llm | external");
  };

  auto* gen = app.add_subcommand("generate", "Write a literature-review segment for a set of papers");
  std::vector<std::string> inputs;
  gen->add_option("inputs", inputs, "Paper files (PDF or plain text), in review order")->required();
  add_backend(gen);
  gen->add_option("--manifest", o.manifest, "JSON object mapping file name to DOI");
  gen->add_option("--source-policy", o.source_policy, "auto | conclusion | aic | full");
  gen->add_option("--word-cap", o.word_cap, "Maximum words per entry");
  gen->add_option("--out", o.out, "Output markdown file (default: stdout)");
  gen->add_flag("--heading", o.heading, "Start the output with a '## Literature Review' heading");
  gen->add_flag("--fallback-freq", o.fallback, "Retry papers with the freq backend when the chosen one fails");

  auto* eval = app.add_subcommand("eval", "Score a backend on a SciTLDR-style JSONL split");
  add_backend(eval);
  eval->add_option("--dataset", o.dataset, "JSONL file of the split");
  eval->add_option("--split", o.split, "train | validation | test");
  eval->add_option("--source-policy", o.source_policy, "auto | conclusion | aic | full");
  eval->add_option("--ref-policy", o.ref_policy, "max | first")->check(CLI::IsMember({"max", "first"}));
  eval->add_option("--knowledge-base", o.knowledge_base, "JSONL split used for LLM exemplars");
  eval->add_option("--threads", o.threads, "Worker threads (default: all cores)");
  eval->add_option("--out", o.out, "Also write the JSON report here");

  auto* rouge = app.add_subcommand("rouge", "ROUGE-1/2/L/Lsum of a candidate against reference files");
  std::string candidate;
  std::vector<std::string> references;
  rouge->add_option("candidate", candidate, "Candidate summary file")->required();
  rouge->add_option("references", references, "Reference summary files");
  rouge->add_option("--ref-policy", o.ref_policy, "max | first")->check(CLI::IsMember({"max", "first"}));
  rouge->add_option("--out", o.out, "Also write the JSON report here");

  auto* serve = app.add_subcommand("serve", "Run the review-upload HTTP API");
  add_backend(serve);
  serve->add_option("--port", o.port, "Listen port (0 picks a free one)");
  serve->add_option("--host", o.host, "Listen address");
  serve->add_option("--jobs-dir", o.jobs_dir, "Persist finished reviews as <job_id>.md here");
  serve->add_option("--static-dir", o.static_dir, "Serve UI assets from this directory");
  serve->add_option("--knowledge-base", o.knowledge_base, "JSONL split used for LLM exemplars");
  serve->add_option("--word-cap", o.word_cap, "Default maximum words per entry");

  CLI11_PARSE(app, argc, argv);

  try {
    auto config = build_config(config_path, o);
    AppContext context;

    if (gen->parsed()) {
      std::vector<fs::path> paths(inputs.begin(), inputs.end());
      auto outcome = run_generate(paths, config, context, std::cerr);
      if (outcome.review) write_output(config.out, outcome.rendered);
      if (outcome.exit_code == 1) std::cerr << "no paper could be summarized\n";
      return outcome.exit_code;
    }

    if (eval->parsed()) {
      if (config.dataset.empty()) throw Error(ErrorKind::config, "eval needs --dataset", "cli");
      auto split = load_jsonl_split(config.dataset, config.split);
      auto backend = make_backend(config.backend, config, context);
      auto report = run_eval(split, *backend, config, &std::cerr);
      std::cout << format_table(report.report) << "\n" << report.to_json().dump(2) << "\n";
      if (!config.out.empty()) write_output(config.out, report.to_json().dump(2) + "\n");
      return 0;
    }

    if (rouge->parsed()) {
      std::vector<fs::path> refs(references.begin(), references.end());
      auto report = run_rouge(candidate, refs, config.ref_policy);
      std::cout << format_table(report) << "\n" << to_json(report).dump(2) << "\n";
      if (!config.out.empty()) write_output(config.out, to_json(report).dump(2) + "\n");
      return 0;
    }

    if (serve->parsed()) {
      ReviewServer server(config, std::make_shared<AppContext>());
      int port = server.start();
      std::cerr << "listening on http://" << config.service.host << ":" << port << "\n";
      server.wait();
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
