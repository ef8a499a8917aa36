#include <httplib.h>

#include <charconv>
#include <thread>

#include "litrev/app.hpp"
#include "litrev/error.hpp"

namespace litrev {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, std::string_view message) {
  send_json(res, status, {{"error", message}});
}

std::optional<std::string> field(const httplib::Request& req, const std::string& name) {
  if (!req.has_file(name)) return std::nullopt;
  return req.get_file_value(name).content;
}

}  // namespace

struct ReviewServer::Impl {
  AppConfig config;
  httplib::Server server;
  std::thread thread;
};

ReviewServer::ReviewServer(AppConfig config, std::shared_ptr<AppContext> context)
    : impl_(std::make_unique<Impl>()), jobs_(std::make_unique<JobManager>(config, std::move(context))) {
  impl_->config = std::move(config);
  auto& server = impl_->server;
  auto& jobs = *jobs_;
  const auto& service = impl_->config.service;

  server.set_payload_max_length(service.max_upload_bytes);
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    std::string message = res.status == 413 ? "upload exceeds the size limit" : httplib::status_message(res.status);
    send_error(res, res.status, message);
    return httplib::Server::HandlerResponse::Handled;
  });

  server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });

  server.Post("/api/reviews", [&jobs](const httplib::Request& req, httplib::Response& res) {
    if (!req.is_multipart_form_data()) return send_error(res, 400, "expected multipart/form-data");

    std::vector<PaperInput> files;
    for (const auto& [name, part] : req.files)
      if (!part.filename.empty()) files.push_back({part.filename, part.content});
    if (files.empty()) return send_error(res, 400, "no files uploaded");

    JobParams params;
    if (auto b = field(req, "backend")) params.backend = *b;
    if (auto w = field(req, "word_cap")) {
      std::size_t cap = 0;
      auto [end, ec] = std::from_chars(w->data(), w->data() + w->size(), cap);
      if (ec != std::errc{} || end != w->data() + w->size() || cap < 1)
        return send_error(res, 400, "word_cap must be a positive integer");
      params.word_cap = cap;
    }
    if (auto p = field(req, "prior_entries")) {
      try {
        auto j = json::parse(*p);
        params.prior_entries = j.get<std::vector<std::string>>();
      } catch (const json::exception&) {
        return send_error(res, 400, "prior_entries must be a JSON array of strings");
      }
    }

    try {
      auto id = jobs.create(std::move(files), std::move(params));
      send_json(res, 202, {{"job_id", id}});
    } catch (const Error& e) {
      send_error(res, e.kind() == ErrorKind::config ? 422 : 400, e.what());
    }
  });

  server.Get(R"(/api/reviews/([^/]+))", [&jobs](const httplib::Request& req, httplib::Response& res) {
    auto state = jobs.snapshot(req.matches[1].str());
    if (!state) return send_error(res, 404, "unknown job id");
    send_json(res, 200, state->to_json());
  });

  if (!service.static_dir.empty()) server.set_mount_point("/", service.static_dir.string());
}

ReviewServer::~ReviewServer() { stop(); }

int ReviewServer::start() {
  const auto& service = impl_->config.service;
  int port = service.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(service.host);
    if (port < 0) throw Error(ErrorKind::config, "cannot bind " + service.host, "server");
  } else if (!impl_->server.bind_to_port(service.host, port)) {
    throw Error(ErrorKind::config, "cannot bind " + service.host + ":" + std::to_string(port), "server");
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void ReviewServer::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

void ReviewServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  wait();
}

}  // namespace litrev
