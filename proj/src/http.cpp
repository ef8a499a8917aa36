#include "litrev/http.hpp"

#include <httplib.h>

#include <cstdlib>
#include <mutex>
#include <thread>

#include "litrev/error.hpp"

namespace litrev {

namespace {

std::string env(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

bool host_bypasses_proxy(const std::string& host) {
  auto no_proxy = env("no_proxy");
  if (no_proxy.empty()) no_proxy = env("NO_PROXY");
  std::size_t pos = 0;
  while (pos <= no_proxy.size()) {
    auto comma = no_proxy.find(',', pos);
    if (comma == std::string::npos) comma = no_proxy.size();
    std::string entry(no_proxy.substr(pos, comma - pos));
    while (!entry.empty() && entry.front() == ' ') entry.erase(entry.begin());
    while (!entry.empty() && entry.back() == ' ') entry.pop_back();
    if (!entry.empty() && entry.front() == '.') entry.erase(entry.begin());
    if (entry == "*") return true;
    if (!entry.empty() && (host == entry || (host.size() > entry.size() && host.ends_with("." + entry))))
      return true;
    pos = comma + 1;
  }
  return false;
}

class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse send(const HttpRequest& request) override {
    auto url = Url::parse(request.url);
    httplib::Client client(url.origin());
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(request.timeout).count();
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(request.timeout).count() % 1000000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    client.set_follow_location(true);

    if (url.host != "localhost" && url.host != "127.0.0.1" && !host_bypasses_proxy(url.host)) {
      auto proxy = url.scheme == "https" ? env("https_proxy") : env("http_proxy");
      if (proxy.empty()) proxy = url.scheme == "https" ? env("HTTPS_PROXY") : env("HTTP_PROXY");
      if (!proxy.empty()) {
        try {
          auto p = Url::parse(proxy.find("://") == std::string::npos ? "http://" + proxy : proxy);
          client.set_proxy(p.host, p.port);
        } catch (const Error&) {
          // Malformed proxy variables are ignored rather than failing every request.
        }
      }
    }

    httplib::Headers headers;
    for (const auto& [k, v] : request.headers) headers.emplace(k, v);

    httplib::Result result{nullptr, httplib::Error::Unknown};
    if (request.method == "GET") {
      result = client.Get(url.path, headers);
    } else if (request.method == "POST") {
      result = client.Post(url.path, headers, request.body,
                           request.content_type.empty() ? "application/octet-stream" : request.content_type);
    } else {
      throw Error(ErrorKind::invalid_argument, "unsupported HTTP method " + request.method, "http");
    }
    if (!result)
      throw Error(ErrorKind::transport, request.method + " " + request.url + ": " + httplib::to_string(result.error()),
                  "http");
    return {result->status, result->body};
  }
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport() { return std::make_shared<HttplibTransport>(); }

std::string Url::origin() const {
  bool default_port = (scheme == "http" && port == 80) || (scheme == "https" && port == 443);
  return scheme + "://" + host + (default_port ? "" : ":" + std::to_string(port));
}

Url Url::parse(std::string_view text) {
  auto bad = [&] { return Error(ErrorKind::invalid_argument, "malformed URL: " + std::string(text), "http"); };
  auto sep = text.find("://");
  if (sep == std::string_view::npos) throw bad();
  Url url;
  url.scheme = std::string(text.substr(0, sep));
  for (auto& c : url.scheme) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (url.scheme != "http" && url.scheme != "https") throw bad();
  auto rest = text.substr(sep + 3);
  auto slash = rest.find_first_of("/?#");
  auto authority = rest.substr(0, slash);
  url.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  if (!url.path.empty() && url.path.front() != '/') url.path.insert(url.path.begin(), '/');
  if (auto at = authority.rfind('@'); at != std::string_view::npos) authority = authority.substr(at + 1);
  if (authority.empty()) throw bad();
  auto colon = authority.rfind(':');
  if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    url.host = std::string(authority.substr(0, colon));
    try {
      url.port = std::stoi(std::string(authority.substr(colon + 1)));
    } catch (...) {
      throw bad();
    }
  } else {
    url.host = std::string(authority);
    url.port = url.scheme == "https" ? 443 : 80;
  }
  if (url.host.empty() || url.port <= 0 || url.port > 65535) throw bad();
  return url;
}

std::chrono::milliseconds Backoff::delay(int attempt) const {
  auto d = base * (1LL << std::min(attempt, 16));
  if (jitter && d.count() > 0) {
    thread_local std::mt19937_64 rng{std::random_device{}()};
    std::uniform_int_distribution<long long> dist(0, d.count() / 2);
    d += std::chrono::milliseconds(dist(rng));
  }
  return d;
}

SleepFn real_sleep() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string excerpt(std::string_view body, std::size_t limit) {
  if (body.size() <= limit) return std::string(body);
  return std::string(body.substr(0, limit)) + "...";
}

}  // namespace litrev
