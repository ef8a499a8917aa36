#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace litrev {

struct HttpRequest {
  std::string method = "GET";
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  std::string content_type;
  std::chrono::milliseconds timeout{10000};
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Sends one request. Implementations throw Error(ErrorKind::transport) when
// no HTTP response was received (connection failure, timeout).
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

// cpp-httplib backed transport. Follows redirects and honours the
// http_proxy / https_proxy / no_proxy environment variables.
std::shared_ptr<HttpTransport> make_http_transport();

struct Url {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path;  // includes query, starts with '/'

  std::string origin() const;
  static Url parse(std::string_view text);  // throws invalid_argument
};

// Exponential backoff: base * 2^attempt, plus up to 50% random jitter when enabled.
struct Backoff {
  std::chrono::milliseconds base{500};
  bool jitter = true;

  std::chrono::milliseconds delay(int attempt) const;
};

// Sleep hook so tests can observe delays without waiting for them.
using SleepFn = std::function<void(std::chrono::milliseconds)>;
SleepFn real_sleep();

std::string excerpt(std::string_view body, std::size_t limit = 200);

}  // namespace litrev
