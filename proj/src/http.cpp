#include "prism/http.hpp"

#include <chrono>
#include <memory>
#include <thread>

#include <httplib.h>

#include "prism/errors.hpp"

namespace prism::http {

namespace {

struct ParsedUrl {
  std::string host_port;  // httplib accepts "host:port" or full origin
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint must be a full URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  if (path_start == std::string::npos) {
    out.host_port = url;
    out.path = "/";
  } else {
    out.host_port = url.substr(0, path_start);
    out.path = url.substr(path_start);
  }
  return out;
}

}  // namespace

std::string post_json_with_retry(const std::string& url, const std::string& payload, int attempts,
                                 int backoff_ms) {
  ParsedUrl parsed = parse_url(url);
  if (attempts < 1) attempts = 1;
  int delay = backoff_ms;
  std::string last_error;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
      delay *= 2;
    }
    httplib::Client client(parsed.host_port);
    client.set_connection_timeout(30);
    client.set_read_timeout(300);
    auto res = client.Post(parsed.path, payload, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) return res->body;
    if (res->status == 429 || res->status >= 500) {
      last_error = "status " + std::to_string(res->status);
      continue;
    }
    throw BackendError("request to " + url + " failed with status " + std::to_string(res->status),
                       /*retryable=*/false);
  }
  throw BackendError("request to " + url + " failed after " + std::to_string(attempts) +
                         " attempts: " + last_error,
                     /*retryable=*/true);
}

}  // namespace prism::http
