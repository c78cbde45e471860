#pragma once

#include <string>

namespace prism::http {

// POSTs a JSON payload to a full URL (scheme://host[:port]/path) and returns
// the response body. Retries connection failures, 429 and 5xx with
// exponential backoff starting at backoff_ms; throws BackendError when
// attempts are exhausted (retryable) or on 4xx (not retryable).
std::string post_json_with_retry(const std::string& url, const std::string& payload, int attempts,
                                 int backoff_ms);

}  // namespace prism::http
