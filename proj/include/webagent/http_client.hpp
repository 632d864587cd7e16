#pragma once

#include <chrono>
#include <map>
#include <stdexcept>
#include <string>

namespace webagent {

struct HttpResponse {
  int status = 0;
  std::string body;
  std::string content_type;
  std::string location;  // Location header, if any
};

class HttpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Blocking HTTP/1.1 request to an absolute http:// URL. Redirects are not
/// followed. Throws HttpError on connection failure.
HttpResponse http_request(const std::string& method, const std::string& url,
                          const std::string& body = {}, const std::string& content_type = {},
                          const std::map<std::string, std::string>& headers = {},
                          std::chrono::milliseconds timeout = std::chrono::seconds(10));

}  // namespace webagent
