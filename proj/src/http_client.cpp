#include "webagent/http_client.hpp"

#include <httplib.h>

#include "webagent/url.hpp"

namespace webagent {

HttpResponse http_request(const std::string& method, const std::string& url,
                          const std::string& body, const std::string& content_type,
                          const std::map<std::string, std::string>& headers,
                          std::chrono::milliseconds timeout) {
  auto parsed = parse_url(url);
  if (!parsed || parsed->scheme != "http") throw HttpError("unsupported URL: " + url);
  httplib::Client client(parsed->host, parsed->port ? parsed->port : 80);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  client.set_follow_location(false);

  httplib::Headers hdrs;
  for (const auto& [k, v] : headers) hdrs.emplace(k, v);
  auto target = parsed->path_and_query();

  httplib::Result res{nullptr, httplib::Error::Unknown};
  if (method == "GET") {
    res = client.Get(target, hdrs);
  } else if (method == "POST") {
    res = client.Post(target, hdrs, body, content_type.empty() ? "text/plain" : content_type);
  } else {
    throw HttpError("unsupported method " + method);
  }
  if (!res) throw HttpError("request to " + url + " failed: " + httplib::to_string(res.error()));
  HttpResponse out;
  out.status = res->status;
  out.body = res->body;
  out.content_type = res->get_header_value("Content-Type");
  out.location = res->get_header_value("Location");
  return out;
}

}  // namespace webagent
