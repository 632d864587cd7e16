#include "webagent/model_gateway.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "webagent/http_client.hpp"
#include "webagent/text_util.hpp"

namespace webagent {

using nlohmann::json;

std::string_view to_string(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "";
}

std::string_view to_string(RequestKind k) {
  switch (k) {
    case RequestKind::chat: return "chat";
    case RequestKind::caption: return "caption";
    case RequestKind::vqa: return "vqa";
    case RequestKind::judge: return "judge";
  }
  return "";
}

std::string_view to_string(FuzzyVerdict v) {
  switch (v) {
    case FuzzyVerdict::correct: return "correct";
    case FuzzyVerdict::incorrect: return "incorrect";
    case FuzzyVerdict::partially_correct: return "partially correct";
  }
  return "";
}

bool ChatMessage::has_image() const {
  for (const auto& p : parts)
    if (!p.is_text()) return true;
  return false;
}

std::string ChatMessage::joined_text() const {
  std::string out;
  for (const auto& p : parts)
    if (p.is_text()) out += p.as_text();
  return out;
}

std::size_t text_size(const std::vector<ChatMessage>& messages) {
  std::size_t n = 0;
  for (const auto& m : messages)
    for (const auto& p : m.parts)
      if (p.is_text()) n += p.as_text().size();
  return n;
}

std::string request_digest(const ModelRequest& request) {
  json j;
  j["kind"] = std::string(to_string(request.kind));
  json msgs = json::array();
  for (const auto& m : request.messages) {
    json parts = json::array();
    for (const auto& p : m.parts) {
      if (p.is_text())
        parts.push_back({{"text", p.as_text()}});
      else
        parts.push_back({{"image", p.as_image().digest()}});
    }
    msgs.push_back({{"role", std::string(to_string(m.role))}, {"parts", parts}});
  }
  j["messages"] = msgs;
  return sha256_hex(j.dump());
}

// ---------------------------------------------------------------------------

HttpChatTransport::HttpChatTransport(std::string endpoint, std::string model,
                                     std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), timeout_(timeout) {}

std::string HttpChatTransport::send(const ModelRequest& request) {
  json body;
  if (!model_.empty()) body["model"] = model_;
  json msgs = json::array();
  for (const auto& m : request.messages) {
    json content = json::array();
    for (const auto& p : m.parts) {
      if (p.is_text()) {
        content.push_back({{"type", "text"}, {"text", p.as_text()}});
      } else {
        auto png = encode_png(p.as_image());
        content.push_back({{"type", "image_url"},
                           {"image_url", {{"url", "data:image/png;base64," + base64_encode(png)}}}});
      }
    }
    msgs.push_back({{"role", std::string(to_string(m.role))}, {"content", content}});
  }
  body["messages"] = msgs;
  body["temperature"] = request.sampling.temperature;
  body["top_p"] = request.sampling.top_p;
  body["max_tokens"] = request.sampling.max_output_units;

  std::map<std::string, std::string> headers;
  if (const char* key = std::getenv("WEBAGENT_API_KEY"); key && *key)
    headers["Authorization"] = std::string("Bearer ") + key;

  HttpResponse res;
  try {
    res = http_request("POST", endpoint_, body.dump(), "application/json", headers, timeout_);
  } catch (const HttpError& e) {
    throw TransportError(e.what());
  }
  if (res.status >= 500 || res.status == 429)
    throw TransportError("backend returned HTTP " + std::to_string(res.status));
  if (res.status != 200)
    throw ModelPermanentError("backend returned HTTP " + std::to_string(res.status) + ": " + res.body);
  try {
    auto reply = json::parse(res.body);
    const auto& content = reply.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
    std::string out;
    for (const auto& part : content)
      if (part.value("type", "") == "text") out += part.value("text", "");
    return out;
  } catch (const json::exception& e) {
    throw ModelPermanentError(std::string("malformed backend reply: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

void FakeBackend::add_completion(std::string digest, std::string text) {
  completions_[std::move(digest)] = std::move(text);
}
void FakeBackend::add_caption(std::string image_digest, std::string text) {
  captions_[std::move(image_digest)] = std::move(text);
}
void FakeBackend::add_vqa(std::string image_digest, std::string question, std::string answer) {
  vqa_[{std::move(image_digest), std::move(question)}] = std::move(answer);
}
void FakeBackend::add_judge(std::string reference, std::string prediction, std::string verdict) {
  judge_[{std::move(reference), std::move(prediction)}] = std::move(verdict);
}

std::string FakeBackend::send(const ModelRequest& request) {
  switch (request.kind) {
    case RequestKind::chat: {
      auto it = completions_.find(request_digest(request));
      return it != completions_.end() ? it->second : defaults_.completion;
    }
    case RequestKind::caption: {
      if (!request.image) return defaults_.caption;
      auto it = captions_.find(request.image->digest());
      return it != captions_.end() ? it->second : defaults_.caption;
    }
    case RequestKind::vqa: {
      if (!request.image) return defaults_.vqa;
      auto it = vqa_.find({request.image->digest(), request.question});
      return it != vqa_.end() ? it->second : defaults_.vqa;
    }
    case RequestKind::judge: {
      auto it = judge_.find({request.reference, request.prediction});
      return it != judge_.end() ? it->second : defaults_.judge;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------

CallLog::CallLog(std::string path) : path_(std::move(path)) {}

void CallLog::record(const Entry& e) {
  std::lock_guard lock(mu_);
  entries_.push_back(e);
  if (path_.empty()) return;
  auto now = std::chrono::system_clock::now().time_since_epoch();
  json line = {{"timestamp_ms", std::chrono::duration_cast<std::chrono::milliseconds>(now).count()},
               {"kind", std::string(to_string(e.kind))},
               {"digest", e.digest},
               {"latency_ms", e.latency_ms},
               {"outcome", e.outcome},
               {"attempts", e.attempts}};
  if (!e.note.empty()) line["note"] = e.note;
  std::ofstream out(path_, std::ios::app);
  out << line.dump() << "\n";
}

std::vector<CallLog::Entry> CallLog::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

// ---------------------------------------------------------------------------

std::optional<FuzzyVerdict> parse_verdict(std::string_view reply) {
  auto s = to_lower(trim(reply));
  auto strip = [](char c) {
    return c == '.' || c == '!' || c == ',' || c == ';' || c == ':' || c == '"' || c == '\'' ||
           c == '`' || c == '*' || std::isspace(static_cast<unsigned char>(c));
  };
  while (!s.empty() && strip(s.back())) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && strip(s[b])) ++b;
  s = s.substr(b);
  s = replace_all(s, "_", " ");
  if (s == "correct") return FuzzyVerdict::correct;
  if (s == "incorrect") return FuzzyVerdict::incorrect;
  if (s == "partially correct") return FuzzyVerdict::partially_correct;
  return std::nullopt;
}

std::vector<ChatMessage> build_judge_messages(const std::string& intent,
                                              const std::string& reference,
                                              const std::string& prediction) {
  std::string system =
      "You grade answers produced by a web agent. Compare the agent's answer with the reference "
      "answer in the context of the task. Reply with exactly one label: correct, incorrect, or "
      "partially correct.";
  std::string user = "Task: " + intent + "\nReference answer: " + reference +
                     "\nAgent answer: " + prediction + "\nLabel:";
  return {ChatMessage::text(Role::system, system), ChatMessage::text(Role::user, user)};
}

ModelGateway::ModelGateway(BackendProfile profile, std::shared_ptr<Transport> transport,
                           std::shared_ptr<CallLog> log)
    : profile_(std::move(profile)),
      transport_(std::move(transport)),
      log_(std::move(log)),
      in_flight_(std::max(1, profile_.max_in_flight)) {
  if (!transport_) throw std::invalid_argument("ModelGateway needs a transport");
}

int ModelGateway::transport_calls() const {
  std::lock_guard lock(mu_);
  return transport_calls_;
}

std::string ModelGateway::call(ModelRequest request) {
  if (request.messages.empty()) throw ModelPreconditionError("empty message list");
  for (const auto& m : request.messages) {
    if (m.parts.empty()) throw ModelPreconditionError("message without parts");
    if (m.has_image() && !profile_.supports_images)
      throw ModelPreconditionError("backend profile does not accept images");
  }
  auto digest = request_digest(request);
  if (text_size(request.messages) > profile_.context_budget.max_chars()) {
    if (log_) log_->record({request.kind, digest, 0, "over_budget", 0, {}});
    throw ModelPermanentError("request exceeds the backend context budget");
  }

  auto start = std::chrono::steady_clock::now();
  int attempts = 0;
  std::string last_error;
  for (int attempt = 0; attempt <= profile_.max_retries; ++attempt) {
    if (attempt > 0 && profile_.backoff.count() > 0)
      std::this_thread::sleep_for(profile_.backoff * (1 << (attempt - 1)));
    ++attempts;
    {
      std::lock_guard lock(mu_);
      ++transport_calls_;
    }
    try {
      in_flight_.acquire();
      std::string reply;
      try {
        reply = transport_->send(request);
      } catch (...) {
        in_flight_.release();
        throw;
      }
      in_flight_.release();
      double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                      .count();
      if (trim(reply).empty()) {
        if (log_) log_->record({request.kind, digest, ms, "refusal", attempts, {}});
        throw ModelRefusalError("backend returned no text");
      }
      if (log_) log_->record({request.kind, digest, ms, "ok", attempts, {}});
      return reply;
    } catch (const TransportError& e) {
      last_error = e.what();
    } catch (const ModelPermanentError& e) {
      double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                      .count();
      if (log_) log_->record({request.kind, digest, ms, "permanent_error", attempts, e.what()});
      throw;
    }
  }
  double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (log_) log_->record({request.kind, digest, ms, "transport_error", attempts, last_error});
  throw TransportError("backend unreachable after " + std::to_string(attempts) +
                       " attempts: " + last_error);
}

std::string ModelGateway::complete(const std::vector<ChatMessage>& messages,
                                   const SamplingConfig& sampling) {
  ModelRequest r;
  r.kind = RequestKind::chat;
  r.messages = messages;
  r.sampling = sampling;
  return call(std::move(r));
}

std::string ModelGateway::caption(const Raster& image) {
  auto key = image.digest();
  {
    std::lock_guard lock(mu_);
    if (auto it = caption_cache_.find(key); it != caption_cache_.end()) return it->second;
  }
  ModelRequest r;
  r.kind = RequestKind::caption;
  r.image = std::make_shared<Raster>(image);
  r.messages = {{Role::user,
                 {ContentPart::text("Describe this image in one short sentence."),
                  ContentPart::image(r.image)}}};
  r.sampling = SamplingConfig::judge();
  auto text = trim(call(std::move(r)));
  std::lock_guard lock(mu_);
  caption_cache_[key] = text;
  return text;
}

std::string ModelGateway::vqa(const Raster& image, const std::string& question) {
  ModelRequest r;
  r.kind = RequestKind::vqa;
  r.image = std::make_shared<Raster>(image);
  r.question = question;
  r.messages = {{Role::user, {ContentPart::text(question), ContentPart::image(r.image)}}};
  r.sampling = SamplingConfig::judge();
  return call(std::move(r));
}

FuzzyVerdict ModelGateway::judge_fuzzy(const std::string& intent, const std::string& reference,
                                       const std::string& prediction) {
  if (reference == prediction) return FuzzyVerdict::correct;
  ModelRequest r;
  r.kind = RequestKind::judge;
  r.intent = intent;
  r.reference = reference;
  r.prediction = prediction;
  r.messages = build_judge_messages(intent, reference, prediction);
  r.sampling = SamplingConfig::judge();
  auto reply = call(r);
  if (auto v = parse_verdict(reply)) return *v;
  if (log_) log_->record({RequestKind::judge, request_digest(r), 0, "unparsed_verdict", 0, reply});
  return FuzzyVerdict::incorrect;
}

}  // namespace webagent
