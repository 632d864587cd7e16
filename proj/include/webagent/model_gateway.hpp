#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "webagent/budget.hpp"
#include "webagent/image.hpp"

namespace webagent {

enum class Role { system, user, assistant };
std::string_view to_string(Role r);

struct ContentPart {
  std::variant<std::string, std::shared_ptr<const Raster>> value;

  static ContentPart text(std::string t) { return {std::move(t)}; }
  static ContentPart image(std::shared_ptr<const Raster> r) { return {std::move(r)}; }
  bool is_text() const { return value.index() == 0; }
  const std::string& as_text() const { return std::get<0>(value); }
  const Raster& as_image() const { return *std::get<1>(value); }
};

struct ChatMessage {
  Role role = Role::user;
  std::vector<ContentPart> parts;

  static ChatMessage text(Role role, std::string t) {
    return {role, {ContentPart::text(std::move(t))}};
  }
  bool has_image() const;
  std::string joined_text() const;
};

struct SamplingConfig {
  double temperature = 1.0;
  double top_p = 0.9;
  int max_output_units = 512;

  /// Default for the GPT family of backends.
  static SamplingConfig general() { return {1.0, 0.9, 512}; }
  /// Lower-temperature profile for the remaining open models.
  static SamplingConfig alternate() { return {0.6, 0.95, 512}; }
  /// Suggested default for Gemini backends.
  static SamplingConfig gemini() { return {0.9, 1.0, 512}; }
  /// Judge calls pin the minimum temperature.
  static SamplingConfig judge() { return {0.0, 1.0, 64}; }
};

struct BackendProfile {
  enum class Kind { remote_chat, fake };

  Kind kind = Kind::fake;
  std::string endpoint;  // remote only, e.g. http://127.0.0.1:8000/v1/chat/completions
  std::string model;
  bool supports_images = false;
  TextBudget context_budget = TextBudget::tokens(128000);
  int max_retries = 3;
  std::chrono::milliseconds backoff{250};
  int max_in_flight = 4;
};

enum class RequestKind { chat, caption, vqa, judge };
std::string_view to_string(RequestKind k);

struct ModelRequest {
  RequestKind kind = RequestKind::chat;
  std::vector<ChatMessage> messages;
  SamplingConfig sampling;
  // Structured payload, kept alongside the messages for fake backends.
  std::shared_ptr<const Raster> image;
  std::string question;
  std::string intent;
  std::string reference;
  std::string prediction;
};

/// Stable digest of the request kind and serialized messages (images by their
/// pixel digest).
std::string request_digest(const ModelRequest& request);

/// Retryable failure (network, 5xx).
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
/// Non-retryable failure: over budget, 4xx, exhausted retries.
class ModelPermanentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
/// Backend answered but gave no usable text.
class ModelRefusalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ModelPreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string send(const ModelRequest& request) = 0;
};

/// JSON chat-completion client over HTTP. Images are inlined as base64 PNG
/// data URLs. The bearer token comes from WEBAGENT_API_KEY when set.
class HttpChatTransport : public Transport {
 public:
  explicit HttpChatTransport(std::string endpoint, std::string model = {},
                             std::chrono::seconds timeout = std::chrono::seconds(120));
  std::string send(const ModelRequest& request) override;

 private:
  std::string endpoint_;
  std::string model_;
  std::chrono::seconds timeout_;
};

/// Deterministic backend answering from digest tables.
class FakeBackend : public Transport {
 public:
  struct Defaults {
    std::string completion;
    std::string caption = "an image";
    std::string vqa = "unknown";
    std::string judge = "incorrect";
  };

  FakeBackend() = default;
  explicit FakeBackend(Defaults d) : defaults_(std::move(d)) {}

  void add_completion(std::string digest, std::string text);
  void add_caption(std::string image_digest, std::string text);
  void add_vqa(std::string image_digest, std::string question, std::string answer);
  void add_judge(std::string reference, std::string prediction, std::string verdict);

  const Defaults& defaults() const { return defaults_; }
  std::string send(const ModelRequest& request) override;

 private:
  Defaults defaults_;
  std::map<std::string, std::string> completions_;
  std::map<std::string, std::string> captions_;
  std::map<std::pair<std::string, std::string>, std::string> vqa_;
  std::map<std::pair<std::string, std::string>, std::string> judge_;
};

/// Append-only JSONL audit log of backend calls.
class CallLog {
 public:
  CallLog() = default;
  explicit CallLog(std::string path);

  struct Entry {
    RequestKind kind;
    std::string digest;
    double latency_ms = 0;
    std::string outcome;
    int attempts = 0;
    std::string note;
  };
  void record(const Entry& e);
  std::vector<Entry> entries() const;

 private:
  mutable std::mutex mu_;
  std::string path_;
  std::vector<Entry> entries_;
};

enum class FuzzyVerdict { correct, incorrect, partially_correct };
std::string_view to_string(FuzzyVerdict v);

/// Normalizes a judge reply (case, surrounding quotes, trailing punctuation).
/// Returns nullopt when the reply is none of the three labels.
std::optional<FuzzyVerdict> parse_verdict(std::string_view reply);

/// The judge prompt; built only from the intent, the reference and the
/// prediction.
std::vector<ChatMessage> build_judge_messages(const std::string& intent,
                                              const std::string& reference,
                                              const std::string& prediction);

/// Uniform client over one backend: precondition and budget checks, bounded
/// retries, the caption cache and the call log.
class ModelGateway {
 public:
  ModelGateway(BackendProfile profile, std::shared_ptr<Transport> transport,
               std::shared_ptr<CallLog> log = nullptr);

  std::string complete(const std::vector<ChatMessage>& messages, const SamplingConfig& sampling);
  std::string caption(const Raster& image);
  std::string vqa(const Raster& image, const std::string& question);
  FuzzyVerdict judge_fuzzy(const std::string& intent, const std::string& reference,
                           const std::string& prediction);

  const BackendProfile& profile() const { return profile_; }
  int transport_calls() const;

 private:
  std::string call(ModelRequest request);

  BackendProfile profile_;
  std::shared_ptr<Transport> transport_;
  std::shared_ptr<CallLog> log_;
  std::counting_semaphore<1024> in_flight_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> caption_cache_;
  int transport_calls_ = 0;
};

std::size_t text_size(const std::vector<ChatMessage>& messages);

}  // namespace webagent
