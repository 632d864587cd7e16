#include "webagent/fixtures/scripted_agent.hpp"

#include <filesystem>
#include <regex>

#include "webagent/action.hpp"
#include "webagent/image.hpp"
#include "webagent/text_util.hpp"

namespace webagent::fixtures {

using nlohmann::json;

namespace {

std::vector<ScriptStep> parse_steps(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw ScriptError(where + ": steps must be an array");
  std::vector<ScriptStep> out;
  for (const auto& s : arr) {
    ScriptStep step;
    if (s.is_string()) {
      step.action = s.get<std::string>();
    } else if (s.contains("action")) {
      step.action = s["action"].get<std::string>();
    } else if (s.contains("raw")) {
      step.raw = s["raw"].get<std::string>();
    } else {
      throw ScriptError(where + ": step needs \"action\" or \"raw\"");
    }
    out.push_back(std::move(step));
  }
  return out;
}

struct Entry {
  std::string id;
  std::string role;
  std::string name;
  std::string text;  // everything after the id
};

/// Lines of the form "[id] role 'name' ..." or "[id] [TAG] [text]".
std::vector<Entry> entries_of(const std::string& payload) {
  std::vector<Entry> out;
  for (const auto& raw : split(payload, "\n")) {
    std::string line = trim(raw);
    if (line.size() < 3 || line.front() != '[') continue;
    std::size_t close = line.find(']');
    std::string id = line.substr(1, close - 1);
    if (id.empty() || id.find_first_not_of("0123456789") != std::string::npos) continue;
    Entry e;
    e.id = id;
    e.text = trim(line.substr(close + 1));
    if (e.text.starts_with("[")) {
      std::size_t tag_end = e.text.find(']');
      e.role = e.text.substr(1, tag_end - 1);
      std::size_t open = e.text.find('[', tag_end);
      if (open != std::string::npos && e.text.back() == ']') e.name = e.text.substr(open + 1, e.text.size() - open - 2);
    } else {
      e.role = e.text.substr(0, e.text.find(' '));
      std::size_t q1 = e.text.find('\'');
      std::size_t q2 = e.text.rfind('\'');
      if (q1 != std::string::npos && q2 > q1) e.name = e.text.substr(q1 + 1, q2 - q1 - 1);
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::string reply_for(const std::string& action) {
  return "Let's think step-by-step. I will work toward the objective from the current page. " +
         std::string(kActionPhrase) + " ```" + action + "```";
}

}  // namespace

const std::vector<ScriptStep>& AgentScript::steps_for(ObservationMode mode) const {
  auto it = per_mode.find(mode);
  return it == per_mode.end() ? steps : it->second;
}

std::map<std::string, AgentScript> parse_agent_scripts(const json& j) {
  std::map<std::string, AgentScript> out;
  if (!j.contains("agents") || !j["agents"].is_object()) throw ScriptError("script file lacks an \"agents\" object");
  for (const auto& [task, spec] : j["agents"].items()) {
    AgentScript s;
    s.steps = parse_steps(spec.at("steps"), task);
    const json modes = spec.value("modes", json::object());
    for (const auto& [mode_name, steps] : modes.items()) {
      auto mode = observation_mode_from_string(mode_name);
      if (!mode) throw ScriptError(task + ": unknown mode '" + mode_name + "'");
      s.per_mode[*mode] = parse_steps(steps, task + "/" + mode_name);
    }
    out[task] = std::move(s);
  }
  return out;
}

std::map<std::string, AgentScript> load_agent_scripts(const std::string& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw ScriptError(path + ": invalid JSON");
  return parse_agent_scripts(j);
}

std::string payload_of_user_turn(const std::string& user_text) {
  std::size_t start = user_text.find("OBSERVATION:\n");
  if (start == std::string::npos) return {};
  start += 13;
  std::size_t end = user_text.find("\nURL: ", start);
  std::string block = user_text.substr(start, end == std::string::npos ? std::string::npos : end - start);
  std::size_t body = block.find("\n\n");
  return body == std::string::npos ? std::string() : block.substr(body + 2);
}

std::string fill_script_template(const std::string& action, const std::string& observation_payload,
                                 const SiteUrls& sites) {
  static const std::regex placeholder(R"(\{\{id:(=?)([^}@]*)(?:@([^}]*))?\}\})");
  std::string out = sites.expand(action);
  std::vector<Entry> entries;
  bool parsed = false;
  std::smatch m;
  std::string rest = out;
  std::string result;
  while (std::regex_search(rest, m, placeholder)) {
    if (!parsed) {
      entries = entries_of(observation_payload);
      parsed = true;
    }
    bool exact = m[1].matched && m[1].length() > 0;
    std::string needle = m[2].str();
    std::vector<std::string> roles;
    if (m[3].matched) {
      for (const auto& r : split(m[3].str(), ",")) roles.push_back(to_lower(trim(r)));
    }
    const Entry* hit = nullptr;
    for (const auto& e : entries) {
      if (!roles.empty() && std::find(roles.begin(), roles.end(), to_lower(e.role)) == roles.end()) continue;
      if (exact ? e.name == needle : e.text.find(needle) != std::string::npos) {
        hit = &e;
        break;
      }
    }
    if (!hit) throw ScriptError("no element matches '" + m[0].str() + "'");
    result += m.prefix().str() + hit->id;
    rest = m.suffix().str();
  }
  result += rest;
  if (result.find("{{") != std::string::npos) throw ScriptError("unfilled placeholder in '" + result + "'");
  return result;
}

ScriptedAgentTransport::ScriptedAgentTransport(std::vector<ScriptStep> steps, SiteUrls sites)
    : steps_(std::move(steps)), sites_(std::move(sites)) {}

int ScriptedAgentTransport::steps_used() const {
  std::lock_guard lock(mu_);
  return static_cast<int>(next_);
}

std::string ScriptedAgentTransport::send(const ModelRequest& request) {
  if (request.kind != RequestKind::chat) throw ModelPermanentError("scripted agent answers chat requests only");
  std::lock_guard lock(mu_);
  if (next_ >= steps_.size()) throw ModelPermanentError("agent script exhausted after " + std::to_string(next_) + " steps");
  const ScriptStep& step = steps_[next_++];
  if (!step.raw.empty()) return step.raw;
  std::string payload;
  for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
    if (it->role == Role::user && it->joined_text().find("OBSERVATION:") != std::string::npos) {
      payload = payload_of_user_turn(it->joined_text());
      break;
    }
  }
  try {
    return reply_for(fill_script_template(step.action, payload, sites_));
  } catch (const ScriptError& e) {
    throw ModelPermanentError(std::string("agent script: ") + e.what());
  }
}

namespace {

struct BackendTables {
  FakeBackend::Defaults defaults;
  std::vector<std::pair<std::string, std::string>> captions;
  std::vector<std::tuple<std::string, std::string, std::string>> vqa;
  std::vector<std::tuple<std::string, std::string, std::string>> judge;
  std::vector<std::pair<std::string, std::string>> completions;
};

void read_backend(const std::filesystem::path& path, BackendTables& t, int depth) {
  if (depth > 8) throw ScriptError(path.string() + ": include depth exceeded");
  json j = json::parse(read_file(path.string()), nullptr, false);
  if (j.is_discarded()) throw ScriptError(path.string() + ": invalid JSON");
  std::filesystem::path dir = path.parent_path();
  for (const auto& inc : j.value("include", json::array())) read_backend(dir / inc.get<std::string>(), t, depth + 1);
  auto digest_of = [&](const json& e) {
    if (e.contains("digest")) return e["digest"].get<std::string>();
    return load_png((dir / e.at("image").get<std::string>()).string()).digest();
  };
  if (j.contains("defaults")) {
    const json& d = j["defaults"];
    t.defaults.completion = d.value("completion", t.defaults.completion);
    t.defaults.caption = d.value("caption", t.defaults.caption);
    t.defaults.vqa = d.value("vqa", t.defaults.vqa);
    t.defaults.judge = d.value("judge", t.defaults.judge);
  }
  for (const auto& e : j.value("captions", json::array())) t.captions.emplace_back(digest_of(e), e.at("caption"));
  for (const auto& e : j.value("vqa", json::array())) t.vqa.emplace_back(digest_of(e), e.at("question"), e.at("answer"));
  for (const auto& e : j.value("judge", json::array())) {
    t.judge.emplace_back(e.at("reference"), e.at("prediction"), e.at("verdict"));
  }
  for (const auto& e : j.value("completions", json::array())) t.completions.emplace_back(e.at("digest"), e.at("text"));
}

}  // namespace

std::shared_ptr<FakeBackend> load_fake_backend(const std::string& path) {
  BackendTables t;
  read_backend(path, t, 0);
  auto backend = std::make_shared<FakeBackend>(t.defaults);
  for (auto& [d, c] : t.captions) backend->add_caption(d, c);
  for (auto& [d, q, a] : t.vqa) backend->add_vqa(d, q, a);
  for (auto& [r, p, v] : t.judge) backend->add_judge(r, p, v);
  for (auto& [d, text] : t.completions) backend->add_completion(d, text);
  return backend;
}

void register_fixture_resolvers(ResolverRegistry& registry) {
  registry.add("shopping_get_latest_order_url", [](BrowserSession& session, const EvaluationContext& ctx) {
    std::string orders = ctx.sites.resolve(Site::shopping, "/orders");
    session.goto_url(orders);
    auto links = session.query_attribute(".order-link", "href");
    return links.empty() ? orders : links.front();
  });
}

}  // namespace webagent::fixtures
