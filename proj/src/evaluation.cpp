#include "webagent/evaluation.hpp"

#include <filesystem>

#include "webagent/http_client.hpp"
#include "webagent/ssim.hpp"
#include "webagent/text_util.hpp"
#include "webagent/url.hpp"

namespace webagent {

namespace {

bool contains_normalized(std::string_view haystack, std::string_view needle) {
  return normalize_for_match(haystack).find(normalize_for_match(needle)) != std::string::npos;
}

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const EvaluationError&) {
    throw;
  } catch (const ModelPreconditionError& e) {
    throw EvaluationError(std::string(what) + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw EvaluationError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

int exact_match(std::string_view prediction, std::string_view reference) {
  return trim(prediction) == trim(reference) ? 1 : 0;
}

int must_include(std::string_view prediction, const std::vector<StringRef>& references) {
  for (const auto& ref : references) {
    bool any = false;
    for (const auto& alt : ref.alternatives) {
      if (contains_normalized(prediction, alt)) {
        any = true;
        break;
      }
    }
    if (!any) return 0;
  }
  return 1;
}

int must_exclude(std::string_view prediction, const std::vector<StringRef>& references) {
  for (const auto& ref : references) {
    for (const auto& alt : ref.alternatives) {
      if (contains_normalized(prediction, alt)) return 0;
    }
  }
  return 1;
}

int fuzzy_match(const std::string& prediction, const std::string& reference, const std::string& intent,
                ModelGateway& judge) {
  if (prediction == reference) return 1;
  FuzzyVerdict v = guarded("fuzzy judge", [&] { return judge.judge_fuzzy(intent, reference, prediction); });
  return v == FuzzyVerdict::correct ? 1 : 0;
}

int eval_vqa(const Raster& image, const std::string& question, std::string_view answer,
             ModelGateway& vqa_backend) {
  if (image.empty()) throw EvaluationError("vqa: empty image");
  std::string reply = guarded("vqa", [&] { return vqa_backend.vqa(image, question); });
  return to_lower(reply).find(to_lower(answer)) != std::string::npos ? 1 : 0;
}

int eval_fuzzy_image_match(const Raster& query, const Raster& reference, double threshold) {
  if (query.empty() || reference.empty()) throw EvaluationError("image match: empty image");
  return ssim(query, reference) >= threshold ? 1 : 0;
}

void ResolverRegistry::add(std::string name, UrlResolver fn) { resolvers_[std::move(name)] = std::move(fn); }

const UrlResolver* ResolverRegistry::find(const std::string& name) const {
  auto it = resolvers_.find(name);
  return it == resolvers_.end() ? nullptr : &it->second;
}

std::vector<std::string> ResolverRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : resolvers_) out.push_back(k);
  return out;
}

Raster fetch_image_over_http(const std::string& url) {
  HttpResponse r;
  try {
    r = http_request("GET", url);
  } catch (const HttpError& e) {
    throw EvaluationError("image fetch " + url + ": " + e.what());
  }
  if (r.status != 200) throw EvaluationError("image fetch " + url + ": HTTP " + std::to_string(r.status));
  try {
    return decode_png({reinterpret_cast<const std::uint8_t*>(r.body.data()), r.body.size()});
  } catch (const ImageDecodeError& e) {
    throw EvaluationError("image " + url + ": " + e.what());
  }
}

namespace {

struct Scorer {
  BrowserSession& session;
  const EvaluationContext& ctx;
  const Trajectory& trajectory;
  std::vector<EvaluatorResult>& details;

  const std::string& task_intent() const {
    static const std::string empty;
    return ctx.task ? ctx.task->intent : empty;
  }

  ModelGateway& judge() const {
    if (!ctx.judge) throw EvaluationError("no judge backend configured");
    return *ctx.judge;
  }
  ModelGateway& vqa() const {
    if (!ctx.vqa) throw EvaluationError("no vqa backend configured");
    return *ctx.vqa;
  }

  Raster reference_image(const std::string& path) const {
    std::filesystem::path p(path);
    if (p.is_relative() && !ctx.task_dir.empty()) p = std::filesystem::path(ctx.task_dir) / p;
    try {
      return load_png(p.string());
    } catch (const std::exception& e) {
      throw EvaluationError("reference image " + p.string() + ": " + e.what());
    }
  }

  int record(const EvaluatorSpec& spec, int score, std::string message) {
    details.push_back({std::string(evaluator_type_name(spec)), score, std::move(message)});
    return score;
  }

  int score_text(const EvaluatorSpec& spec, const std::string& text) {
    return std::visit(
        [&](const auto& e) -> int {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, ExactMatch>) {
            return record(spec, exact_match(text, e.reference), "expected '" + e.reference + "'");
          } else if constexpr (std::is_same_v<T, MustInclude>) {
            return record(spec, must_include(text, e.references), "");
          } else if constexpr (std::is_same_v<T, MustExclude>) {
            return record(spec, must_exclude(text, e.references), "");
          } else if constexpr (std::is_same_v<T, FuzzyMatch>) {
            const std::string& intent = e.intent.empty() ? task_intent() : e.intent;
            return record(spec, fuzzy_match(text, e.reference, intent, judge()), "");
          } else {
            throw EvaluationError(std::string(evaluator_type_name(spec)) + " cannot score text");
          }
        },
        spec.value);
  }

  int score_image(const EvaluatorSpec& spec, const Raster& image) {
    if (const auto* v = std::get_if<EvalVqa>(&spec.value)) {
      return record(spec, eval_vqa(image, v->question, v->answer, vqa()), v->question);
    }
    if (const auto* m = std::get_if<FuzzyImageMatch>(&spec.value)) {
      Raster ref = reference_image(m->reference_image);
      double s = ssim(image, ref);
      char buf[64];
      std::snprintf(buf, sizeof buf, "ssim %.4f vs threshold %.4f", s, m->threshold);
      return record(spec, s >= m->threshold ? 1 : 0, buf);
    }
    throw EvaluationError(std::string(evaluator_type_name(spec)) + " cannot score an image");
  }

  std::string resolve_target(const UrlSpec& url) {
    return std::visit(
        [&](const auto& u) -> std::string {
          using T = std::decay_t<decltype(u)>;
          if constexpr (std::is_same_v<T, LiteralUrl>) {
            return ctx.task ? ctx.sites.resolve(ctx.task->site, u.url) : u.url;
          } else if constexpr (std::is_same_v<T, FuncUrl>) {
            const UrlResolver* fn = ctx.registry ? ctx.registry->find(u.name) : nullptr;
            if (!fn) throw EvaluationError("unknown url resolver '" + u.name + "'");
            return guarded("url resolver", [&] { return (*fn)(session, ctx); });
          } else {
            return trajectory.final_url;
          }
        },
        url);
  }

  int page_state(const PageState& spec) {
    std::string target = resolve_target(spec.url);
    try {
      if (!target.empty() &&
          normalize_url_for_compare(session.current_url()) != normalize_url_for_compare(target)) {
        session.goto_url(target);
      }
    } catch (const BrowserError& e) {
      throw EvaluationError("page state navigation to " + target + ": " + e.what());
    }
    int score = 1;
    if (spec.locator.extract == Extract::text) {
      std::vector<std::string> texts;
      try {
        texts = session.query_text(spec.locator.selector);
      } catch (const BrowserError& e) {
        throw EvaluationError(std::string("locator: ") + e.what());
      }
      if (texts.empty()) {
        details.push_back({"page_state", 0, "locator empty: " + spec.locator.selector});
        return 0;
      }
      std::string text = join(texts, "\n");
      for (const auto& inner : spec.inner) score *= score_text(inner, text);
    } else {
      std::vector<std::string> urls;
      try {
        urls = session.query_attribute(spec.locator.selector, "src");
      } catch (const BrowserError& e) {
        throw EvaluationError(std::string("locator: ") + e.what());
      }
      if (urls.empty()) {
        details.push_back({"page_state", 0, "locator empty: " + spec.locator.selector});
        return 0;
      }
      auto fetch = ctx.fetch_image ? ctx.fetch_image : fetch_image_over_http;
      for (const auto& url : urls) {
        Raster image = fetch(url);
        for (const auto& inner : spec.inner) score *= score_image(inner, image);
      }
    }
    details.push_back({"page_state", score, url_spec_to_string(spec.url) + " " + spec.locator.selector});
    return score;
  }

  Raster final_screenshot() {
    try {
      if (!trajectory.final_url.empty() &&
          normalize_url_for_compare(session.current_url()) != normalize_url_for_compare(trajectory.final_url)) {
        session.goto_url(trajectory.final_url);
      }
      return session.capture_snapshot().screenshot;
    } catch (const BrowserError& e) {
      throw EvaluationError(std::string("final screenshot: ") + e.what());
    }
  }

  int top_level(const EvaluatorSpec& spec, std::optional<Raster>& screenshot) {
    if (const auto* ps = std::get_if<PageState>(&spec.value)) return page_state(*ps);
    if (is_visual(spec)) {
      if (!screenshot) screenshot = final_screenshot();
      return score_image(spec, *screenshot);
    }
    return score_text(spec, trajectory.final_answer);
  }
};

}  // namespace

int evaluate_page_state(BrowserSession& session, const PageState& spec, const EvaluationContext& ctx,
                        const Trajectory& trajectory, std::vector<EvaluatorResult>& details) {
  Scorer s{session, ctx, trajectory, details};
  return s.page_state(spec);
}

RewardOutcome evaluate_task(const TaskSpec& task, const Trajectory& trajectory, BrowserSession& session,
                            const EvaluationContext& ctx) {
  EvaluationContext local = ctx;
  local.task = &task;
  RewardOutcome out;
  Scorer s{session, local, trajectory, out.details};
  try {
    // Visual evaluators run first, against the final page.
    std::optional<Raster> screenshot;
    int score = 1;
    std::vector<const EvaluatorSpec*> ordered;
    for (const auto& e : task.evaluators) {
      if (is_visual(e)) ordered.push_back(&e);
    }
    for (const auto& e : task.evaluators) {
      if (!is_visual(e)) ordered.push_back(&e);
    }
    for (const EvaluatorSpec* e : ordered) score *= s.top_level(*e, screenshot);
    out.score = score;
  } catch (const EvaluationError& e) {
    out.score = 0;
    out.unevaluated = true;
    out.error = e.what();
  }
  return out;
}

}  // namespace webagent
