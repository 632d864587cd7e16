// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "test_support.hpp"
#include "webagent/evaluation.hpp"
#include "webagent/fixtures/harness.hpp"
#include "webagent/ssim.hpp"
#include "webagent/text_util.hpp"

namespace fs = std::filesystem;
using namespace webagent;
using namespace webagent::fixtures;

namespace {

// Tolerances and budgets.
constexpr double kSsimIdentityTol = 1e-9;
constexpr double kSsimReferenceTol = 1e-6;
constexpr double kSsimSymmetryTol = 1e-9;
constexpr int kSsimPairs = 20;
constexpr int kActionCases = 2000;
constexpr std::size_t kObservationChars = 15360;
constexpr double kHeadlineRate = 16.37;
constexpr double kRateTol = 0.05;
constexpr double kEndToEndSeconds = 180;

constexpr double kStringSeconds = 1, kSsimSeconds = 10, kActionSeconds = 5, kObservationSeconds = 30,
                 kAggregationSeconds = 1;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail: " << what << "] ";
    }
  }
};

int failures = 0;

void criterion(const std::string& name, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << "[exception: " << e.what() << "] ";
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_s > 0 && secs > budget_s) {
    o.pass = false;
    o.detail << "[over budget " << budget_s << "s] ";
  }
  char timing[32];
  std::snprintf(timing, sizeof timing, "%.2fs", secs);
  std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  " << o.detail.str() << "(" << timing << ")"
            << std::endl;
  if (!o.pass) ++failures;
}

std::vector<StringRef> refs(std::initializer_list<const char*> items) {
  std::vector<StringRef> out;
  for (const char* s : items) out.push_back(StringRef::parse(s));
  return out;
}

void string_primitives(Outcome& o) {
  const std::string p = "$1.99, $2.50, $10.00";
  o.check(must_include(p, refs({"1.99", "2.50", "10.00"})) == 1, "price list include");
  o.check(must_exclude(p, refs({"1.50", "2.00"})) == 1, "price list exclude");
  auto inc = refs({"$25000 |OR| $25,000"});
  auto exc = refs({"$30000 |OR| $30,000"});
  o.check(must_include("$25000", inc) == 1 && must_include("$25,000", inc) == 1, "either new price form counts");
  o.check(must_include("$30,000", inc) == 0, "old price is not the new one");
  o.check(must_exclude("$25,000", exc) == 1 && must_exclude("$25000", exc) == 1, "new price excludes old");
  o.check(must_exclude("$30000", exc) == 0 && must_exclude("$30,000", exc) == 0, "either old form is caught");
  o.detail << "8 cases ";
}

void ssim_checks(Outcome& o) {
  std::mt19937 rng(2024);
  double worst_identity = 0, worst_ref = 0, worst_sym = 0;
  for (int i = 0; i < 5; ++i) {
    Raster r = testing::random_raster(rng, 30 + 9 * i, 25 + 7 * i);
    worst_identity = std::max(worst_identity, std::abs(ssim(r, r) - 1.0));
  }
  std::uniform_int_distribution<int> dim(12, 48);
  for (int i = 0; i < kSsimPairs; ++i) {
    int w = dim(rng), h = dim(rng);
    Raster a = testing::random_raster(rng, w, h);
    Raster b = testing::random_raster(rng, w, h);
    double s = ssim(a, b);
    worst_ref = std::max(worst_ref, std::abs(s - testing::reference_ssim(a, b)));
    worst_sym = std::max(worst_sym, std::abs(s - ssim(b, a)));
  }
  o.check(worst_identity <= kSsimIdentityTol, "identity");
  o.check(worst_ref <= kSsimReferenceTol, "brute-force agreement");
  o.check(worst_sym <= kSsimSymmetryTol, "symmetry");
  o.detail << "identity err " << worst_identity << ", reference err " << worst_ref << " over " << kSsimPairs
           << " pairs, symmetry err " << worst_sym << " ";
}

void action_grammar(Outcome& o) {
  using namespace action;
  auto wrap = [](const std::string& body) {
    return "Let's think step-by-step. " + std::string(kActionPhrase) + " ```" + body + "```";
  };
  o.check(parse_action(wrap("stop [$279.49]")) == ParsedAction(Stop{"$279.49"}), "stop [$279.49]");
  o.check(parse_action(wrap("click [11]")) == ParsedAction(Click{11}), "click [11]");
  o.check(parse_action(wrap("type [5] [guitar] [1]")) == ParsedAction(Type{5, "guitar", true}),
          "type [5] [guitar] [1]");
  std::mt19937 rng(777);
  int ok = 0, bracketed = 0;
  for (int i = 0; i < kActionCases; ++i) {
    ParsedAction a = testing::random_action(rng);
    std::string out = render_action_output(a);
    if (out.find('[', out.find("```") + 4) != std::string::npos) ++bracketed;
    try {
      if (parse_action(out) == a) ++ok;
    } catch (const ActionParseError&) {
    }
  }
  o.check(ok == kActionCases, "round trip");
  o.detail << ok << "/" << kActionCases << " round trips (" << bracketed << " with bracketed bodies) ";
}

std::string site_root(const FixtureStack& stack) {
  std::string root = stack.site_urls().base.at(Site::multi);
  while (!root.empty() && root.back() == '/') root.pop_back();
  return root;
}

void observation_formats(Outcome& o, FixtureStack& stack, const FixtureLayout& layout) {
  auto session = stack.open_session(fixture_session_options());
  PrecomputedSomProvider som(layout.som());
  int pages = 0, exact = 0;
  for (const auto& page : load_golden_pages(layout)) {
    ++pages;
    stack.reset();
    PageTexts t = render_page_texts(*session, som, site_root(stack) + page.url);
    bool tree = t.acc_tree == read_file(layout.golden() + "/" + page.name + ".acc_tree.txt");
    bool marks = t.som == read_file(layout.golden() + "/" + page.name + ".som.txt");
    if (tree && marks) ++exact;
    o.check(tree, page.name + " tree");
    o.check(marks, page.name + " som");
  }
  o.check(pages > 0, "golden pages present");

  const auto budget = default_observation_budget();
  o.check(budget.max_chars() == kObservationChars, "budget is 15360 chars");
  std::string line(39, 'x');
  line += '\n';
  std::string at;
  while (at.size() < kObservationChars) at += line;
  at.resize(kObservationChars);
  std::string over = at + "y";
  std::string cut = truncate_to_budget(over, budget);
  o.check(truncate_to_budget(at, budget) == at, "text at the limit is untouched");
  o.check(cut.size() <= kObservationChars && cut != over && cut.ends_with("\n[...truncated]"),
          "one char over the limit is truncated");
  o.detail << exact << "/" << pages << " pages byte-exact, " << som.size() << " manifests, boundary "
           << kObservationChars << " ";
}

struct RunResult {
  RunReport report;
  std::string dir;
};

RunResult run_agent(FixtureStack& stack, const FixtureLayout& layout, const std::string& agent, ObservationMode mode,
                    const std::string& dir, std::shared_ptr<PrecomputedSomProvider> som) {
  RunEnvironment env = make_fixture_environment(stack, layout, testing::prompt_dir(),
                                                load_agent_scripts(layout.agents(agent)), mode, som);
  RunConfig config = fixture_run_config(stack, layout, mode, dir);
  return {run(config, env), dir};
}

const ObservationMode kModes[] = {ObservationMode::acc_tree, ObservationMode::acc_tree_caps,
                                  ObservationMode::screenshot_acc_tree_caps, ObservationMode::som_screenshot_caps};

void task_file_coverage(Outcome& o, const FixtureLayout& layout) {
  std::set<std::string> types;
  std::set<std::size_t> url_kinds;
  bool unachievable = false;
  std::function<void(const EvaluatorSpec&)> visit = [&](const EvaluatorSpec& e) {
    types.insert(std::string(evaluator_type_name(e)));
    if (auto* ps = std::get_if<PageState>(&e.value)) {
      url_kinds.insert(ps->url.index());
      for (const auto& i : ps->inner) visit(i);
    }
  };
  for (const auto& t : load_task_file(layout.tasks())) {
    unachievable |= !t.achievable;
    for (const auto& e : t.evaluators) visit(e);
  }
  for (const char* t : {"exact_match", "must_include", "must_exclude", "fuzzy_match", "eval_vqa",
                        "eval_fuzzy_image_match", "page_state"}) {
    o.check(types.count(t) == 1, std::string("task file uses ") + t);
  }
  o.check(url_kinds.size() == 3, "literal, func and last_page urls");
  o.check(unachievable, "an unachievable task");
}

void end_to_end(Outcome& o, FixtureStack& stack, const FixtureLayout& layout, const fs::path& tmp) {
  task_file_coverage(o, layout);
  auto som = std::make_shared<PrecomputedSomProvider>(layout.som());
  for (ObservationMode mode : kModes) {
    for (const char* agent : {"oracle", "adversarial"}) {
      auto r = run_agent(stack, layout, agent, mode, (tmp / "e2e" / to_string(mode) / agent).string(), som).report;
      const auto& a = r.aggregates;
      int want = std::string(agent) == "oracle" ? a.tasks : 0;
      o.check(a.tasks == 10, "10 tasks");
      o.check(a.unevaluated == 0, std::string(agent) + " unevaluated rows in " + std::string(to_string(mode)));
      o.check(a.overall.successes == want, std::string(agent) + " in " + std::string(to_string(mode)));
      o.detail << to_string(mode) << " " << agent << " " << a.overall.successes << "/" << a.tasks << "; ";
    }
  }
}

std::vector<std::string> run_artifacts(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string name = e.path().filename().string();
    if (name == "trajectory.jsonl" || name == "result.json" || name == "report.txt" || name == "report.json") {
      files.push_back(fs::relative(e.path(), dir).string());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

void determinism(Outcome& o, FixtureStack& stack, const FixtureLayout& layout, const fs::path& tmp) {
  const ObservationMode mode = ObservationMode::som_screenshot_caps;
  auto som = std::make_shared<PrecomputedSomProvider>(layout.som());
  auto a = run_agent(stack, layout, "oracle", mode, (tmp / "det" / "a").string(), som);
  auto b = run_agent(stack, layout, "oracle", mode, (tmp / "det" / "b").string(), som);
  auto files = run_artifacts(a.dir);
  o.check(files == run_artifacts(b.dir), "same artifact set");
  int same = 0;
  for (const auto& f : files) {
    bool eq = read_file(a.dir + "/" + f) == read_file(b.dir + "/" + f);
    same += eq;
    o.check(eq, f);
  }
  o.check(files.size() == 2 + 2 * 10, "reports plus 10 trajectories and results");
  o.detail << same << "/" << files.size() << " files byte-identical ";
}

void aggregation(Outcome& o) {
  auto rows = testing::synthetic_rows();
  auto a = aggregate(rows);
  double pct = a.overall.rate() * 100;
  o.check(std::abs(pct - kHeadlineRate) <= kRateTol, "headline rate");
  o.check(format_percent(a.overall.rate()) == "16.37%", "printed rate");
  RateCell matrix, sites, overall_levels, reach;
  for (auto& row : a.matrix)
    for (auto& c : row) {
      matrix.total += c.total;
      matrix.successes += c.successes;
    }
  for (const auto& [s, c] : a.per_site) {
    sites.total += c.total;
    sites.successes += c.successes;
  }
  for (const auto& [l, c] : a.by_overall) {
    overall_levels.total += c.total;
    overall_levels.successes += c.successes;
  }
  reach.total = a.achievable.total + a.unachievable.total;
  reach.successes = a.achievable.successes + a.unachievable.successes;
  for (const RateCell* c : {&matrix, &sites, &overall_levels, &reach}) {
    o.check(c->total == a.overall.total && c->successes == a.overall.successes, "partition sums");
  }
  for (int i = 0; i < 3; ++i) {
    int row = 0, col = 0;
    for (int j = 0; j < 3; ++j) {
      row += a.matrix[i][j].total;
      col += a.matrix[j][i].total;
    }
    o.check(row == a.by_action[static_cast<Level>(i + 1)].total, "matrix rows");
    o.check(col == a.by_visual[static_cast<Level>(i + 1)].total, "matrix columns");
  }
  std::map<SubsetTag, int> tagged;
  for (const auto& r : rows)
    for (auto t : r.subset_tags) ++tagged[t];
  for (const auto& [t, c] : a.subsets) o.check(c.total == tagged[t], "subset counts");
  o.detail << a.overall.successes << "/" << a.overall.total << " = " << format_percent(a.overall.rate()) << " ";
}

}  // namespace

int main() {
  const FixtureLayout layout{testing::fixture_dir()};
  fs::path tmp = fs::temp_directory_path() / ("webagent-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(tmp);
  FixtureStack stack(layout.sites());

  criterion("string primitives", kStringSeconds, string_primitives);
  criterion("ssim", kSsimSeconds, ssim_checks);
  criterion("action grammar", kActionSeconds, action_grammar);
  criterion("observation formats", kObservationSeconds, [&](Outcome& o) { observation_formats(o, stack, layout); });
  criterion("end-to-end hermetic run", kEndToEndSeconds, [&](Outcome& o) { end_to_end(o, stack, layout, tmp); });
  criterion("aggregation", kAggregationSeconds, aggregation);
  criterion("determinism", 0, [&](Outcome& o) { determinism(o, stack, layout, tmp); });

  fs::remove_all(tmp);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
