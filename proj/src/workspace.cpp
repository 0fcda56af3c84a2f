// Copyright 2026 The Caption Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "caption/workspace.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <set>
#include <sstream>
#include <thread>

#include "caption/error.hpp"
#include "caption/stats.hpp"
#include "json_util.hpp"

namespace caption {

namespace fs = std::filesystem;

std::size_t GenerationReport::successes() const {
  return static_cast<std::size_t>(
      std::count_if(outcomes.begin(), outcomes.end(), [](const GenerationOutcome& o) { return o.error.empty(); }));
}

std::size_t GenerationReport::failures() const { return outcomes.size() - successes(); }

json to_json(const GenerationReport& report) {
  json strategies = json::array();
  for (Strategy s : report.strategies) strategies.push_back(to_string(s));
  json outcomes = json::array();
  for (const GenerationOutcome& o : report.outcomes) {
    json row{{"sample_id", o.sample_id}, {"strategy", to_string(o.strategy)}};
    if (o.error.empty()) {
      row["status"] = "ok";
    } else {
      row["status"] = "failed";
      row["error"] = o.error;
      row["message"] = o.message;
    }
    outcomes.push_back(std::move(row));
  }
  return json{{"provider", to_string(report.mode)},
              {"strategies", std::move(strategies)},
              {"successes", report.successes()},
              {"failures", report.failures()},
              {"outcomes", std::move(outcomes)}};
}

namespace {

std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> lines;
  std::istringstream in(read_file_text(path));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t") == std::string::npos;
}

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

json section_error(const Error& e) {
  return json{{"error", std::string(to_string(e.code()))}, {"message", e.detail()}};
}

}  // namespace

std::vector<std::string> read_raters(const fs::path& path) {
  std::vector<std::string> raters;
  for (std::string& line : read_lines(path)) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t");
    raters.push_back(line.substr(first, last - first + 1));
  }
  return raters;
}

Workspace::Workspace(fs::path root, Config config) : root_(std::move(root)), config_(std::move(config)) {
  fs::create_directories(root_);
  store_ = std::make_unique<EvalStore>(root_);
}

fs::path Workspace::transcripts_dir() const {
  return config_.transcripts_dir.empty() ? root_ / "transcripts" : config_.transcripts_dir;
}

fs::path Workspace::prompts_dir() const {
  return config_.prompts_dir.empty() ? bundled_prompts_dir() : config_.prompts_dir;
}

// Datasets and sampling --------------------------------------------------------------------

namespace {

std::map<std::string, fs::path> read_dataset_registry(const fs::path& root) {
  std::map<std::string, fs::path> out;
  const fs::path file = root / "datasets.json";
  if (!fs::exists(file)) return out;
  const json doc = detail::parse_json_text(read_file_text(file), file.string());
  for (const json& row : detail::get_array(doc, "datasets", file.string())) {
    out[detail::get_string(row, "id", file.string())] = detail::get_string(row, "manifest", file.string());
  }
  return out;
}

}  // namespace

std::vector<std::string> Workspace::ingest(std::span<const fs::path> manifests) {
  auto registry = read_dataset_registry(root_);
  std::vector<std::string> ids;
  for (const fs::path& manifest : manifests) {
    const Dataset d = parse_dataset(manifest);
    registry[d.id] = fs::absolute(manifest).lexically_normal();
    ids.push_back(d.id);
  }
  json rows = json::array();
  for (const auto& [id, path] : registry) rows.push_back({{"id", id}, {"manifest", path.string()}});
  write_file_atomic(root_ / "datasets.json", json{{"datasets", std::move(rows)}}.dump(2) + "\n");
  return ids;
}

std::vector<Dataset> Workspace::datasets() const {
  std::vector<Dataset> out;
  for (const auto& [id, path] : read_dataset_registry(root_)) out.push_back(parse_dataset(path));
  return out;
}

Dataset Workspace::dataset(const std::string& dataset_id) const {
  const auto registry = read_dataset_registry(root_);
  auto it = registry.find(dataset_id);
  if (it == registry.end()) throw Error(Errc::InvalidArgument, "dataset \"" + dataset_id + "\" has not been ingested");
  return parse_dataset(it->second);
}

SamplePlan Workspace::sample(const std::string& dataset_id, std::size_t n, std::uint64_t seed) {
  SamplePlan plan = sample_buttons(dataset(dataset_id), n, seed, config_.eligibility);
  fs::create_directories(root_ / "plans");
  write_file_atomic(root_ / "plans" / (dataset_id + ".json"), to_json(plan).dump(2) + "\n");
  return plan;
}

std::vector<SamplePlan> Workspace::plans() const {
  std::vector<SamplePlan> out;
  const fs::path dir = root_ / "plans";
  if (!fs::exists(dir)) return out;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) {
    out.push_back(plan_from_json(detail::parse_json_text(read_file_text(f), f.string())));
  }
  return out;
}

std::map<std::string, ButtonSample> Workspace::sample_index() const {
  std::map<std::string, ButtonSample> out;
  for (const SamplePlan& plan : plans()) {
    std::map<std::string, ButtonSample> available;
    for (ButtonSample& s : eligible_samples(dataset(plan.dataset_id), config_.eligibility)) {
      available.emplace(s.sample_id, std::move(s));
    }
    for (const std::string& id : plan.sampled_ids) {
      auto it = available.find(id);
      if (it == available.end()) {
        throw Error(Errc::UnknownSample, "plan for " + plan.dataset_id + " names " + id +
                                             ", which no longer resolves in the dataset");
      }
      out.emplace(id, it->second);
    }
  }
  return out;
}

// Candidates ----------------------------------------------------------------------------

std::vector<LabelCandidate> Workspace::candidates() const {
  std::vector<LabelCandidate> out;
  const fs::path file = root_ / "candidates.jsonl";
  if (!fs::exists(file)) return out;
  for (const std::string& line : read_lines(file)) {
    if (blank(line)) continue;
    out.push_back(candidate_from_json(detail::parse_json_text(line, file.string())));
  }
  return out;
}

void Workspace::write_candidates(std::vector<LabelCandidate> candidates) const {
  std::sort(candidates.begin(), candidates.end(), [](const LabelCandidate& a, const LabelCandidate& b) {
    return std::tie(a.sample_id, a.technique) < std::tie(b.sample_id, b.technique);
  });
  std::string out;
  for (const LabelCandidate& c : candidates) out += to_json(c).dump() + "\n";
  write_file_atomic(root_ / "candidates.jsonl", out);
}

GenerationReport Workspace::run_generation(std::span<const Strategy> strategies, ClientMode mode,
                                           LlmProvider* provider) {
  const auto samples = sample_index();
  if (samples.empty()) throw Error(Errc::InvalidArgument, "no sampled buttons; run sample first");

  std::unique_ptr<HttpProvider> http;
  if (mode != ClientMode::Replay && provider == nullptr) {
    if (config_.provider.url.empty()) {
      throw Error(Errc::InvalidArgument, "live and record modes need a provider url (config or CAPTION_PROVIDER_URL)");
    }
    http = std::make_unique<HttpProvider>(config_.provider);
    provider = http.get();
  }
  TranscriptStore transcripts(transcripts_dir());
  LlmClient client(mode, &transcripts, mode == ClientMode::Replay ? nullptr : provider);
  LabelGenerator generator(PromptTemplates::load(prompts_dir()), config_.generation, client);

  struct Task {
    const ButtonSample* sample;
    Strategy strategy;
  };
  std::vector<Task> tasks;
  for (const auto& [id, sample] : samples) {
    for (Strategy s : strategies) tasks.push_back({&sample, s});
  }

  std::vector<GenerationOutcome> outcomes(tasks.size());
  std::vector<std::optional<LabelCandidate>> produced(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      GenerationOutcome& o = outcomes[i];
      o.sample_id = tasks[i].sample->sample_id;
      o.strategy = tasks[i].strategy;
      try {
        produced[i] = generator.generate_label(*tasks[i].sample, tasks[i].strategy);
      } catch (const Error& e) {
        o.error = std::string(to_string(e.code()));
        o.message = e.detail();
      } catch (const std::exception& e) {
        o.error = "Internal";
        o.message = e.what();
      }
    }
  };
  const std::size_t n_workers = std::max<std::size_t>(1, std::min(config_.parallelism, tasks.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::map<std::pair<std::string, Technique>, LabelCandidate> merged;
  for (LabelCandidate& c : candidates()) merged[{c.sample_id, c.technique}] = std::move(c);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const std::pair key{outcomes[i].sample_id, technique_for(outcomes[i].strategy)};
    if (produced[i]) {
      merged[key] = std::move(*produced[i]);
    } else {
      merged.erase(key);  // a stale label must not outlive a failed rerun
    }
  }
  std::vector<LabelCandidate> all;
  for (auto& [key, c] : merged) all.push_back(std::move(c));
  write_candidates(std::move(all));

  GenerationReport report;
  report.mode = mode;
  report.strategies.assign(strategies.begin(), strategies.end());
  report.outcomes = std::move(outcomes);
  report.live_calls = client.live_calls();
  write_file_atomic(root_ / "generation-report.json", to_json(report).dump(2) + "\n");
  return report;
}

std::size_t Workspace::import_human(const fs::path& jsonl) {
  const auto samples = sample_index();
  std::map<std::string, LabelCandidate> imported;
  std::size_t line_no = 0;
  for (const std::string& line : read_lines(jsonl)) {
    ++line_no;
    if (blank(line)) continue;
    const std::string where = jsonl.string() + ":" + std::to_string(line_no);
    const json doc = detail::parse_json_text(line, where);
    LabelCandidate c;
    c.sample_id = detail::get_string(doc, "sample_id", where);
    c.technique = Technique::Human;
    c.text = detail::get_string(doc, "text", where);
    if (!samples.contains(c.sample_id)) {
      throw Error(Errc::UnknownSample, "line " + std::to_string(line_no) + ": " + c.sample_id + " is not sampled");
    }
    imported[c.sample_id] = std::move(c);
  }
  std::vector<LabelCandidate> all;
  for (LabelCandidate& c : candidates()) {
    if (!(c.technique == Technique::Human && imported.contains(c.sample_id))) all.push_back(std::move(c));
  }
  for (auto& [id, c] : imported) all.push_back(std::move(c));
  write_candidates(std::move(all));
  return imported.size();
}

// Evaluation ----------------------------------------------------------------------------

std::vector<PairwiseComparison> Workspace::build_pairs(Family family) {
  std::vector<LabelCandidate> pool = candidates();
  if (family == Family::CaptionVsHuman) {
    // Human labels exist only for part of the corpus; compare where they do.
    std::set<std::string> labelled;
    for (const LabelCandidate& c : pool) {
      if (c.technique == Technique::Human) labelled.insert(c.sample_id);
    }
    std::erase_if(pool, [&](const LabelCandidate& c) { return !labelled.contains(c.sample_id); });
  }
  auto comparisons = build_comparisons(pool, family, config_.caption_technique);
  store_->put_comparisons(family, comparisons);
  return comparisons;
}

std::size_t Workspace::assign(std::span<const std::string> raters, std::uint64_t seed) {
  const std::set<std::string> done = store_->assigned_comparisons();
  std::vector<PairwiseComparison> pending;
  for (PairwiseComparison& c : store_->all_comparisons()) {
    if (!done.contains(c.comparison_id)) pending.push_back(std::move(c));
  }
  if (pending.empty()) return 0;
  const auto assignments = assign_raters(pending, raters, seed);
  store_->add_assignments(assignments);
  return assignments.size();
}

std::unique_ptr<RatingService> Workspace::make_rating_service() {
  return std::make_unique<RatingService>(*store_, sample_index(), config_.generation.highlight,
                                         config_.session_seed);
}

ScriptedRatingResult Workspace::rate_scripted(const fs::path& fixture) {
  auto service = make_rating_service();
  ScriptedRatingResult result;
  std::size_t line_no = 0;
  for (const std::string& line : read_lines(fixture)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      const std::string where = fixture.string() + ":" + std::to_string(line_no);
      const json doc = detail::parse_json_text(line, where);
      const std::string session = service->open_session(detail::get_string(doc, "rater_id", where));
      const auto outcome = service->submit(session, detail::get_string(doc, "comparison_id", where),
                                           parse_choice(detail::get_string(doc, "choice", where)),
                                           detail::opt_string(doc, "rating_id", where),
                                           detail::opt_string(doc, "submitted_at", where));
      ++(outcome == EvalStore::RecordOutcome::Appended ? result.appended : result.already_recorded);
    } catch (const Error& e) {
      result.errors.push_back("line " + std::to_string(line_no) + ": " + std::string(to_string(e.code())) + ": " +
                              e.detail());
    }
  }
  return result;
}

// Analysis ------------------------------------------------------------------------------

namespace {

json kappa_json(const stats::KappaResult& k) {
  return json{{"kappa", k.kappa},
              {"observed_agreement", k.observed_agreement},
              {"expected_agreement", k.expected_agreement},
              {"n_items", k.n_items},
              {"categories", k.categories}};
}

json summary_json(const stats::PreferenceSummary& s) {
  json counts = json::object();
  json pct = json::object();
  for (std::size_t i = 0; i < 4; ++i) {
    const std::string name = to_string(static_cast<CanonicalChoice>(i));
    counts[name] = s.counts[i];
    pct[name] = s.percentages[i];
  }
  return json{{"technique_a", to_string(s.technique_a)},
              {"technique_b", to_string(s.technique_b)},
              {"total", s.total},
              {"counts", std::move(counts)},
              {"percentages", std::move(pct)}};
}

}  // namespace

AnalysisReport Workspace::run_analysis(Family family) {
  AnalysisReport report;
  report.family = family;
  json& doc = report.doc;
  std::ostringstream txt;

  const auto ratings = store_->analysis_input(family);
  const auto comparisons = store_->comparisons(family);
  const auto excluded = store_->excluded_samples();

  doc["family"] = to_string(family);
  doc["n_comparisons"] = comparisons.size();
  doc["n_ratings"] = ratings.size();
  json decisions = json::array();
  for (const ExclusionDecision& d : store_->exclusions()) decisions.push_back(to_json(d));
  doc["exclusions"] = std::move(decisions);
  doc["excluded_samples"] = std::vector<std::string>(excluded.begin(), excluded.end());

  json warnings = json::array();
  for (const std::string& id : store_->incomplete_comparisons(family)) {
    warnings.push_back(std::string(to_string(Errc::IncompleteRatings)) + ": comparison " + id +
                       " has fewer than two ratings");
  }

  txt << "family: " << to_string(family) << "\n";
  txt << "comparisons: " << comparisons.size() << ", ratings analysed: " << ratings.size()
      << ", excluded samples: " << excluded.size() << "\n";

  if (ratings.empty()) {
    report.empty = true;
    doc["error"] = section_error(Error(Errc::EmptyFamily, "no ratings for family " + to_string(family)));
    txt << "error: EmptyFamily (no ratings)\n";
  } else {
    try {
      const auto k = stats::pooled_kappa(ratings);
      doc["kappa"] = kappa_json(k);
      txt << "kappa: " << fmt("%.3f", k.kappa) << " over " << k.n_items << " doubly rated comparisons\n";
    } catch (const Error& e) {
      doc["kappa"] = section_error(e);
      txt << "kappa: " << to_string(e.code()) << "\n";
    }

    const stats::ObservationTable obs = stats::expand_observations(ratings);
    json groups = json::object();
    for (const auto& [t, g] : obs.counts) groups[to_string(t)] = {{"preferred", g.successes}, {"trials", g.trials}};
    doc["observations"] = {{"rows", obs.size()}, {"groups", std::move(groups)}};

    try {
      const auto fit = stats::fit_logistic(obs);
      json fitted = json::object();
      for (const auto& [t, p] : fit.fitted) fitted[to_string(t)] = p;
      doc["logistic"] = {{"reference", to_string(fit.reference)},
                         {"coefficients", fit.coefficients},
                         {"fitted", std::move(fitted)},
                         {"log_likelihood", fit.log_likelihood},
                         {"deviance", fit.deviance},
                         {"converged", fit.converged},
                         {"iterations", fit.iterations}};
      if (!fit.converged) warnings.push_back("logistic fit did not converge (separation)");
    } catch (const Error& e) {
      doc["logistic"] = section_error(e);
    }

    try {
      const auto lrt = stats::lrt_anova(obs);
      doc["lrt"] = {{"statistic", lrt.statistic}, {"df", lrt.df}, {"n", lrt.n}, {"p_value", lrt.p_value}};
      txt << "LRT: chi2(" << lrt.df << ", N=" << lrt.n << ") = " << fmt("%.2f", lrt.statistic)
          << ", p = " << fmt("%.3f", lrt.p_value) << "\n";
    } catch (const Error& e) {
      doc["lrt"] = section_error(e);
      txt << "LRT: " << to_string(e.code()) << "\n";
    }

    try {
      json rows = json::array();
      txt << "post hoc (pooled two-proportion z, Holm):\n";
      for (const auto& z : stats::posthoc_pairwise(obs)) {
        rows.push_back({{"technique_a", to_string(z.pair.first)},
                        {"technique_b", to_string(z.pair.second)},
                        {"z", z.z},
                        {"p_raw", z.p_raw},
                        {"p_holm", z.p_holm}});
        txt << "  " << to_string(z.pair.first) << " vs " << to_string(z.pair.second) << ": z = " << fmt("%.3f", z.z)
            << ", p = " << fmt("%.4f", z.p_raw) << ", p_holm = " << fmt("%.4f", z.p_holm) << "\n";
      }
      doc["posthoc"] = std::move(rows);
    } catch (const Error& e) {
      doc["posthoc"] = section_error(e);
      txt << "  " << to_string(e.code()) << "\n";
    }

    std::map<std::pair<Technique, Technique>, std::vector<CanonicalRating>> by_pair;
    for (const CanonicalRating& r : ratings) by_pair[{r.technique_a, r.technique_b}].push_back(r);
    json summaries = json::array();
    for (const auto& [pair, rs] : by_pair) {
      const auto s = stats::preference_summary(rs, family);
      summaries.push_back(summary_json(s));
      txt << "preference " << to_string(pair.first) << " vs " << to_string(pair.second) << " (n=" << s.total
          << "):\n";
      const std::string names[4] = {"prefer " + to_string(pair.first), "prefer " + to_string(pair.second), "both",
                                    "neither"};
      for (std::size_t i = 0; i < 4; ++i) {
        char line[128];
        std::snprintf(line, sizeof line, "  %-24s %6.2f%%  (%zu)\n", names[i].c_str(), s.percentages[i], s.counts[i]);
        txt << line;
      }
    }
    doc["summary"] = std::move(summaries);
  }

  for (const auto& w : warnings) txt << "warning: " << w.get<std::string>() << "\n";
  doc["warnings"] = std::move(warnings);
  report.text = txt.str();

  fs::create_directories(root_ / "reports");
  write_file_atomic(root_ / "reports" / (to_string(family) + ".json"), doc.dump(2) + "\n");
  write_file_atomic(root_ / "reports" / (to_string(family) + ".txt"), report.text);
  return report;
}

}  // namespace caption
