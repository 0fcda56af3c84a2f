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

#include "caption/evalkit.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>

#include "caption/error.hpp"
#include "caption/rng.hpp"
#include "json_util.hpp"

namespace caption {

namespace fs = std::filesystem;

// Sampling ------------------------------------------------------------------------

json to_json(const SamplePlan& plan) {
  return json{{"dataset_id", plan.dataset_id},
              {"seed", plan.seed},
              {"per_dataset_count", plan.per_dataset_count},
              {"sampled_ids", plan.sampled_ids}};
}

SamplePlan plan_from_json(const json& doc) {
  const std::string where = "sample plan";
  SamplePlan plan;
  plan.dataset_id = detail::get_string(doc, "dataset_id", where);
  const json& seed = detail::require(doc, "seed", where);
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
    throw Error(Errc::SchemaViolation, where + ": seed must be an integer");
  }
  plan.seed = seed.get<std::uint64_t>();
  plan.per_dataset_count = static_cast<std::size_t>(detail::get_int(doc, "per_dataset_count", where));
  plan.sampled_ids = detail::get_array(doc, "sampled_ids", where).get<std::vector<std::string>>();
  return plan;
}

std::vector<ButtonSample> eligible_samples(const Dataset& dataset, const EligibilityPolicy& policy) {
  std::vector<ButtonSample> out;
  std::set<std::string> seen;
  for (const InteractionTrace& trace : dataset.traces) {
    try {
      ButtonSample sample = resolve_sample(dataset, trace, policy);
      if (seen.insert(sample.sample_id).second) out.push_back(std::move(sample));
    } catch (const Error& e) {
      if (e.code() != Errc::IneligibleElement && e.code() != Errc::SelfTransition &&
          e.code() != Errc::DanglingReference) {
        throw;
      }
    }
  }
  return out;
}

SamplePlan sample_buttons(const Dataset& dataset, std::size_t n, std::uint64_t seed, const EligibilityPolicy& policy) {
  std::vector<std::string> ids;
  for (const ButtonSample& s : eligible_samples(dataset, policy)) ids.push_back(s.sample_id);
  if (n > ids.size()) {
    throw Error(Errc::PopulationTooSmall, "asked for " + std::to_string(n) + " samples, dataset \"" + dataset.id +
                                              "\" has " + std::to_string(ids.size()) + " eligible");
  }
  Xoshiro256StarStar rng(seed);
  partial_fisher_yates(ids, n, rng);
  ids.resize(n);
  return SamplePlan{dataset.id, seed, n, std::move(ids)};
}

// Comparisons ---------------------------------------------------------------------------

std::string to_string(Family family) {
  switch (family) {
    case Family::PromptAnalysis: return "prompt";
    case Family::CaptionVsHuman: return "vs-human";
    case Family::CaptionVsBaseline: return "vs-baseline";
  }
  return "unknown";
}

Family parse_family(std::string_view text) {
  for (Family f : kAllFamilies) {
    if (text == to_string(f)) return f;
  }
  throw Error(Errc::InvalidArgument, "family must be prompt, vs-human or vs-baseline");
}

json to_json(const PairwiseComparison& c) {
  return json{{"comparison_id", c.comparison_id},
              {"sample_id", c.sample_id},
              {"family", to_string(c.family)},
              {"candidate_a", to_json(c.candidate_a)},
              {"candidate_b", to_json(c.candidate_b)}};
}

PairwiseComparison comparison_from_json(const json& doc) {
  const std::string where = "comparison";
  PairwiseComparison c;
  c.comparison_id = detail::get_string(doc, "comparison_id", where);
  c.sample_id = detail::get_string(doc, "sample_id", where);
  c.family = parse_family(detail::get_string(doc, "family", where));
  c.candidate_a = candidate_from_json(detail::require(doc, "candidate_a", where));
  c.candidate_b = candidate_from_json(detail::require(doc, "candidate_b", where));
  return c;
}

std::string comparison_id_for(Family family, std::string_view sample_id, Technique a, Technique b) {
  Sha256 h;
  h.update_field(to_string(family));
  h.update_field(sample_id);
  h.update_field(to_string(a));
  h.update_field(to_string(b));
  return h.hex_digest().substr(0, 16);
}

namespace {

bool canonical_less(const LabelCandidate& x, const LabelCandidate& y) {
  if (x.technique != y.technique) return x.technique < y.technique;
  return x.text < y.text;
}

PairwiseComparison make_pair(Family family, const LabelCandidate& x, const LabelCandidate& y) {
  PairwiseComparison c;
  c.family = family;
  c.sample_id = x.sample_id;
  c.candidate_a = canonical_less(y, x) ? y : x;
  c.candidate_b = canonical_less(y, x) ? x : y;
  c.comparison_id = comparison_id_for(family, c.sample_id, c.candidate_a.technique, c.candidate_b.technique);
  return c;
}

}  // namespace

std::vector<PairwiseComparison> build_comparisons(std::span<const LabelCandidate> candidates, Family family,
                                                  Technique caption_technique) {
  if (caption_technique == Technique::Baseline || caption_technique == Technique::Human) {
    throw Error(Errc::InvalidArgument, "caption technique must be one of the caption strategies");
  }
  std::map<std::string, std::map<Technique, const LabelCandidate*>> by_sample;
  for (const LabelCandidate& c : candidates) {
    by_sample[c.sample_id].emplace(c.technique, &c);
  }
  std::vector<std::pair<Technique, Technique>> wanted;
  switch (family) {
    case Family::PromptAnalysis:
      wanted = {{Technique::CaptionS1, Technique::CaptionS2},
                {Technique::CaptionS1, Technique::CaptionS3},
                {Technique::CaptionS2, Technique::CaptionS3}};
      break;
    case Family::CaptionVsHuman:
      wanted = {{caption_technique, Technique::Human}};
      break;
    case Family::CaptionVsBaseline:
      wanted = {{caption_technique, Technique::Baseline}};
      break;
  }
  std::vector<PairwiseComparison> out;
  for (const auto& [sample_id, techniques] : by_sample) {
    for (const auto& [ta, tb] : wanted) {
      auto a = techniques.find(ta);
      auto b = techniques.find(tb);
      if (a == techniques.end() || b == techniques.end()) {
        const Technique missing = a == techniques.end() ? ta : tb;
        throw Error(Errc::MissingCandidate,
                    "sample \"" + sample_id + "\" has no " + to_string(missing) + " label for " + to_string(family));
      }
      out.push_back(make_pair(family, *a->second, *b->second));
    }
  }
  return out;
}

// Assignment ------------------------------------------------------------------------------

json to_json(const Assignment& a) {
  return json{{"comparison_id", a.comparison_id}, {"rater_id", a.rater_id}, {"presentation_swapped", a.presentation_swapped}};
}

Assignment assignment_from_json(const json& doc) {
  const std::string where = "assignment";
  return Assignment{detail::get_string(doc, "comparison_id", where), detail::get_string(doc, "rater_id", where),
                    detail::get_bool(doc, "presentation_swapped", false, where)};
}

std::vector<Assignment> assign_raters(std::span<const PairwiseComparison> comparisons,
                                      std::span<const std::string> raters, std::uint64_t seed) {
  const std::set<std::string> distinct(raters.begin(), raters.end());
  if (distinct.size() < 2) {
    throw Error(Errc::InsufficientRaters, "need at least 2 distinct raters, got " + std::to_string(distinct.size()));
  }
  if (distinct.size() != raters.size()) {
    throw Error(Errc::InvalidArgument, "rater list contains duplicates");
  }
  Xoshiro256StarStar rng(seed);
  std::vector<std::size_t> order(comparisons.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  partial_fisher_yates(order, order.size(), rng);

  std::vector<std::size_t> load(raters.size(), 0);
  const auto pick_least_loaded = [&](std::optional<std::size_t> exclude) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> ties;
    for (std::size_t r = 0; r < raters.size(); ++r) {
      if (exclude && *exclude == r) continue;
      if (load[r] < best) {
        best = load[r];
        ties.clear();
      }
      if (load[r] == best) ties.push_back(r);
    }
    return ties[static_cast<std::size_t>(rng.below(ties.size()))];
  };

  std::vector<std::array<Assignment, 2>> per_comparison(comparisons.size());
  for (std::size_t idx : order) {
    const std::size_t first = pick_least_loaded(std::nullopt);
    ++load[first];
    const std::size_t second = pick_least_loaded(first);
    ++load[second];
    const std::string& cid = comparisons[idx].comparison_id;
    per_comparison[idx][0] = Assignment{cid, raters[first], rng.coin()};
    per_comparison[idx][1] = Assignment{cid, raters[second], rng.coin()};
  }
  std::vector<Assignment> out;
  out.reserve(comparisons.size() * 2);
  for (auto& pair : per_comparison) {
    out.push_back(std::move(pair[0]));
    out.push_back(std::move(pair[1]));
  }
  return out;
}

// Ratings -------------------------------------------------------------------------------------

std::string to_string(Choice choice) {
  switch (choice) {
    case Choice::First: return "first";
    case Choice::Second: return "second";
    case Choice::Both: return "both";
    case Choice::Neither: return "neither";
  }
  return "unknown";
}

Choice parse_choice(std::string_view text) {
  for (Choice c : {Choice::First, Choice::Second, Choice::Both, Choice::Neither}) {
    if (text == to_string(c)) return c;
  }
  throw Error(Errc::InvalidArgument, "choice must be first, second, both or neither");
}

std::string to_string(CanonicalChoice choice) {
  switch (choice) {
    case CanonicalChoice::PreferA: return "prefer_a";
    case CanonicalChoice::PreferB: return "prefer_b";
    case CanonicalChoice::Both: return "both";
    case CanonicalChoice::Neither: return "neither";
  }
  return "unknown";
}

CanonicalChoice parse_canonical_choice(std::string_view text) {
  for (CanonicalChoice c :
       {CanonicalChoice::PreferA, CanonicalChoice::PreferB, CanonicalChoice::Both, CanonicalChoice::Neither}) {
    if (text == to_string(c)) return c;
  }
  throw Error(Errc::InvalidArgument, "canonical choice must be prefer_a, prefer_b, both or neither");
}

json to_json(const Rating& r) {
  json out{{"rating_id", r.rating_id},
           {"comparison_id", r.comparison_id},
           {"rater_id", r.rater_id},
           {"choice", to_string(r.choice)},
           {"submitted_at", r.submitted_at}};
  if (r.supersedes) out["supersedes"] = *r.supersedes;
  return out;
}

Rating rating_from_json(const json& doc) {
  const std::string where = "rating";
  Rating r;
  r.rating_id = detail::get_string(doc, "rating_id", where);
  r.comparison_id = detail::get_string(doc, "comparison_id", where);
  r.rater_id = detail::get_string(doc, "rater_id", where);
  r.choice = parse_choice(detail::get_string(doc, "choice", where));
  r.submitted_at = detail::opt_string(doc, "submitted_at", where).value_or("");
  r.supersedes = detail::opt_string(doc, "supersedes", where);
  return r;
}

CanonicalChoice derandomize_choice(const Rating& rating, const Assignment& assignment,
                                   const PairwiseComparison& comparison) {
  if (rating.comparison_id != assignment.comparison_id || assignment.comparison_id != comparison.comparison_id ||
      rating.rater_id != assignment.rater_id) {
    throw Error(Errc::InconsistentIds, "rating " + rating.rating_id + " does not match its assignment/comparison");
  }
  switch (rating.choice) {
    case Choice::First:
      return assignment.presentation_swapped ? CanonicalChoice::PreferB : CanonicalChoice::PreferA;
    case Choice::Second:
      return assignment.presentation_swapped ? CanonicalChoice::PreferA : CanonicalChoice::PreferB;
    case Choice::Both:
      return CanonicalChoice::Both;
    case Choice::Neither:
      return CanonicalChoice::Neither;
  }
  return CanonicalChoice::Neither;
}

std::string to_string(ExclusionReason reason) {
  switch (reason) {
    case ExclusionReason::ImplausibleTransition: return "implausible_transition";
    case ExclusionReason::WrongHighlight: return "wrong_highlight";
    case ExclusionReason::Other: return "other";
  }
  return "unknown";
}

ExclusionReason parse_exclusion_reason(std::string_view text) {
  for (ExclusionReason r : {ExclusionReason::ImplausibleTransition, ExclusionReason::WrongHighlight,
                            ExclusionReason::Other}) {
    if (text == to_string(r)) return r;
  }
  throw Error(Errc::InvalidArgument, "reason must be implausible_transition, wrong_highlight or other");
}

json to_json(const ExclusionDecision& d) {
  return json{{"sample_id", d.sample_id}, {"excluded", d.excluded}, {"reason", to_string(d.reason)}, {"note", d.note}};
}

ExclusionDecision exclusion_from_json(const json& doc) {
  const std::string where = "exclusion";
  ExclusionDecision d;
  d.sample_id = detail::get_string(doc, "sample_id", where);
  d.excluded = detail::get_bool(doc, "excluded", true, where);
  d.reason = parse_exclusion_reason(detail::get_string(doc, "reason", where));
  d.note = detail::opt_string(doc, "note", where).value_or("");
  return d;
}

// EvalStore -------------------------------------------------------------------------------------

namespace {

constexpr const char* kAssignmentsFile = "assignments.jsonl";
constexpr const char* kRatingsFile = "ratings.jsonl";
constexpr const char* kExclusionsFile = "exclusions.jsonl";

fs::path comparisons_path(const fs::path& dir, Family family) {
  return dir / ("comparisons-" + to_string(family) + ".json");
}

template <typename Fn>
void for_each_jsonl(const fs::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) return;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    fn(detail::parse_json_text(line, path.string() + ":" + std::to_string(number)));
  }
}

}  // namespace

EvalStore::EvalStore(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  load();
}

void EvalStore::load() {
  for (Family family : kAllFamilies) {
    const fs::path path = comparisons_path(dir_, family);
    if (!fs::exists(path)) continue;
    const json doc = detail::parse_json_text(read_file_text(path), path.string());
    auto& list = comparisons_[family];
    for (const json& cj : detail::get_array(doc, "comparisons", path.string())) {
      list.push_back(comparison_from_json(cj));
      by_id_[list.back().comparison_id] = list.back();
    }
  }
  for_each_jsonl(dir_ / kAssignmentsFile, [&](const json& doc) {
    Assignment a = assignment_from_json(doc);
    if (assignment_index_.emplace(RaterKey{a.comparison_id, a.rater_id}, a).second) assignments_.push_back(a);
  });
  for_each_jsonl(dir_ / kRatingsFile, [&](const json& doc) { index_rating(rating_from_json(doc)); });
  for_each_jsonl(dir_ / kExclusionsFile, [&](const json& doc) { exclusions_.push_back(exclusion_from_json(doc)); });
}

void EvalStore::index_rating(const Rating& rating) {
  rating_log_.push_back(rating);
  rating_by_id_[rating.rating_id] = rating;
  effective_[RaterKey{rating.comparison_id, rating.rater_id}] = rating;
}

void EvalStore::append_line(const char* file, const json& doc) {
  std::ofstream out(dir_ / file, std::ios::app);
  if (!out) throw Error(Errc::MissingFile, "cannot append to " + (dir_ / file).string());
  out << doc.dump() << "\n";
  out.flush();
}

void EvalStore::put_comparisons(Family family, std::vector<PairwiseComparison> comparisons) {
  std::lock_guard lock(mu_);
  json list = json::array();
  for (const PairwiseComparison& c : comparisons) {
    if (c.family != family) throw Error(Errc::InvalidArgument, "comparison family mismatch");
    list.push_back(to_json(c));
  }
  write_file_atomic(comparisons_path(dir_, family),
                    json{{"family", to_string(family)}, {"comparisons", std::move(list)}}.dump(2) + "\n");
  for (const PairwiseComparison& old : comparisons_[family]) by_id_.erase(old.comparison_id);
  for (const PairwiseComparison& c : comparisons) by_id_[c.comparison_id] = c;
  comparisons_[family] = std::move(comparisons);
}

std::vector<PairwiseComparison> EvalStore::comparisons(Family family) const {
  std::lock_guard lock(mu_);
  auto it = comparisons_.find(family);
  return it == comparisons_.end() ? std::vector<PairwiseComparison>{} : it->second;
}

std::vector<PairwiseComparison> EvalStore::all_comparisons() const {
  std::lock_guard lock(mu_);
  std::vector<PairwiseComparison> out;
  for (const auto& [family, list] : comparisons_) out.insert(out.end(), list.begin(), list.end());
  return out;
}

std::optional<PairwiseComparison> EvalStore::comparison(std::string_view comparison_id) const {
  std::lock_guard lock(mu_);
  auto it = by_id_.find(comparison_id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

void EvalStore::add_assignments(std::span<const Assignment> assignments) {
  std::lock_guard lock(mu_);
  for (const Assignment& a : assignments) {
    if (!by_id_.contains(a.comparison_id)) {
      throw Error(Errc::UnknownComparison, "assignment for unknown comparison " + a.comparison_id);
    }
  }
  for (const Assignment& a : assignments) {
    if (!assignment_index_.emplace(RaterKey{a.comparison_id, a.rater_id}, a).second) continue;
    assignments_.push_back(a);
    append_line(kAssignmentsFile, to_json(a));
  }
}

std::vector<Assignment> EvalStore::assignments() const {
  std::lock_guard lock(mu_);
  return assignments_;
}

std::vector<Assignment> EvalStore::assignments_for(std::string_view rater_id) const {
  std::lock_guard lock(mu_);
  std::vector<Assignment> out;
  for (const Assignment& a : assignments_) {
    if (a.rater_id == rater_id) out.push_back(a);
  }
  return out;
}

std::optional<Assignment> EvalStore::assignment(std::string_view comparison_id, std::string_view rater_id) const {
  std::lock_guard lock(mu_);
  auto it = assignment_index_.find(RaterKey{std::string(comparison_id), std::string(rater_id)});
  if (it == assignment_index_.end()) return std::nullopt;
  return it->second;
}

std::set<std::string> EvalStore::assigned_comparisons() const {
  std::lock_guard lock(mu_);
  std::set<std::string> out;
  for (const Assignment& a : assignments_) out.insert(a.comparison_id);
  return out;
}

EvalStore::RecordOutcome EvalStore::record_rating(const Rating& rating, bool supersede) {
  std::lock_guard lock(mu_);
  if (!by_id_.contains(rating.comparison_id)) {
    throw Error(Errc::UnknownComparison, "no comparison " + rating.comparison_id);
  }
  const RaterKey key{rating.comparison_id, rating.rater_id};
  if (!assignment_index_.contains(key)) {
    throw Error(Errc::RaterMismatch,
                "rater \"" + rating.rater_id + "\" is not assigned to comparison " + rating.comparison_id);
  }
  if (auto it = rating_by_id_.find(rating.rating_id); it != rating_by_id_.end()) {
    const Rating& prior = it->second;
    if (prior.comparison_id == rating.comparison_id && prior.rater_id == rating.rater_id &&
        prior.choice == rating.choice) {
      return RecordOutcome::AlreadyRecorded;
    }
    throw Error(Errc::DuplicateConflict, "rating_id " + rating.rating_id + " already recorded with different content");
  }
  Rating stored = rating;
  if (auto it = effective_.find(key); it != effective_.end()) {
    if (it->second.choice == rating.choice) return RecordOutcome::AlreadyRecorded;
    if (!supersede) {
      throw Error(Errc::DuplicateConflict, "rater \"" + rating.rater_id + "\" already chose " +
                                               to_string(it->second.choice) + " for " + rating.comparison_id);
    }
    stored.supersedes = it->second.rating_id;
  }
  append_line(kRatingsFile, to_json(stored));
  index_rating(stored);
  return RecordOutcome::Appended;
}

std::vector<Rating> EvalStore::effective_ratings() const {
  std::lock_guard lock(mu_);
  std::vector<Rating> out;
  out.reserve(effective_.size());
  for (const auto& [key, rating] : effective_) out.push_back(rating);
  return out;
}

std::optional<Rating> EvalStore::effective_rating(std::string_view comparison_id, std::string_view rater_id) const {
  std::lock_guard lock(mu_);
  auto it = effective_.find(RaterKey{std::string(comparison_id), std::string(rater_id)});
  if (it == effective_.end()) return std::nullopt;
  return it->second;
}

std::size_t EvalStore::rating_log_size() const {
  std::lock_guard lock(mu_);
  return rating_log_.size();
}

std::vector<std::string> EvalStore::review_queue() const {
  std::lock_guard lock(mu_);
  std::set<std::string> decided;
  for (const ExclusionDecision& d : exclusions_) decided.insert(d.sample_id);
  std::set<std::string> queue;
  for (const auto& [key, rating] : effective_) {
    if (rating.choice != Choice::Neither) continue;
    auto c = by_id_.find(rating.comparison_id);
    if (c != by_id_.end() && !decided.contains(c->second.sample_id)) queue.insert(c->second.sample_id);
  }
  return {queue.begin(), queue.end()};
}

void EvalStore::apply_exclusion(const ExclusionDecision& decision) {
  std::lock_guard lock(mu_);
  const bool known = std::any_of(by_id_.begin(), by_id_.end(),
                                 [&](const auto& entry) { return entry.second.sample_id == decision.sample_id; });
  if (!known) throw Error(Errc::UnknownSample, "no comparison uses sample \"" + decision.sample_id + "\"");
  for (const ExclusionDecision& d : exclusions_) {
    if (d.sample_id == decision.sample_id) {
      throw Error(Errc::AlreadyDecided, "sample \"" + decision.sample_id + "\" already has a decision");
    }
  }
  append_line(kExclusionsFile, to_json(decision));
  exclusions_.push_back(decision);
}

std::vector<ExclusionDecision> EvalStore::exclusions() const {
  std::lock_guard lock(mu_);
  return exclusions_;
}

std::set<std::string> EvalStore::excluded_samples() const {
  std::lock_guard lock(mu_);
  std::set<std::string> out;
  for (const ExclusionDecision& d : exclusions_) {
    if (d.excluded) out.insert(d.sample_id);
  }
  return out;
}

std::vector<CanonicalRating> EvalStore::analysis_input(Family family) const {
  const std::set<std::string> excluded = excluded_samples();
  std::lock_guard lock(mu_);
  std::vector<CanonicalRating> out;
  auto it = comparisons_.find(family);
  if (it == comparisons_.end()) return out;
  for (const PairwiseComparison& c : it->second) {
    if (excluded.contains(c.sample_id)) continue;
    for (auto r = effective_.lower_bound(RaterKey{c.comparison_id, ""});
         r != effective_.end() && r->first.first == c.comparison_id; ++r) {
      const Assignment& a = assignment_index_.at(r->first);
      out.push_back(CanonicalRating{c.comparison_id, c.sample_id, r->second.rater_id, c.candidate_a.technique,
                                    c.candidate_b.technique, derandomize_choice(r->second, a, c)});
    }
  }
  return out;
}

std::vector<std::string> EvalStore::incomplete_comparisons(Family family) const {
  const std::set<std::string> excluded = excluded_samples();
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  auto it = comparisons_.find(family);
  if (it == comparisons_.end()) return out;
  for (const PairwiseComparison& c : it->second) {
    if (excluded.contains(c.sample_id)) continue;
    std::size_t n = 0;
    for (auto r = effective_.lower_bound(RaterKey{c.comparison_id, ""});
         r != effective_.end() && r->first.first == c.comparison_id; ++r) {
      ++n;
    }
    if (n < 2) out.push_back(c.comparison_id);
  }
  return out;
}

}  // namespace caption
