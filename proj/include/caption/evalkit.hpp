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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "caption/crawl.hpp"
#include "caption/labelgen.hpp"

namespace caption {

// Sampling ------------------------------------------------------------------------

struct SamplePlan {
  std::string dataset_id;
  std::uint64_t seed = 0;
  std::size_t per_dataset_count = 0;
  std::vector<std::string> sampled_ids;

  friend bool operator==(const SamplePlan&, const SamplePlan&) = default;
};

json to_json(const SamplePlan& plan);
SamplePlan plan_from_json(const json& doc);

/// Every trace that resolves to a valid ButtonSample, in trace order, first occurrence per sample id.
std::vector<ButtonSample> eligible_samples(const Dataset& dataset, const EligibilityPolicy& policy = {});

/// Seeded partial Fisher-Yates over eligible_samples(). Throws Error{PopulationTooSmall}.
SamplePlan sample_buttons(const Dataset& dataset, std::size_t n, std::uint64_t seed,
                          const EligibilityPolicy& policy = {});

// Comparisons -------------------------------------------------------------------------

enum class Family { PromptAnalysis, CaptionVsHuman, CaptionVsBaseline };

inline constexpr Family kAllFamilies[] = {Family::PromptAnalysis, Family::CaptionVsHuman, Family::CaptionVsBaseline};

/// "prompt" | "vs-human" | "vs-baseline".
std::string to_string(Family family);
Family parse_family(std::string_view text);

struct PairwiseComparison {
  std::string comparison_id;
  std::string sample_id;
  LabelCandidate candidate_a;  // canonical order: technique, then text
  LabelCandidate candidate_b;
  Family family = Family::PromptAnalysis;

  friend bool operator==(const PairwiseComparison&, const PairwiseComparison&) = default;
};

json to_json(const PairwiseComparison& comparison);
PairwiseComparison comparison_from_json(const json& doc);

/// First 16 hex chars of SHA-256 over (family, sample id, technique pair).
std::string comparison_id_for(Family family, std::string_view sample_id, Technique a, Technique b);

/// PromptAnalysis: the three strategy pairs per sample; the two system families:
/// one pair per sample against `caption_technique`. Output ordered by sample id.
/// Throws Error{MissingCandidate}.
std::vector<PairwiseComparison> build_comparisons(std::span<const LabelCandidate> candidates, Family family,
                                                  Technique caption_technique = Technique::CaptionS3);

// Assignment and ratings ------------------------------------------------------------

struct Assignment {
  std::string comparison_id;
  std::string rater_id;
  bool presentation_swapped = false;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

json to_json(const Assignment& assignment);
Assignment assignment_from_json(const json& doc);

/// Two distinct raters per comparison, loads within one of each other.
/// Throws Error{InsufficientRaters}.
std::vector<Assignment> assign_raters(std::span<const PairwiseComparison> comparisons,
                                      std::span<const std::string> raters, std::uint64_t seed);

/// As presented to the rater.
enum class Choice { First, Second, Both, Neither };
/// In canonical candidate order.
enum class CanonicalChoice { PreferA, PreferB, Both, Neither };

std::string to_string(Choice choice);
Choice parse_choice(std::string_view text);
std::string to_string(CanonicalChoice choice);
CanonicalChoice parse_canonical_choice(std::string_view text);

struct Rating {
  std::string rating_id;
  std::string comparison_id;
  std::string rater_id;
  Choice choice = Choice::Both;
  std::string submitted_at;
  /// Set when an operator deliberately replaces an earlier rating.
  std::optional<std::string> supersedes;

  friend bool operator==(const Rating&, const Rating&) = default;
};

json to_json(const Rating& rating);
Rating rating_from_json(const json& doc);

/// Throws Error{InconsistentIds}.
CanonicalChoice derandomize_choice(const Rating& rating, const Assignment& assignment,
                                   const PairwiseComparison& comparison);

enum class ExclusionReason { ImplausibleTransition, WrongHighlight, Other };

std::string to_string(ExclusionReason reason);
ExclusionReason parse_exclusion_reason(std::string_view text);

struct ExclusionDecision {
  std::string sample_id;
  bool excluded = true;
  ExclusionReason reason = ExclusionReason::Other;
  std::string note;

  friend bool operator==(const ExclusionDecision&, const ExclusionDecision&) = default;
};

json to_json(const ExclusionDecision& decision);
ExclusionDecision exclusion_from_json(const json& doc);

/// A de-randomized rating joined with its comparison, ready for analysis.
struct CanonicalRating {
  std::string comparison_id;
  std::string sample_id;
  std::string rater_id;
  Technique technique_a = Technique::CaptionS1;
  Technique technique_b = Technique::CaptionS2;
  CanonicalChoice choice = CanonicalChoice::Both;
};

/// Append-only evaluation state on disk:
///   comparisons-<family>.json, assignments.jsonl, ratings.jsonl, exclusions.jsonl.
/// All public members are safe to call concurrently; writes are serialized.
class EvalStore {
 public:
  explicit EvalStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }

  /// Writes (or rewrites) the family's comparison document.
  void put_comparisons(Family family, std::vector<PairwiseComparison> comparisons);
  std::vector<PairwiseComparison> comparisons(Family family) const;
  std::vector<PairwiseComparison> all_comparisons() const;
  std::optional<PairwiseComparison> comparison(std::string_view comparison_id) const;

  /// Appends assignments; a (comparison, rater) pair already present is skipped.
  /// Throws Error{UnknownComparison}.
  void add_assignments(std::span<const Assignment> assignments);
  std::vector<Assignment> assignments() const;
  std::vector<Assignment> assignments_for(std::string_view rater_id) const;
  std::optional<Assignment> assignment(std::string_view comparison_id, std::string_view rater_id) const;
  std::set<std::string> assigned_comparisons() const;

  enum class RecordOutcome { Appended, AlreadyRecorded };

  /// Idempotent on rating_id and on an unchanged (comparison, rater, choice).
  /// `supersede` lets an operator replace an earlier, different choice.
  /// Throws Error{UnknownComparison | RaterMismatch | DuplicateConflict}.
  RecordOutcome record_rating(const Rating& rating, bool supersede = false);
  /// Latest rating per (comparison, rater).
  std::vector<Rating> effective_ratings() const;
  std::optional<Rating> effective_rating(std::string_view comparison_id, std::string_view rater_id) const;
  std::size_t rating_log_size() const;

  /// Samples with at least one Neither rating and no decision yet, sorted.
  std::vector<std::string> review_queue() const;
  /// Throws Error{UnknownSample | AlreadyDecided}.
  void apply_exclusion(const ExclusionDecision& decision);
  std::vector<ExclusionDecision> exclusions() const;
  std::set<std::string> excluded_samples() const;

  /// De-randomized ratings of the family's retained comparisons.
  std::vector<CanonicalRating> analysis_input(Family family) const;
  /// Comparisons of the family (retained only) with fewer than two ratings.
  std::vector<std::string> incomplete_comparisons(Family family) const;

 private:
  using RaterKey = std::pair<std::string, std::string>;  // (comparison, rater)

  void load();
  void index_rating(const Rating& rating);
  void append_line(const char* file, const json& doc);

  std::filesystem::path dir_;
  mutable std::mutex mu_;
  std::map<Family, std::vector<PairwiseComparison>> comparisons_;
  std::map<std::string, PairwiseComparison, std::less<>> by_id_;
  std::vector<Assignment> assignments_;
  std::map<RaterKey, Assignment> assignment_index_;
  std::vector<Rating> rating_log_;
  std::map<std::string, Rating, std::less<>> rating_by_id_;
  std::map<RaterKey, Rating> effective_;
  std::vector<ExclusionDecision> exclusions_;
};

}  // namespace caption
