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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "caption/config.hpp"
#include "caption/evalkit.hpp"
#include "caption/service.hpp"

namespace caption {

struct GenerationOutcome {
  std::string sample_id;
  Strategy strategy = Strategy::DestShot;
  std::string error;  // error code name; empty on success
  std::string message;
};

struct GenerationReport {
  ClientMode mode = ClientMode::Replay;
  std::vector<Strategy> strategies;
  std::vector<GenerationOutcome> outcomes;  // sorted by (sample id, strategy)
  std::size_t live_calls = 0;

  std::size_t successes() const;
  std::size_t failures() const;
};

json to_json(const GenerationReport& report);

struct ScriptedRatingResult {
  std::size_t appended = 0;
  std::size_t already_recorded = 0;
  /// "line N: <code>: <message>" per rejected line.
  std::vector<std::string> errors;
};

struct AnalysisReport {
  Family family = Family::PromptAnalysis;
  json doc;          // reports/<family>.json
  std::string text;  // reports/<family>.txt
  bool empty = false;  // family had no ratings (EmptyFamily)
};

/// On-disk pipeline state rooted at one directory:
///   datasets.json          ingested manifests
///   plans/<dataset>.json   sample plans
///   candidates.jsonl       label candidates, sorted by (sample, technique)
///   generation-report.json last generation run
///   transcripts/           record/replay store (unless configured elsewhere)
///   comparisons-*.json, assignments.jsonl, ratings.jsonl, exclusions.jsonl
///   reports/<family>.json and .txt
class Workspace {
 public:
  Workspace(std::filesystem::path root, Config config);

  const std::filesystem::path& root() const noexcept { return root_; }
  const Config& config() const noexcept { return config_; }
  std::filesystem::path transcripts_dir() const;
  std::filesystem::path prompts_dir() const;

  /// Parses and validates each manifest, then records it. Returns dataset ids.
  std::vector<std::string> ingest(std::span<const std::filesystem::path> manifests);
  std::vector<Dataset> datasets() const;
  Dataset dataset(const std::string& dataset_id) const;

  SamplePlan sample(const std::string& dataset_id, std::size_t n, std::uint64_t seed);
  std::vector<SamplePlan> plans() const;
  /// Every sampled ButtonSample across all plans, keyed by sample id.
  std::map<std::string, ButtonSample> sample_index() const;

  /// Generates one candidate per sampled button and strategy on `parallelism`
  /// workers. Failures are collected in the report. `provider` overrides the
  /// configured HTTP provider for live and record modes.
  GenerationReport run_generation(std::span<const Strategy> strategies, ClientMode mode,
                                  LlmProvider* provider = nullptr);

  /// Reads {sample_id, text} lines as Human candidates. Throws Error{UnknownSample}.
  std::size_t import_human(const std::filesystem::path& jsonl);
  std::vector<LabelCandidate> candidates() const;

  std::vector<PairwiseComparison> build_pairs(Family family);
  /// Assigns every comparison that has no assignment yet. Returns how many were added.
  std::size_t assign(std::span<const std::string> raters, std::uint64_t seed);

  /// Replays {rater_id, comparison_id, choice[, rating_id, submitted_at]} lines
  /// through the same RatingService path the HTTP endpoint uses.
  ScriptedRatingResult rate_scripted(const std::filesystem::path& fixture);

  AnalysisReport run_analysis(Family family);

  EvalStore& store() noexcept { return *store_; }
  std::unique_ptr<RatingService> make_rating_service();

 private:
  void write_candidates(std::vector<LabelCandidate> candidates) const;

  std::filesystem::path root_;
  Config config_;
  std::unique_ptr<EvalStore> store_;
};

/// Non-empty, non-comment lines of a raters file.
std::vector<std::string> read_raters(const std::filesystem::path& path);

}  // namespace caption
