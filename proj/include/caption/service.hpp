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
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "caption/error.hpp"
#include "caption/evalkit.hpp"
#include "caption/imaging.hpp"

namespace caption {

struct Session {
  std::string session_id;
  std::string rater_id;
  std::vector<std::string> pending;  // comparison ids, serving order
  std::size_t completed = 0;
};

/// What a rater sees. Carries no technique names, sample ids or bounds.
struct ComparisonPayload {
  std::string comparison_id;
  Bytes image_png;  // origin screenshot with the highlight baked in
  std::string label_first;
  std::string label_second;
  std::size_t completed = 0;
  std::size_t total = 0;
};

inline constexpr std::string_view kChoiceOptions[] = {"first", "second", "both", "neither"};

json to_json(const ComparisonPayload& payload);

struct RaterProgress {
  std::size_t assigned = 0;
  std::size_t completed = 0;
};

/// Serves rating sessions on top of an EvalStore. Session state is derived from
/// the append-only stores, so a restarted service resumes exactly.
class RatingService {
 public:
  RatingService(EvalStore& store, std::map<std::string, ButtonSample> samples, HighlightStyle highlight,
                std::uint64_t session_seed);

  /// Deterministic per rater. Throws Error{InvalidArgument} for an empty id.
  std::string open_session(std::string_view rater_id);
  static std::string session_id_for(std::string_view rater_id);

  /// Throws Error{UnknownSession}.
  Session session(std::string_view session_id) const;

  /// Next pending comparison, or nullopt when the rater is done. Repeated calls
  /// return the in-flight comparison until it is rated.
  std::optional<ComparisonPayload> next_comparison(std::string_view session_id);

  /// Records a rating through EvalStore::record_rating. rating_id defaults to a
  /// hash of (comparison, rater) and submitted_at to now.
  EvalStore::RecordOutcome submit(std::string_view session_id, std::string_view comparison_id, Choice choice,
                                  std::optional<std::string> rating_id = std::nullopt,
                                  std::optional<std::string> submitted_at = std::nullopt);

  std::map<std::string, RaterProgress> progress() const;

  std::vector<std::string> review_queue() const { return store_.review_queue(); }
  void apply_exclusion(const ExclusionDecision& decision) { store_.apply_exclusion(decision); }

  EvalStore& store() noexcept { return store_; }

 private:
  std::string rater_for(std::string_view session_id) const;
  std::vector<std::string> serving_order(const std::string& rater_id) const;
  const Bytes& baked_image(const std::string& sample_id);

  EvalStore& store_;
  std::map<std::string, ButtonSample> samples_;
  HighlightStyle highlight_;
  std::uint64_t session_seed_;
  mutable std::mutex mu_;
  mutable std::map<std::string, std::string, std::less<>> sessions_;  // session id -> rater
  std::map<std::string, std::string> in_flight_;              // session id -> comparison id
  std::map<std::string, Bytes> image_cache_;
};

/// JSON-over-HTTP front end for RatingService.
class HttpService {
 public:
  explicit HttpService(RatingService& service, std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Blocks until stop().
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it; serve with listen_after_bind().
  int bind_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

int http_status_for(Errc code) noexcept;

}  // namespace caption
