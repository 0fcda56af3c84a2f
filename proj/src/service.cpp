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

#include "caption/service.hpp"

#include <algorithm>
#include <set>

#include "caption/error.hpp"
#include "caption/rng.hpp"
#include "httplib.h"

namespace caption {

json to_json(const ComparisonPayload& p) {
  json options = json::array();
  for (std::string_view o : kChoiceOptions) options.push_back(o);
  return json{{"comparison_id", p.comparison_id},
              {"image", base64_encode(p.image_png)},
              {"image_mime_type", "image/png"},
              {"label_first", p.label_first},
              {"label_second", p.label_second},
              {"options", std::move(options)},
              {"progress", {{"completed", p.completed}, {"total", p.total}}}};
}

RatingService::RatingService(EvalStore& store, std::map<std::string, ButtonSample> samples, HighlightStyle highlight,
                             std::uint64_t session_seed)
    : store_(store), samples_(std::move(samples)), highlight_(highlight), session_seed_(session_seed) {}

std::string RatingService::session_id_for(std::string_view rater_id) {
  return "sess-" + sha256_hex(std::string("session\n") + std::string(rater_id)).substr(0, 16);
}

std::string RatingService::open_session(std::string_view rater_id) {
  if (rater_id.empty()) throw Error(Errc::InvalidArgument, "rater_id is required");
  std::string id = session_id_for(rater_id);
  std::lock_guard lock(mu_);
  sessions_[id] = std::string(rater_id);
  return id;
}

std::string RatingService::rater_for(std::string_view session_id) const {
  {
    std::lock_guard lock(mu_);
    if (auto it = sessions_.find(session_id); it != sessions_.end()) return it->second;
  }
  // After a restart the session map is empty; session ids are derived from rater ids.
  std::set<std::string> raters;
  for (const Assignment& a : store_.assignments()) raters.insert(a.rater_id);
  for (const std::string& r : raters) {
    if (session_id_for(r) == session_id) {
      std::lock_guard lock(mu_);
      sessions_[std::string(session_id)] = r;
      return r;
    }
  }
  throw Error(Errc::UnknownSession, "no session \"" + std::string(session_id) + "\"");
}

std::vector<std::string> RatingService::serving_order(const std::string& rater_id) const {
  std::vector<std::string> ids;
  for (const Assignment& a : store_.assignments_for(rater_id)) ids.push_back(a.comparison_id);
  const std::uint64_t rater_bits = std::stoull(sha256_hex(rater_id).substr(0, 16), nullptr, 16);
  Xoshiro256StarStar rng(session_seed_ ^ rater_bits);
  partial_fisher_yates(ids, ids.size(), rng);
  return ids;
}

Session RatingService::session(std::string_view session_id) const {
  Session s;
  s.session_id = std::string(session_id);
  s.rater_id = rater_for(session_id);
  for (const std::string& cid : serving_order(s.rater_id)) {
    if (store_.effective_rating(cid, s.rater_id)) {
      ++s.completed;
    } else {
      s.pending.push_back(cid);
    }
  }
  return s;
}

const Bytes& RatingService::baked_image(const std::string& sample_id) {
  {
    std::lock_guard lock(mu_);
    if (auto it = image_cache_.find(sample_id); it != image_cache_.end()) return it->second;
  }
  auto it = samples_.find(sample_id);
  if (it == samples_.end()) {
    throw Error(Errc::UnknownSample, "sample \"" + sample_id + "\" is not in any ingested dataset");
  }
  const ButtonSample& sample = it->second;
  Bytes png = encode_png(highlight_element(decode_png(sample.origin.png()), sample.element.bounds, highlight_));
  std::lock_guard lock(mu_);
  return image_cache_.emplace(sample_id, std::move(png)).first->second;
}

std::optional<ComparisonPayload> RatingService::next_comparison(std::string_view session_id) {
  const Session s = session(session_id);
  if (s.pending.empty()) return std::nullopt;
  std::string chosen = s.pending.front();
  {
    std::lock_guard lock(mu_);
    auto it = in_flight_.find(s.session_id);
    if (it != in_flight_.end() && std::find(s.pending.begin(), s.pending.end(), it->second) != s.pending.end()) {
      chosen = it->second;
    }
    in_flight_[s.session_id] = chosen;
  }
  const auto comparison = store_.comparison(chosen);
  const auto assignment = store_.assignment(chosen, s.rater_id);
  if (!comparison || !assignment) {
    throw Error(Errc::UnknownComparison, "comparison " + chosen + " vanished from the store");
  }
  ComparisonPayload p;
  p.comparison_id = chosen;
  p.image_png = baked_image(comparison->sample_id);
  const bool swapped = assignment->presentation_swapped;
  p.label_first = swapped ? comparison->candidate_b.text : comparison->candidate_a.text;
  p.label_second = swapped ? comparison->candidate_a.text : comparison->candidate_b.text;
  p.completed = s.completed;
  p.total = s.completed + s.pending.size();
  return p;
}

EvalStore::RecordOutcome RatingService::submit(std::string_view session_id, std::string_view comparison_id,
                                               Choice choice, std::optional<std::string> rating_id,
                                               std::optional<std::string> submitted_at) {
  const std::string rater = rater_for(session_id);
  Rating r;
  r.comparison_id = std::string(comparison_id);
  r.rater_id = rater;
  r.choice = choice;
  r.rating_id = rating_id.value_or(
      "r-" + sha256_hex(std::string(comparison_id) + "\n" + rater).substr(0, 16));
  r.submitted_at = submitted_at.value_or(utc_now_iso8601());
  const auto outcome = store_.record_rating(r);
  std::lock_guard lock(mu_);
  if (auto it = in_flight_.find(std::string(session_id)); it != in_flight_.end() && it->second == comparison_id) {
    in_flight_.erase(it);
  }
  return outcome;
}

std::map<std::string, RaterProgress> RatingService::progress() const {
  std::map<std::string, RaterProgress> out;
  for (const Assignment& a : store_.assignments()) {
    RaterProgress& p = out[a.rater_id];
    ++p.assigned;
    if (store_.effective_rating(a.comparison_id, a.rater_id)) ++p.completed;
  }
  return out;
}

// HTTP -------------------------------------------------------------------------------------------

int http_status_for(Errc code) noexcept {
  switch (code) {
    case Errc::UnknownSession:
    case Errc::UnknownComparison:
    case Errc::UnknownSample:
      return 404;
    case Errc::RaterMismatch:
      return 403;
    case Errc::DuplicateConflict:
    case Errc::AlreadyDecided:
      return 409;
    case Errc::InvalidArgument:
    case Errc::SchemaViolation:
      return 400;
    default:
      return 500;
  }
}

struct HttpService::Impl {
  RatingService& service;
  httplib::Server server;
};

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, Errc code, const std::string& message) {
  send_json(res, http_status_for(code), json{{"error", std::string(to_string(code))}, {"message", message}});
}

json parse_body(const httplib::Request& req) {
  try {
    json body = json::parse(req.body);
    if (!body.is_object()) throw Error(Errc::InvalidArgument, "request body must be a JSON object");
    return body;
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed JSON body: ") + e.what());
  }
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e.code(), e.detail());
    } catch (const json::exception& e) {
      send_error(res, Errc::InvalidArgument, e.what());
    } catch (const std::exception& e) {
      send_json(res, 500, json{{"error", "Internal"}, {"message", e.what()}});
    }
  };
}

std::string string_field(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) {
    throw Error(Errc::InvalidArgument, std::string("\"") + key + "\" must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

HttpService::HttpService(RatingService& service, std::optional<std::filesystem::path> static_dir)
    : impl_(new Impl{service, {}}) {
  auto& srv = impl_->server;
  RatingService& svc = impl_->service;

  srv.Post("/api/session", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    send_json(res, 200, json{{"session_id", svc.open_session(string_field(body, "rater_id"))}});
  }));

  srv.Get(R"(/api/session/([^/]+)/next)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    auto payload = svc.next_comparison(req.matches[1].str());
    send_json(res, 200, payload ? to_json(*payload) : json{{"done", true}});
  }));

  srv.Post(R"(/api/session/([^/]+)/rating)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    const auto outcome =
        svc.submit(req.matches[1].str(), string_field(body, "comparison_id"), parse_choice(string_field(body, "choice")));
    send_json(res, 200,
              json{{"accepted", true}, {"duplicate", outcome == EvalStore::RecordOutcome::AlreadyRecorded}});
  }));

  srv.Get("/api/progress", guarded([&svc](const httplib::Request&, httplib::Response& res) {
    json raters = json::object();
    for (const auto& [rater, p] : svc.progress()) {
      raters[rater] = {{"assigned", p.assigned}, {"completed", p.completed}};
    }
    send_json(res, 200, json{{"raters", std::move(raters)}});
  }));

  srv.Get("/api/review/queue", guarded([&svc](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, json{{"queue", svc.review_queue()}});
  }));

  srv.Post(R"(/api/review/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    ExclusionDecision d;
    d.sample_id = httplib::detail::decode_url(req.matches[1].str(), false);
    auto excluded = body.find("excluded");
    if (excluded == body.end() || !excluded->is_boolean()) {
      throw Error(Errc::InvalidArgument, "\"excluded\" must be a boolean");
    }
    d.excluded = excluded->get<bool>();
    d.reason = parse_exclusion_reason(body.value("reason", std::string("other")));
    d.note = body.value("note", std::string());
    svc.apply_exclusion(d);
    send_json(res, 200, json{{"accepted", true}});
  }));

  if (static_dir) srv.set_mount_point("/", static_dir->string());
}

HttpService::~HttpService() { stop(); }

bool HttpService::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int HttpService::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpService::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void HttpService::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace caption
