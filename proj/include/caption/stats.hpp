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

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "caption/evalkit.hpp"

namespace caption::stats {

// Inter-rater agreement -------------------------------------------------------------

struct KappaResult {
  double kappa = 0.0;
  double observed_agreement = 0.0;
  double expected_agreement = 0.0;
  std::size_t n_items = 0;
  std::vector<std::string> categories;
};

/// Cohen's kappa over paired judgments. Throws Error{DegenerateMarginals} when
/// chance agreement is 1 and Error{InvalidArgument} on empty input.
KappaResult cohen_kappa(std::span<const std::pair<std::string, std::string>> pairs);

/// Pools every comparison that has exactly two ratings into one kappa over the
/// four canonical choices.
KappaResult pooled_kappa(std::span<const CanonicalRating> ratings);

// Observations ------------------------------------------------------------------------

struct GroupCount {
  std::int64_t successes = 0;
  std::int64_t trials = 0;

  double proportion() const noexcept { return static_cast<double>(successes) / static_cast<double>(trials); }
  friend bool operator==(const GroupCount&, const GroupCount&) = default;
};

struct ObservationRow {
  Technique technique;
  int preferred;  // 0 or 1
  std::string comparison_id;
  std::string rater_id;
};

struct ObservationTable {
  std::vector<ObservationRow> rows;
  std::map<Technique, GroupCount> counts;

  void add(ObservationRow row);
  std::size_t size() const noexcept { return rows.size(); }
};

/// Two Bernoulli rows per rating: PreferA -> (a:1, b:0), PreferB -> (a:0, b:1),
/// Both -> (1, 1), Neither -> (0, 0).
ObservationTable expand_observations(std::span<const CanonicalRating> ratings);

/// Table with only grouped counts (no per-row provenance); handy for tests and reanalysis.
ObservationTable table_from_counts(const std::map<Technique, GroupCount>& counts);

// Logistic regression -----------------------------------------------------------------

/// IRLS result on grouped binomial data.
struct GroupedFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd fitted;  // per-group probability
  double log_likelihood = 0.0;
  double deviance = 0.0;
  bool converged = false;
  int iterations = 0;
};

inline constexpr int kMaxIrlsIterations = 50;
inline constexpr double kDevianceTolerance = 1e-10;

/// Maximum-likelihood logistic fit of successes/trials on design `x` (one row per
/// group) by iteratively reweighted least squares. Stops when the deviance changes
/// by less than kDevianceTolerance or after kMaxIrlsIterations. A group whose
/// fitted probability runs to 0 or 1 (separation) reports converged = false; the
/// deviance stays finite under the 0 log 0 = 0 convention.
GroupedFit fit_grouped_logistic(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& successes,
                                const Eigen::Ref<const Eigen::VectorXd>& trials);

/// Binomial deviance of fitted probabilities against grouped counts (0 log 0 = 0).
double binomial_deviance(const Eigen::Ref<const Eigen::VectorXd>& successes, const Eigen::Ref<const Eigen::VectorXd>& trials,
                         const Eigen::Ref<const Eigen::VectorXd>& fitted);

struct LogisticFit {
  /// "(intercept)" plus one dummy per non-reference technique, keyed by technique name.
  std::map<std::string, double> coefficients;
  std::map<Technique, double> fitted;
  Technique reference = Technique::CaptionS1;
  double log_likelihood = 0.0;
  double deviance = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Dummy-coded fit of preference on technique. Reference defaults to the
/// lexicographically smallest technique name present. Throws Error{SingleGroup}.
LogisticFit fit_logistic(const ObservationTable& obs, std::optional<Technique> reference_level = std::nullopt);

// Tests -------------------------------------------------------------------------------

struct ChiSqTest {
  double statistic = 0.0;
  int df = 1;
  std::int64_t n = 0;
  double p_value = 1.0;
};

/// Likelihood-ratio test of the technique factor: deviance(intercept-only) - deviance(full).
/// Throws Error{SingleGroup}.
ChiSqTest lrt_anova(const ObservationTable& obs);

struct ZTest {
  std::pair<Technique, Technique> pair;
  double z = 0.0;  // (p_first - p_second) / pooled standard error
  double p_raw = 1.0;
  double p_holm = 1.0;
};

/// Pooled two-proportion z for every unordered technique pair, Holm-adjusted
/// across all pairs. Throws Error{ZeroTrials | SingleGroup}.
std::vector<ZTest> posthoc_pairwise(const ObservationTable& obs);

/// Holm step-down adjustment, results in input order. Throws Error{OutOfRange}.
std::vector<double> holm_adjust(std::span<const double> p);

/// Upper tail of the chi-square distribution (regularized upper incomplete gamma).
double chisq_sf(double x, int df);

/// Standard normal upper tail.
double normal_sf(double z);

// Summaries -----------------------------------------------------------------------------

struct PreferenceSummary {
  Family family = Family::CaptionVsHuman;
  Technique technique_a = Technique::CaptionS3;
  Technique technique_b = Technique::Human;
  std::size_t total = 0;
  /// Indexed by CanonicalChoice: PreferA, PreferB, Both, Neither.
  std::array<std::size_t, 4> counts{};
  /// Percentages rounded to two decimals.
  std::array<double, 4> percentages{};
};

/// Throws Error{EmptyFamily}.
PreferenceSummary preference_summary(std::span<const CanonicalRating> ratings, Family family);

double round2(double value);

}  // namespace caption::stats
