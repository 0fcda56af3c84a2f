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

#include "caption/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "caption/error.hpp"

namespace caption::stats {

// Kappa ------------------------------------------------------------------------------------

KappaResult cohen_kappa(std::span<const std::pair<std::string, std::string>> pairs) {
  if (pairs.empty()) {
    throw Error(Errc::InvalidArgument, "kappa needs at least one pair");
  }
  std::map<std::string, std::int64_t> first;
  std::map<std::string, std::int64_t> second;
  std::set<std::string> categories;
  std::int64_t agree = 0;
  for (const auto& [a, b] : pairs) {
    ++first[a];
    ++second[b];
    categories.insert(a);
    categories.insert(b);
    if (a == b) ++agree;
  }
  const auto n = static_cast<std::int64_t>(pairs.size());
  // Everything scaled by n^2 so the degenerate case is detected exactly.
  std::int64_t chance = 0;
  for (const std::string& c : categories) {
    auto f = first.find(c);
    auto s = second.find(c);
    if (f != first.end() && s != second.end()) chance += f->second * s->second;
  }
  if (chance == n * n) {
    throw Error(Errc::DegenerateMarginals, "both raters used a single category; kappa is undefined");
  }
  KappaResult r;
  r.n_items = pairs.size();
  r.categories.assign(categories.begin(), categories.end());
  r.observed_agreement = static_cast<double>(agree) / static_cast<double>(n);
  r.expected_agreement = static_cast<double>(chance) / static_cast<double>(n * n);
  r.kappa = static_cast<double>(n * agree - chance) / static_cast<double>(n * n - chance);
  return r;
}

KappaResult pooled_kappa(std::span<const CanonicalRating> ratings) {
  std::map<std::string, std::vector<const CanonicalRating*>> by_comparison;
  for (const CanonicalRating& r : ratings) by_comparison[r.comparison_id].push_back(&r);
  std::vector<std::pair<std::string, std::string>> pairs;
  for (auto& [id, list] : by_comparison) {
    if (list.size() != 2) continue;
    std::sort(list.begin(), list.end(), [](auto* x, auto* y) { return x->rater_id < y->rater_id; });
    pairs.emplace_back(to_string(list[0]->choice), to_string(list[1]->choice));
  }
  return cohen_kappa(pairs);
}

// Observations ----------------------------------------------------------------------------------

void ObservationTable::add(ObservationRow row) {
  GroupCount& g = counts[row.technique];
  g.successes += row.preferred;
  g.trials += 1;
  rows.push_back(std::move(row));
}

ObservationTable expand_observations(std::span<const CanonicalRating> ratings) {
  ObservationTable table;
  for (const CanonicalRating& r : ratings) {
    int a = 0;
    int b = 0;
    switch (r.choice) {
      case CanonicalChoice::PreferA: a = 1; break;
      case CanonicalChoice::PreferB: b = 1; break;
      case CanonicalChoice::Both: a = b = 1; break;
      case CanonicalChoice::Neither: break;
    }
    table.add(ObservationRow{r.technique_a, a, r.comparison_id, r.rater_id});
    table.add(ObservationRow{r.technique_b, b, r.comparison_id, r.rater_id});
  }
  return table;
}

ObservationTable table_from_counts(const std::map<Technique, GroupCount>& counts) {
  ObservationTable table;
  table.counts = counts;
  return table;
}

// IRLS ------------------------------------------------------------------------------------------

namespace {

constexpr double kEtaLimit = 30.0;
constexpr double kSeparationEps = 1e-8;

// log(mu) and log(1 - mu) from the linear predictor, stable in both tails.
double log_mu(double eta) { return -std::log1p(std::exp(-eta)); }
double log_one_minus_mu(double eta) { return -std::log1p(std::exp(eta)); }

double xlogy_ratio(double y, double num, double log_den) {
  // y * ln(num) - y * log_den with 0 * anything = 0
  return y == 0.0 ? 0.0 : y * (std::log(num) - log_den);
}

struct Groups {
  std::vector<Technique> order;  // reference first
  Eigen::VectorXd successes;
  Eigen::VectorXd trials;
};

Groups collect_groups(const ObservationTable& obs, std::optional<Technique> reference) {
  std::vector<Technique> present;
  for (const auto& [t, g] : obs.counts) {
    if (g.trials > 0) present.push_back(t);
  }
  if (present.size() < 2) {
    throw Error(Errc::SingleGroup, "need at least two techniques with observations");
  }
  Technique ref = reference.value_or(*std::min_element(
      present.begin(), present.end(), [](Technique a, Technique b) { return to_string(a) < to_string(b); }));
  if (std::find(present.begin(), present.end(), ref) == present.end()) {
    throw Error(Errc::InvalidArgument, "reference technique " + to_string(ref) + " has no observations");
  }
  Groups g;
  g.order.push_back(ref);
  for (Technique t : present) {
    if (t != ref) g.order.push_back(t);
  }
  const auto k = static_cast<Eigen::Index>(g.order.size());
  g.successes.resize(k);
  g.trials.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const GroupCount& c = obs.counts.at(g.order[static_cast<std::size_t>(i)]);
    g.successes[i] = static_cast<double>(c.successes);
    g.trials[i] = static_cast<double>(c.trials);
  }
  return g;
}

Eigen::MatrixXd dummy_design(Eigen::Index groups) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(groups, groups);
  x.col(0).setOnes();
  for (Eigen::Index g = 1; g < groups; ++g) x(g, g) = 1.0;
  return x;
}

}  // namespace

double binomial_deviance(const Eigen::Ref<const Eigen::VectorXd>& successes, const Eigen::Ref<const Eigen::VectorXd>& trials,
                         const Eigen::Ref<const Eigen::VectorXd>& fitted) {
  double dev = 0.0;
  for (Eigen::Index g = 0; g < successes.size(); ++g) {
    const double y = successes[g];
    const double n = trials[g];
    const double mu = fitted[g];
    dev += xlogy_ratio(y, y, std::log(n) + std::log(mu));
    dev += xlogy_ratio(n - y, n - y, std::log(n) + std::log1p(-mu));
  }
  return 2.0 * dev;
}

GroupedFit fit_grouped_logistic(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& successes,
                                const Eigen::Ref<const Eigen::VectorXd>& trials) {
  const Eigen::Index groups = x.rows();
  if (successes.size() != groups || trials.size() != groups) {
    throw Error(Errc::InvalidArgument, "design and count sizes differ");
  }
  if ((trials.array() <= 0).any() || (successes.array() < 0).any() || (successes.array() > trials.array()).any()) {
    throw Error(Errc::InvalidArgument, "counts must satisfy 0 <= successes <= trials, trials > 0");
  }

  Eigen::VectorXd mu = (successes.array() + 0.5) / (trials.array() + 1.0);
  Eigen::VectorXd eta = (mu.array() / (1.0 - mu.array())).log();
  double previous = binomial_deviance(successes, trials, mu);

  GroupedFit fit;
  fit.coefficients = Eigen::VectorXd::Zero(x.cols());
  bool settled = false;
  for (int it = 1; it <= kMaxIrlsIterations; ++it) {
    const Eigen::ArrayXd w = trials.array() * mu.array() * (1.0 - mu.array());
    const Eigen::VectorXd z = eta.array() + (successes.array() - trials.array() * mu.array()) / w;
    const Eigen::ArrayXd sw = w.sqrt();
    const Eigen::MatrixXd weighted = sw.matrix().asDiagonal() * x;
    fit.coefficients = weighted.colPivHouseholderQr().solve((sw * z.array()).matrix());
    eta = (x * fit.coefficients).array().max(-kEtaLimit).min(kEtaLimit);
    mu = 1.0 / (1.0 + (-eta.array()).exp());
    const double current = binomial_deviance(successes, trials, mu);
    fit.iterations = it;
    if (std::abs(current - previous) < kDevianceTolerance) {
      previous = current;
      settled = true;
      break;
    }
    previous = current;
  }

  bool separated = false;
  double loglik = 0.0;
  for (Eigen::Index g = 0; g < groups; ++g) {
    const double y = successes[g];
    const double n = trials[g];
    if ((y == 0.0 && mu[g] < kSeparationEps) || (y == n && mu[g] > 1.0 - kSeparationEps)) separated = true;
    if (y > 0) loglik += y * log_mu(eta[g]);
    if (n - y > 0) loglik += (n - y) * log_one_minus_mu(eta[g]);
  }
  fit.fitted = mu;
  fit.deviance = previous;
  fit.log_likelihood = loglik;
  fit.converged = settled && !separated;
  return fit;
}

LogisticFit fit_logistic(const ObservationTable& obs, std::optional<Technique> reference_level) {
  const Groups g = collect_groups(obs, reference_level);
  const auto k = static_cast<Eigen::Index>(g.order.size());
  const GroupedFit raw = fit_grouped_logistic(dummy_design(k), g.successes, g.trials);
  LogisticFit fit;
  fit.reference = g.order.front();
  fit.coefficients["(intercept)"] = raw.coefficients[0];
  for (Eigen::Index i = 0; i < k; ++i) {
    const Technique t = g.order[static_cast<std::size_t>(i)];
    if (i > 0) fit.coefficients[to_string(t)] = raw.coefficients[i];
    fit.fitted[t] = raw.fitted[i];
  }
  fit.log_likelihood = raw.log_likelihood;
  fit.deviance = raw.deviance;
  fit.converged = raw.converged;
  fit.iterations = raw.iterations;
  return fit;
}

ChiSqTest lrt_anova(const ObservationTable& obs) {
  const Groups g = collect_groups(obs, std::nullopt);
  const auto k = static_cast<Eigen::Index>(g.order.size());
  const GroupedFit full = fit_grouped_logistic(dummy_design(k), g.successes, g.trials);
  const GroupedFit null = fit_grouped_logistic(Eigen::MatrixXd::Ones(k, 1), g.successes, g.trials);
  ChiSqTest test;
  test.statistic = std::max(0.0, null.deviance - full.deviance);
  test.df = static_cast<int>(k - 1);
  test.n = static_cast<std::int64_t>(g.trials.sum());
  test.p_value = chisq_sf(test.statistic, test.df);
  return test;
}

std::vector<ZTest> posthoc_pairwise(const ObservationTable& obs) {
  std::vector<Technique> techniques;
  for (const auto& [t, c] : obs.counts) {
    if (c.trials <= 0) throw Error(Errc::ZeroTrials, "technique " + to_string(t) + " has no trials");
    techniques.push_back(t);
  }
  if (techniques.size() < 2) {
    throw Error(Errc::SingleGroup, "need at least two techniques with observations");
  }
  std::vector<ZTest> tests;
  for (std::size_t i = 0; i < techniques.size(); ++i) {
    for (std::size_t j = i + 1; j < techniques.size(); ++j) {
      const GroupCount& a = obs.counts.at(techniques[i]);
      const GroupCount& b = obs.counts.at(techniques[j]);
      const double pooled =
          static_cast<double>(a.successes + b.successes) / static_cast<double>(a.trials + b.trials);
      const double se = std::sqrt(pooled * (1.0 - pooled) *
                                  (1.0 / static_cast<double>(a.trials) + 1.0 / static_cast<double>(b.trials)));
      ZTest t;
      t.pair = {techniques[i], techniques[j]};
      t.z = se > 0.0 ? (a.proportion() - b.proportion()) / se : 0.0;
      t.p_raw = std::min(1.0, 2.0 * normal_sf(std::abs(t.z)));
      tests.push_back(t);
    }
  }
  std::vector<double> raw;
  for (const ZTest& t : tests) raw.push_back(t.p_raw);
  const std::vector<double> adjusted = holm_adjust(raw);
  for (std::size_t i = 0; i < tests.size(); ++i) tests[i].p_holm = adjusted[i];
  return tests;
}

std::vector<double> holm_adjust(std::span<const double> p) {
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(Errc::OutOfRange, "p-values must lie in [0, 1]");
  }
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> out(m);
  double running = 0.0;
  for (std::size_t rank = 0; rank < m; ++rank) {
    const double scaled = std::min(1.0, static_cast<double>(m - rank) * p[order[rank]]);
    running = std::max(running, scaled);
    out[order[rank]] = running;
  }
  return out;
}

// Tail probabilities -----------------------------------------------------------------------

namespace {

// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x) {
  constexpr double kEps = 1e-16;
  constexpr int kMaxTerms = 100000;
  if (x <= 0.0) return 1.0;
  const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < kMaxTerms; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return std::max(0.0, 1.0 - sum * std::exp(log_prefactor));
  }
  // Continued fraction, modified Lentz.
  constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_prefactor) * h;
}

}  // namespace

double chisq_sf(double x, int df) {
  if (df < 1) throw Error(Errc::InvalidArgument, "chi-square df must be positive");
  if (std::isnan(x) || x < 0.0) throw Error(Errc::OutOfRange, "chi-square statistic must be >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return gamma_q(0.5 * df, 0.5 * x);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Summaries ------------------------------------------------------------------------------------

double round2(double value) { return std::round(value * 100.0) / 100.0; }

PreferenceSummary preference_summary(std::span<const CanonicalRating> ratings, Family family) {
  if (ratings.empty()) {
    throw Error(Errc::EmptyFamily, "no ratings for family " + to_string(family));
  }
  PreferenceSummary s;
  s.family = family;
  s.technique_a = ratings.front().technique_a;
  s.technique_b = ratings.front().technique_b;
  s.total = ratings.size();
  for (const CanonicalRating& r : ratings) ++s.counts[static_cast<std::size_t>(r.choice)];
  for (std::size_t i = 0; i < 4; ++i) {
    s.percentages[i] = round2(100.0 * static_cast<double>(s.counts[i]) / static_cast<double>(s.total));
  }
  return s;
}

}  // namespace caption::stats
