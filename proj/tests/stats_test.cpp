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

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "test_util.hpp"

namespace caption::stats {
namespace {

using Pairs = std::vector<std::pair<std::string, std::string>>;

Pairs repeat(Pairs out, const std::string& a, const std::string& b, int n) {
  for (int i = 0; i < n; ++i) out.emplace_back(a, b);
  return out;
}

// Independent closed form for the likelihood-ratio statistic on grouped binomial data.
double closed_form_lrt(const std::map<Technique, GroupCount>& counts) {
  double y = 0, n = 0;
  for (const auto& [t, c] : counts) {
    y += static_cast<double>(c.successes);
    n += static_cast<double>(c.trials);
  }
  const double pbar = y / n;
  const auto term = [](double k, double p, double q) { return k == 0 ? 0.0 : k * std::log(p / q); };
  double s = 0;
  for (const auto& [t, c] : counts) {
    const double yg = static_cast<double>(c.successes), ng = static_cast<double>(c.trials);
    const double pg = yg / ng;
    s += term(yg, pg, pbar) + term(ng - yg, 1 - pg, 1 - pbar);
  }
  return 2 * s;
}

CanonicalRating rating(CanonicalChoice choice, Technique a = Technique::CaptionS3, Technique b = Technique::Human,
                       std::string cid = "c", std::string rater = "r") {
  return CanonicalRating{std::move(cid), "s", std::move(rater), a, b, choice};
}

// Kappa ---------------------------------------------------------------------------------

TEST(Kappa, PerfectAgreement) {
  const Pairs p = repeat(repeat({}, "A", "A", 5), "B", "B", 5);
  const KappaResult k = cohen_kappa(p);
  EXPECT_DOUBLE_EQ(k.kappa, 1.0);
  EXPECT_DOUBLE_EQ(k.expected_agreement, 0.5);
  EXPECT_EQ(k.n_items, 10u);
}

TEST(Kappa, PerfectDisagreement) {
  const Pairs p = repeat(repeat({}, "A", "B", 5), "B", "A", 5);
  const KappaResult k = cohen_kappa(p);
  EXPECT_DOUBLE_EQ(k.observed_agreement, 0.0);
  EXPECT_NEAR(k.kappa, -1.0, 1e-12);
}

TEST(Kappa, HandComputedPointFour) {
  Pairs p = repeat({}, "A", "A", 4);
  p = repeat(p, "B", "B", 3);
  p = repeat(p, "A", "B", 2);
  p = repeat(p, "B", "A", 1);
  const KappaResult k = cohen_kappa(p);
  EXPECT_NEAR(k.observed_agreement, 0.7, 1e-12);
  EXPECT_NEAR(k.expected_agreement, 0.5, 1e-12);
  EXPECT_NEAR(k.kappa, 0.4, 1e-12);
}

TEST(Kappa, DegenerateAndEmpty) {
  const Pairs p = repeat({}, "A", "A", 3);
  EXPECT_CAPTION_ERROR(cohen_kappa(p), Errc::DegenerateMarginals);
  EXPECT_CAPTION_ERROR(cohen_kappa(Pairs{}), Errc::InvalidArgument);
}

TEST(Kappa, BoundedAndRelabelInvariant) {
  std::mt19937_64 gen(3);
  const std::vector<std::string> alphabet{"w", "x", "y", "z"};
  for (int trial = 0; trial < 200; ++trial) {
    Pairs p;
    const int n = 2 + static_cast<int>(gen() % 40);
    for (int i = 0; i < n; ++i) p.emplace_back(alphabet[gen() % 4], alphabet[gen() % 4]);
    std::vector<std::string> perm = alphabet;
    std::shuffle(perm.begin(), perm.end(), gen);
    Pairs relabeled;
    const auto map = [&](const std::string& s) { return perm[static_cast<std::size_t>(s[0] - 'w')]; };
    for (const auto& [a, b] : p) relabeled.emplace_back(map(a), map(b));
    try {
      const double k = cohen_kappa(p).kappa;
      EXPECT_GE(k, -1.0 - 1e-12);
      EXPECT_LE(k, 1.0 + 1e-12);
      EXPECT_NEAR(cohen_kappa(relabeled).kappa, k, 1e-12);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::DegenerateMarginals);
    }
  }
}

TEST(Kappa, PooledOverComparisonsWithTwoRatings) {
  std::vector<CanonicalRating> r{
      rating(CanonicalChoice::PreferA, Technique::CaptionS3, Technique::Human, "c1", "x"),
      rating(CanonicalChoice::PreferA, Technique::CaptionS3, Technique::Human, "c1", "y"),
      rating(CanonicalChoice::Both, Technique::CaptionS3, Technique::Human, "c2", "x"),
      rating(CanonicalChoice::PreferB, Technique::CaptionS3, Technique::Human, "c2", "y"),
      rating(CanonicalChoice::Neither, Technique::CaptionS3, Technique::Human, "c3", "x"),
  };
  const KappaResult k = pooled_kappa(r);
  EXPECT_EQ(k.n_items, 2u);
  EXPECT_NEAR(k.observed_agreement, 0.5, 1e-12);
}

// Observations --------------------------------------------------------------------------

TEST(Observations, EncodingDefinition) {
  const std::vector<CanonicalRating> r{rating(CanonicalChoice::Both), rating(CanonicalChoice::Neither),
                                       rating(CanonicalChoice::PreferA), rating(CanonicalChoice::PreferB)};
  const ObservationTable t = expand_observations(r);
  ASSERT_EQ(t.size(), 8u);
  EXPECT_EQ(t.rows[0].preferred + t.rows[1].preferred, 2);
  EXPECT_EQ(t.rows[2].preferred + t.rows[3].preferred, 0);
  EXPECT_EQ(t.rows[4].technique, Technique::CaptionS3);
  EXPECT_EQ(t.rows[4].preferred, 1);
  EXPECT_EQ(t.rows[5].preferred, 0);
  EXPECT_EQ(t.rows[6].preferred, 0);
  EXPECT_EQ(t.rows[7].preferred, 1);
  EXPECT_EQ(t.counts.at(Technique::CaptionS3), (GroupCount{2, 4}));
  EXPECT_EQ(t.counts.at(Technique::Human), (GroupCount{2, 4}));
}

TEST(Observations, PromptStudyRowCount) {
  // 63 retained samples, three strategy pairs each, two raters per pair.
  std::vector<CanonicalRating> r;
  const std::pair<Technique, Technique> pairs[] = {{Technique::CaptionS1, Technique::CaptionS2},
                                                   {Technique::CaptionS1, Technique::CaptionS3},
                                                   {Technique::CaptionS2, Technique::CaptionS3}};
  for (int s = 0; s < 63; ++s) {
    for (const auto& [a, b] : pairs) {
      for (int rater = 0; rater < 2; ++rater) r.push_back(rating(CanonicalChoice::Both, a, b));
    }
  }
  EXPECT_EQ(r.size(), 378u);
  EXPECT_EQ(expand_observations(r).size(), 756u);
}

// Logistic ------------------------------------------------------------------------------

std::map<Technique, GroupCount> two_groups() {
  return {{Technique::CaptionS1, {30, 100}}, {Technique::CaptionS2, {50, 100}}};
}

TEST(Logistic, ClosedFormCoefficients) {
  const LogisticFit fit = fit_logistic(table_from_counts(two_groups()));
  EXPECT_TRUE(fit.converged);
  EXPECT_EQ(fit.reference, Technique::CaptionS1);
  EXPECT_NEAR(fit.coefficients.at("(intercept)"), std::log(3.0 / 7.0), 1e-9);
  EXPECT_NEAR(fit.coefficients.at("caption_s2"), -std::log(3.0 / 7.0), 1e-9);
  EXPECT_NEAR(fit.fitted.at(Technique::CaptionS1), 0.3, 1e-12);
  EXPECT_NEAR(fit.fitted.at(Technique::CaptionS2), 0.5, 1e-12);
}

TEST(Logistic, ReferenceIsSmallestName) {
  const std::map<Technique, GroupCount> counts{{Technique::CaptionS3, {10, 30}}, {Technique::Baseline, {20, 30}}};
  EXPECT_EQ(fit_logistic(table_from_counts(counts)).reference, Technique::Baseline);
}

TEST(Logistic, FittedEqualsObservedForRandomTables) {
  std::mt19937_64 gen(17);
  const Technique all[] = {Technique::CaptionS1, Technique::CaptionS2, Technique::CaptionS3, Technique::Baseline,
                           Technique::Human};
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + gen() % 4;
    std::map<Technique, GroupCount> counts;
    for (std::size_t g = 0; g < k; ++g) {
      const std::int64_t n = 1 + static_cast<std::int64_t>(gen() % 400);
      counts[all[g]] = GroupCount{static_cast<std::int64_t>(gen() % static_cast<std::uint64_t>(n + 1)), n};
    }
    for (Technique ref : {all[0], all[k - 1]}) {
      const LogisticFit fit = fit_logistic(table_from_counts(counts), ref);
      for (const auto& [t, c] : counts) {
        const double tol = fit.converged ? 1e-8 : 1e-6;
        EXPECT_NEAR(fit.fitted.at(t), c.proportion(), tol) << "trial " << trial;
      }
      EXPECT_TRUE(std::isfinite(fit.deviance));
    }
  }
}

TEST(Logistic, SeparationReportsNotConverged) {
  const std::map<Technique, GroupCount> counts{{Technique::CaptionS1, {0, 50}}, {Technique::CaptionS2, {25, 50}}};
  const LogisticFit fit = fit_logistic(table_from_counts(counts));
  EXPECT_FALSE(fit.converged);
  EXPECT_TRUE(std::isfinite(fit.deviance));
  EXPECT_LE(fit.iterations, kMaxIrlsIterations);
}

TEST(Logistic, SingleGroup) {
  const std::map<Technique, GroupCount> counts{{Technique::CaptionS1, {3, 9}}};
  EXPECT_CAPTION_ERROR(fit_logistic(table_from_counts(counts)), Errc::SingleGroup);
  EXPECT_CAPTION_ERROR(lrt_anova(table_from_counts(counts)), Errc::SingleGroup);
}

TEST(Logistic, GroupedIrlsMatchesDirectDesign) {
  Eigen::MatrixXd x(3, 2);
  x << 1, 0, 1, 1, 1, 2;
  Eigen::VectorXd y(3), n(3);
  y << 5, 12, 21;
  n << 30, 30, 30;
  const GroupedFit fit = fit_grouped_logistic(x, y, n);
  ASSERT_TRUE(fit.converged);
  // Score equations at the optimum: X^T (y - n p) = 0.
  const Eigen::VectorXd score = x.transpose() * (y - n.cwiseProduct(fit.fitted));
  EXPECT_LT(score.cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_NEAR(fit.deviance, binomial_deviance(y, n, fit.fitted), 1e-12);
}

// LRT -----------------------------------------------------------------------------------

TEST(Lrt, EqualProportionsGiveZero) {
  const std::map<Technique, GroupCount> counts{{Technique::CaptionS1, {20, 40}}, {Technique::CaptionS2, {10, 20}},
                                               {Technique::CaptionS3, {30, 60}}};
  const ChiSqTest t = lrt_anova(table_from_counts(counts));
  EXPECT_NEAR(t.statistic, 0.0, 1e-10);
  EXPECT_NEAR(t.p_value, 1.0, 1e-10);
  EXPECT_EQ(t.df, 2);
  EXPECT_EQ(t.n, 120);
}

TEST(Lrt, TwoGroupClosedForm) {
  const ChiSqTest t = lrt_anova(table_from_counts(two_groups()));
  EXPECT_NEAR(t.statistic, 8.4024, 5e-5);
  EXPECT_NEAR(t.statistic, closed_form_lrt(two_groups()), 1e-8);
  EXPECT_EQ(t.df, 1);
  EXPECT_NEAR(t.p_value, 0.0037, 5e-5);
  EXPECT_NEAR(t.p_value, chisq_sf(t.statistic, 1), 1e-15);
}

TEST(Lrt, MatchesClosedFormOnRandomTables) {
  std::mt19937_64 gen(99);
  const Technique all[] = {Technique::CaptionS1, Technique::CaptionS2, Technique::CaptionS3, Technique::Baseline,
                           Technique::Human};
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + gen() % 4;
    std::map<Technique, GroupCount> counts;
    for (std::size_t g = 0; g < k; ++g) {
      const std::int64_t n = 5 + static_cast<std::int64_t>(gen() % 300);
      counts[all[g]] = GroupCount{1 + static_cast<std::int64_t>(gen() % static_cast<std::uint64_t>(n - 1)), n};
    }
    const ChiSqTest t = lrt_anova(table_from_counts(counts));
    EXPECT_NEAR(t.statistic, closed_form_lrt(counts), 1e-8);
    EXPECT_EQ(t.df, static_cast<int>(k) - 1);
  }
}

TEST(Lrt, TechniqueRelabelingInvariance) {
  const std::map<Technique, GroupCount> a{{Technique::CaptionS3, {120, 300}}, {Technique::Human, {90, 300}},
                                          {Technique::Baseline, {150, 300}}};
  const std::map<Technique, GroupCount> b{{Technique::CaptionS1, {120, 300}}, {Technique::CaptionS2, {90, 300}},
                                          {Technique::CaptionS3, {150, 300}}};
  const ChiSqTest ta = lrt_anova(table_from_counts(a)), tb = lrt_anova(table_from_counts(b));
  EXPECT_NEAR(ta.statistic, tb.statistic, 1e-10);
  EXPECT_NEAR(ta.p_value, tb.p_value, 1e-12);
  std::vector<double> za, zb;
  for (const ZTest& z : posthoc_pairwise(table_from_counts(a))) za.push_back(std::abs(z.z));
  for (const ZTest& z : posthoc_pairwise(table_from_counts(b))) zb.push_back(std::abs(z.z));
  std::sort(za.begin(), za.end());
  std::sort(zb.begin(), zb.end());
  ASSERT_EQ(za.size(), zb.size());
  for (std::size_t i = 0; i < za.size(); ++i) EXPECT_NEAR(za[i], zb[i], 1e-12);
}

// Post hoc ------------------------------------------------------------------------------

TEST(Posthoc, IdenticalProportions) {
  const std::map<Technique, GroupCount> counts{{Technique::CaptionS1, {10, 40}}, {Technique::CaptionS2, {10, 40}}};
  const auto z = posthoc_pairwise(table_from_counts(counts));
  ASSERT_EQ(z.size(), 1u);
  EXPECT_NEAR(z[0].z, 0.0, 1e-12);
  EXPECT_NEAR(z[0].p_raw, 1.0, 1e-12);
}

TEST(Posthoc, HandComputedZ) {
  const auto z = posthoc_pairwise(table_from_counts(two_groups()));
  ASSERT_EQ(z.size(), 1u);
  EXPECT_NEAR(std::abs(z[0].z), 0.2 / std::sqrt(0.24 * 0.02), 1e-12);
  EXPECT_NEAR(std::abs(z[0].z), 2.8868, 5e-5);
  EXPECT_EQ(z[0].pair, std::make_pair(Technique::CaptionS1, Technique::CaptionS2));
}

TEST(Posthoc, HolmAcrossAllPairs) {
  const std::map<Technique, GroupCount> counts{{Technique::CaptionS3, {150, 300}}, {Technique::Human, {110, 300}},
                                               {Technique::Baseline, {100, 300}}};
  const auto z = posthoc_pairwise(table_from_counts(counts));
  ASSERT_EQ(z.size(), 3u);
  std::vector<double> raw;
  for (const ZTest& t : z) {
    raw.push_back(t.p_raw);
    EXPECT_NEAR(t.p_raw, 2 * normal_sf(std::abs(t.z)), 1e-15);
    EXPECT_GE(t.p_holm, t.p_raw);
  }
  const auto adjusted = holm_adjust(raw);
  for (std::size_t i = 0; i < z.size(); ++i) EXPECT_DOUBLE_EQ(z[i].p_holm, adjusted[i]);
}

TEST(Posthoc, ZeroTrials) {
  const std::map<Technique, GroupCount> counts{{Technique::CaptionS1, {0, 0}}, {Technique::CaptionS2, {1, 4}}};
  EXPECT_CAPTION_ERROR(posthoc_pairwise(table_from_counts(counts)), Errc::ZeroTrials);
}

TEST(Posthoc, ReportedZRoundsToThreePlaces) {
  EXPECT_NEAR(2 * normal_sf(2.23), 0.0257, 5e-5);
  EXPECT_NEAR(std::round(2 * normal_sf(2.23) * 1000) / 1000, 0.026, 1e-12);
}

// Holm ----------------------------------------------------------------------------------

TEST(Holm, Examples) {
  EXPECT_EQ(holm_adjust(std::vector<double>{0.05}), std::vector<double>{0.05});
  const auto a = holm_adjust(std::vector<double>{0.01, 0.04, 0.03});
  EXPECT_NEAR(a[0], 0.03, 1e-15);
  EXPECT_NEAR(a[1], 0.06, 1e-15);
  EXPECT_NEAR(a[2], 0.06, 1e-15);
  const auto b = holm_adjust(std::vector<double>{0.2, 0.01});
  EXPECT_NEAR(b[0], 0.2, 1e-15);
  EXPECT_NEAR(b[1], 0.02, 1e-15);
  EXPECT_TRUE(holm_adjust(std::vector<double>{}).empty());
}

TEST(Holm, OutOfRange) {
  EXPECT_CAPTION_ERROR(holm_adjust(std::vector<double>{0.5, 1.5}), Errc::OutOfRange);
  EXPECT_CAPTION_ERROR(holm_adjust(std::vector<double>{-0.1}), Errc::OutOfRange);
  EXPECT_CAPTION_ERROR(holm_adjust(std::vector<double>{std::nan("")}), Errc::OutOfRange);
}

TEST(Holm, PermutationInvariantAndDominatesRaw) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p(1 + gen() % 8);
    for (double& v : p) v = u(gen) * u(gen);
    const auto adj = holm_adjust(p);
    std::vector<std::size_t> perm(p.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<double> shuffled;
    for (std::size_t i : perm) shuffled.push_back(p[i]);
    const auto adj_shuffled = holm_adjust(shuffled);
    for (std::size_t i = 0; i < perm.size(); ++i) {
      EXPECT_DOUBLE_EQ(adj_shuffled[i], adj[perm[i]]);
      EXPECT_GE(adj[i], p[i]);
      EXPECT_LE(adj[i], 1.0);
    }
    // Monotone in sorted order of the raw values.
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return p[x] < p[y]; });
    for (std::size_t i = 1; i < order.size(); ++i) EXPECT_GE(adj[order[i]], adj[order[i - 1]]);
  }
}

// Tail probabilities --------------------------------------------------------------------

TEST(ChiSq, ZeroIsOne) {
  for (int k = 1; k <= 10; ++k) EXPECT_EQ(chisq_sf(0.0, k), 1.0);
}

TEST(ChiSq, TwoDegreesClosedForm) {
  EXPECT_NEAR(chisq_sf(5.991, 2), 0.05001, 5e-6);
  for (double x = 0.0; x < 80.0; x += 0.37) EXPECT_NEAR(chisq_sf(x, 2), std::exp(-x / 2), 1e-10) << x;
}

TEST(ChiSq, ReportedStatistics) {
  EXPECT_NEAR(chisq_sf(0.96, 2), std::exp(-0.48), 1e-12);
  EXPECT_EQ(round2(chisq_sf(0.96, 2)), 0.62);
  EXPECT_NEAR(chisq_sf(37.2, 2), std::exp(-18.6), 1e-15);
  EXPECT_NEAR(chisq_sf(37.2, 2), 8.3e-9, 0.1e-9);
  EXPECT_LT(chisq_sf(37.2, 2), 0.001);
}

TEST(ChiSq, MatchesIncompleteGammaOracle) {
  for (int k = 1; k <= 12; ++k) {
    for (double x : {1e-6, 0.01, 0.3, 1.0, 2.5, 4.0, 7.7, 12.0, 20.0, 35.0, 60.0, 150.0}) {
      const double oracle = boost::math::gamma_q(k / 2.0, x / 2.0);
      EXPECT_NEAR(chisq_sf(x, k), oracle, 1e-10) << "x=" << x << " k=" << k;
    }
  }
}

TEST(Normal, TailValues) {
  EXPECT_DOUBLE_EQ(normal_sf(0.0), 0.5);
  EXPECT_NEAR(2 * normal_sf(1.959964), 0.05, 5e-7);
  EXPECT_NEAR(2 * normal_sf(5.11), 3.2e-7, 0.05e-7);
  EXPECT_LT(2 * normal_sf(5.11), 0.001);
  for (double z = -8.0; z <= 8.0; z += 0.25) {
    // erfc(z / sqrt 2) / 2 is the upper tail; compare against the regularized gamma form for z > 0.
    if (z > 0) EXPECT_NEAR(normal_sf(z), 0.5 * boost::math::gamma_q(0.5, z * z / 2), 1e-12) << z;
    EXPECT_NEAR(normal_sf(z) + normal_sf(-z), 1.0, 1e-15) << z;
  }
}

// Summaries -----------------------------------------------------------------------------

std::vector<CanonicalRating> from_counts(std::size_t a, std::size_t b, std::size_t both, std::size_t neither,
                                         Technique other) {
  std::vector<CanonicalRating> out;
  const auto add = [&](std::size_t n, CanonicalChoice c) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(rating(c, Technique::CaptionS3, other));
  };
  add(a, CanonicalChoice::PreferA);
  add(b, CanonicalChoice::PreferB);
  add(both, CanonicalChoice::Both);
  add(neither, CanonicalChoice::Neither);
  return out;
}

TEST(Summary, HumanFamilyPercentages) {
  const auto s = preference_summary(from_counts(142, 70, 52, 8, Technique::Human), Family::CaptionVsHuman);
  EXPECT_EQ(s.total, 272u);
  EXPECT_NEAR(s.percentages[0], 52.21, 1e-9);
  EXPECT_NEAR(s.percentages[1], 25.74, 1e-9);
  EXPECT_NEAR(s.percentages[2], 19.12, 1e-9);
  EXPECT_NEAR(s.percentages[3], 2.94, 1e-9);
}

TEST(Summary, BaselineFamilyPercentages) {
  const auto s = preference_summary(from_counts(294, 255, 162, 33, Technique::Baseline), Family::CaptionVsBaseline);
  EXPECT_EQ(s.total, 744u);
  EXPECT_NEAR(s.percentages[0], 39.52, 1e-9);
  EXPECT_NEAR(s.percentages[1], 34.27, 1e-9);
  EXPECT_NEAR(s.percentages[2], 21.77, 1e-9);
  EXPECT_NEAR(s.percentages[3], 4.44, 1e-9);
  const double sum = std::accumulate(s.percentages.begin(), s.percentages.end(), 0.0);
  EXPECT_NEAR(sum, 100.0, 0.02);
}

TEST(Summary, AllBothAndEmpty) {
  const auto s = preference_summary(from_counts(0, 0, 9, 0, Technique::Human), Family::CaptionVsHuman);
  EXPECT_EQ(s.percentages, (std::array<double, 4>{0, 0, 100, 0}));
  EXPECT_CAPTION_ERROR(preference_summary(std::vector<CanonicalRating>{}, Family::CaptionVsHuman), Errc::EmptyFamily);
}

TEST(Summary, PercentagesSumWithinRounding) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = preference_summary(
        from_counts(gen() % 200, gen() % 200, gen() % 200, 1 + gen() % 50, Technique::Baseline),
        Family::CaptionVsBaseline);
    EXPECT_NEAR(std::accumulate(s.percentages.begin(), s.percentages.end(), 0.0), 100.0, 0.02 + 1e-9);
  }
}

}  // namespace
}  // namespace caption::stats
