#include <gtest/gtest.h>

#include <map>
#include <random>

#include "keyopt/error.hpp"
#include "keyopt/optimizer.hpp"
#include "keyopt/report.hpp"
#include "oracles.hpp"

using namespace keyopt;

namespace {

BigramStats stats_of(std::string_view text) { return count_bigrams(KeySequence::parse(text)); }

int count_of(const std::string& haystack, const std::string& needle) {
  int n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Per, PublishedUserExamples) {
  EXPECT_NEAR(percentage_effort_reduction(2.06, 1.73), 16.02, 0.005);
  EXPECT_NEAR(percentage_effort_reduction(2.54, 1.59), 37.40, 0.005);
  EXPECT_DOUBLE_EQ(percentage_effort_reduction(5.0, 5.0), 0.0);
  EXPECT_THROW((void)percentage_effort_reduction(0.0, 1.0), Error);
}

TEST(Quantile, InclusiveInterpolation) {
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({4, 3, 2, 1}, 0.75), 3.25);
  EXPECT_DOUBLE_EQ(quantile({7}, 0.3), 7.0);
  const auto d = summarize({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(d.iqr, 1.5);
  EXPECT_DOUBLE_EQ(d.min, 1.0);
  EXPECT_DOUBLE_EQ(d.max, 4.0);
  EXPECT_THROW((void)quantile({}, 0.5), Error);
}

TEST(FitLine, RecoversConstructedLine) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  std::vector<double> y;
  for (double v : x) y.push_back(2 * v + 1);
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_THROW((void)fit_line(std::vector<double>{1}, std::vector<double>{1}), Error);
  EXPECT_THROW((void)fit_line(std::vector<double>{2, 2}, std::vector<double>{1, 3}), Error);
}

TEST(FitLine, ResidualsAreOrthogonalToX) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0, 3);
  std::vector<double> x;
  std::vector<double> y;
  for (int i = 0; i < 50; ++i) {
    x.push_back(i * 1.5);
    y.push_back(0.4 * i + noise(rng));
  }
  const auto f = fit_line(x, y);
  double sum_r = 0;
  double sum_rx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    sum_r += r;
    sum_rx += r * x[i];
  }
  EXPECT_NEAR(sum_r, 0.0, 1e-9);
  EXPECT_NEAR(sum_rx, 0.0, 1e-7);
}

TEST(Heatmap, SegmentsMatchTheWalk) {
  const KeyboardGeometry g;
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto seq = KeySequence::parse(oracle::random_text(rng, 150));
    const auto layout = qwerty_layout();
    const auto walk = sequence_cost(g, layout, seq);
    std::map<std::pair<int, int>, std::int64_t> expected;
    for (const auto& s : walk.per_segment) {
      if (s.length_mm == 0.0) continue;
      const int a = s.from.index();
      const int b = s.to.index();
      ++expected[{std::min(a, b), std::max(a, b)}];
    }
    std::map<std::pair<int, int>, std::int64_t> actual;
    for (const auto& h : heatmap_segments(g, layout, count_bigrams(seq))) {
      EXPECT_LT(h.a.index(), h.b.index());
      actual[{h.a.index(), h.b.index()}] += h.count;
    }
    EXPECT_EQ(actual, expected);
  }
}

TEST(Heatmap, SingleBigramDrawsOneSegment) {
  const KeyboardGeometry g;
  const auto stats = stats_of("ab");
  const auto segs = heatmap_segments(g, qwerty_layout(), stats);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].count, 1);
  const auto svg = heatmap_svg(g, qwerty_layout(), stats, std::nullopt);
  EXPECT_EQ(count_of(svg, "<line"), 1);
  EXPECT_EQ(count_of(svg, "#e41a1c"), 0);
  EXPECT_EQ(count_of(svg, "#4daf4a"), 0);
  EXPECT_EQ(count_of(svg, "#377eb8"), 0);
}

TEST(Heatmap, HighlightsEachSwappedPairInItsOwnColour) {
  const KeyboardGeometry g;
  const auto swaps = SwapSet::canonical({{'a', 'b'}, {'e', 'j'}, {'o', 'v'}});
  const auto layout = apply_swaps(qwerty_layout(), swaps);
  const auto svg = heatmap_svg(g, layout, stats_of("hello how are you"), swaps);
  EXPECT_EQ(count_of(svg, "#e41a1c"), 2);
  EXPECT_EQ(count_of(svg, "#4daf4a"), 2);
  EXPECT_EQ(count_of(svg, "#377eb8"), 2);
  EXPECT_EQ(svg, heatmap_svg(g, layout, stats_of("hello how are you"), swaps));
}

TEST(TopPairs, UnchangedLayoutHasUnitRatios) {
  const KeyboardGeometry g;
  const auto table = top_pairs_table(stats_of("ab ab ab"), g, qwerty_layout(), qwerty_layout());
  ASSERT_FALSE(table.rows.empty());
  for (const auto& row : table.rows) EXPECT_DOUBLE_EQ(row.ratio, 1.0) << row.pair;
  EXPECT_EQ(table.n_let, 2);
  const auto csv = top_pairs_csv(table);
  EXPECT_EQ(csv.rfind("pair,usage_pct,d_qwerty_cm,d_opt_cm,ratio\n", 0), 0u);
  EXPECT_NE(csv.find(",1.00\n"), std::string::npos);
}

TEST(TopPairs, OrderedByUsageAndCapped) {
  const KeyboardGeometry g;
  std::mt19937_64 rng(3);
  const auto stats = stats_of(oracle::random_text(rng, 500));
  const auto table = top_pairs_table(stats, g, qwerty_layout(), qwerty_layout(), 15);
  ASSERT_EQ(table.rows.size(), 15u);
  double sum = 0;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    EXPECT_GE(table.rows[i - 1].usage_pct, table.rows[i].usage_pct);
  }
  for (const auto& r : table.rows) sum += r.usage_pct;
  EXPECT_NEAR(sum, table.usage_sum_pct, 1e-9);
}

TEST(UserReport, AgreesWithResultAndRoundTrips) {
  const KeyboardGeometry g;
  std::mt19937_64 rng(17);
  const auto stats = stats_of(oracle::random_text(rng, 300));
  SearchConfig cfg;
  cfg.n_swap_pairs = 1;
  const auto result = optimize(g, stats, cfg);
  const auto report = make_user_report("u1", 300, stats, g, result);
  EXPECT_NEAR(report.qwerty_total_cm * 10, result.qwerty_cost, 1e-9);
  EXPECT_NEAR(report.optimized_total_cm * 10, result.best_cost, 1e-9);
  EXPECT_NEAR(report.per, result.per, 1e-12);
  EXPECT_NEAR(report.qwerty_avg_cm, report.qwerty_total_cm / stats.total_transitions(), 1e-12);
  EXPECT_EQ(report.swaps, result.best_swaps.notation());
  const nlohmann::json j = report;
  UserReport back;
  from_json(j, back);
  EXPECT_EQ(nlohmann::json(back).dump(), j.dump());
}

TEST(Aggregate, FitsAndPanels) {
  const KeyboardGeometry g;
  std::vector<UserReport> reports;
  std::mt19937_64 rng(2);
  for (int i = 0; i < 4; ++i) {
    const std::size_t letters = 200 + 100 * i;
    const auto stats = stats_of(oracle::random_text(rng, letters));
    SearchConfig cfg;
    cfg.n_swap_pairs = 1;
    reports.push_back(make_user_report("u" + std::to_string(i), static_cast<std::int64_t>(letters), stats,
                                       g, optimize(g, stats, cfg)));
  }
  const auto agg = aggregate(reports);
  EXPECT_EQ(agg.users.size(), 4u);
  ASSERT_TRUE(agg.qwerty_fit && agg.optimized_fit);
  EXPECT_GT(agg.qwerty_fit->slope, 0.0);
  const auto panels = aggregate_panels(reports, agg);
  ASSERT_EQ(panels.size(), 7u);
  EXPECT_EQ(panels.front().first.rfind("panel_a", 0), 0u);
  EXPECT_EQ(panels.back().first.rfind("panel_g", 0), 0u);
  for (const auto& [stem, svg] : panels) {
    EXPECT_NE(svg.find("<svg"), std::string::npos) << stem;
    EXPECT_NE(svg.find("</svg>"), std::string::npos) << stem;
  }
  EXPECT_THROW((void)aggregate(std::span<const UserReport>(reports.data(), 1)), Error);
}
