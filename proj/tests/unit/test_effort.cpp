#include <gtest/gtest.h>

#include <random>

#include "keyopt/effort.hpp"
#include "keyopt/error.hpp"
#include "oracles.hpp"

using namespace keyopt;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

SwapSet random_swapset(std::mt19937_64& rng, int n) {
  std::array<int, 26> letters{};
  std::iota(letters.begin(), letters.end(), 0);
  std::shuffle(letters.begin(), letters.end(), rng);
  std::vector<LetterPair> pairs;
  for (int p = 0; p < n; ++p) {
    pairs.emplace_back(static_cast<std::int8_t>(letters[2 * p]), static_cast<std::int8_t>(letters[2 * p + 1]));
  }
  return SwapSet::canonical(pairs);
}

Layout random_layout(std::mt19937_64& rng) {
  std::array<int, 26> perm{};
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::array<Slot, kLetterCount> slots;
  for (int i = 0; i < kLetterCount; ++i) slots[i] = Slot::letter_slot(perm[i]);
  return Layout(slots);
}

}  // namespace

TEST(SequenceCost, WorkedExample) {
  const KeyboardGeometry g;
  const auto seq = normalize("Hello.  How are you?");
  const auto cost = sequence_cost(g, qwerty_layout(), seq);
  const auto expected = oracle::walk_qwerty(oracle::Board{}, "hello how are you");
  EXPECT_NEAR(cost.total, 321.0, 0.5);
  EXPECT_NEAR(cost.total, expected.total, 1e-9);
  ASSERT_EQ(cost.per_segment.size(), 16u);
  std::vector<std::string> subkeys;
  double sum = 0.0;
  for (const auto& s : cost.per_segment) {
    if (s.to.is_space()) subkeys.push_back(s.to.id());
    sum += s.effort;
  }
  EXPECT_EQ(subkeys, (std::vector<std::string>{"sp4", "sp1", "sp1"}));
  EXPECT_DOUBLE_EQ(sum, cost.total);
  EXPECT_NEAR(cost.avg_per_transition, cost.total / 16, 1e-12);
}

TEST(SequenceCost, TrivialCases) {
  const KeyboardGeometry g;
  EXPECT_EQ(sequence_cost(g, qwerty_layout(), KeySequence::parse("a")).total, 0.0);
  EXPECT_EQ(sequence_cost(g, qwerty_layout(), KeySequence{}).total, 0.0);
  EXPECT_EQ(sequence_cost(g, qwerty_layout(), KeySequence::parse("ll")).total, 0.0);
}

TEST(SequenceCost, MatchesOracleWalkOnPermutedLayouts) {
  const KeyboardGeometry g;
  const oracle::Board board;
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const auto text = oracle::random_text(rng, 200);
    const auto s = random_swapset(rng, 1 + trial % 3);
    std::vector<std::pair<char, char>> pairs;
    for (auto [a, b] : s.pairs()) pairs.emplace_back('a' + a, 'a' + b);
    const auto where = oracle::permutation_from_pairs(pairs);
    const auto expected = oracle::walk(board, text, [&](char c) { return where[c - 'a']; });
    const auto got = sequence_cost(g, apply_swaps(qwerty_layout(), s), KeySequence::parse(text));
    EXPECT_NEAR(got.total, expected.total, 1e-9 * expected.total);
  }
}

TEST(StatsCost, EqualsSequenceCost) {
  const KeyboardGeometry g;
  const auto seq = normalize("Hello.  How are you?");
  EXPECT_NEAR(stats_cost(g, qwerty_layout(), count_bigrams(seq)), 321.0, 0.5);
  EXPECT_EQ(stats_cost(g, qwerty_layout(), BigramStats{}), 0.0);

  std::mt19937_64 rng(1);
  EffortModel fitts;
  fitts.kind = EffortKind::Fitts;
  fitts.fitts_alpha = 0.3;
  fitts.fitts_beta = 0.7;
  for (int trial = 0; trial < 40; ++trial) {
    const auto text = oracle::random_text(rng, 500);
    const auto s = KeySequence::parse(text);
    const Layout layout = random_layout(rng);
    for (const auto& model : {EffortModel{}, fitts}) {
      EXPECT_LE(rel(stats_cost(g, layout, count_bigrams(s), model), sequence_cost(g, layout, s, model).total),
                1e-9);
    }
  }
}

TEST(DeltaCost, IdentityAndUntouchedLetters) {
  const KeyboardGeometry g;
  const auto stats = count_bigrams(KeySequence::parse("the cat sat "));
  const double base = stats_cost(g, qwerty_layout(), stats);
  EXPECT_EQ(delta_cost(g, qwerty_layout(), base, stats, SwapSet{}), base);
  // None of j, k, q, z occur.
  EXPECT_EQ(delta_cost(g, qwerty_layout(), base, stats, SwapSet::canonical({{'j', 'k'}, {'q', 'z'}})), base);
}

TEST(DeltaCost, PublishedSwapSetMatchesFullRecompute) {
  const KeyboardGeometry g;
  const auto lil = SwapSet::canonical({{'e', 'j'}, {'o', 'v'}, {'a', 'b'}});
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto stats = count_bigrams(KeySequence::parse(oracle::random_text(rng, 300)));
    const double base = stats_cost(g, qwerty_layout(), stats);
    const double full = stats_cost(g, apply_swaps(qwerty_layout(), lil), stats);
    EXPECT_LE(rel(delta_cost(g, qwerty_layout(), base, stats, lil), full), 1e-9);
  }
}

TEST(DeltaCost, RandomTriplesMatchFullRecompute) {
  const KeyboardGeometry g;
  std::mt19937_64 rng(3);
  EffortModel fitts;
  fitts.kind = EffortKind::Fitts;
  fitts.fitts_alpha = 1.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto stats = count_bigrams(KeySequence::parse(oracle::random_text(rng, 20 + trial * 5)));
    const Layout base = random_layout(rng);
    const auto model = trial % 4 == 0 ? fitts : EffortModel{};
    const DeltaEvaluator eval(g, base, stats, model);
    const auto s = random_swapset(rng, 1 + trial % 3);
    EXPECT_LE(rel(eval.evaluate(s), stats_cost(g, apply_swaps(base, s), stats, model)), 1e-9);
  }
}

TEST(DeltaCost, RejectsOverlappingPairs) {
  const KeyboardGeometry g;
  const auto stats = count_bigrams(KeySequence::parse("ab"));
  EXPECT_THROW((void)delta_cost(g, qwerty_layout(), 0.0, stats, SwapSet::raw({{0, 1}, {1, 2}})), Error);
}

TEST(Fitts, Examples) {
  EffortModel m;
  m.kind = EffortKind::Fitts;
  m.fitts_alpha = 0.25;
  m.fitts_beta = 1.0;
  m.key_area = 4.76 * 6.26;
  EXPECT_DOUBLE_EQ(fitts_effort(0.0, m), 0.25);
  m.fitts_alpha = 0.0;
  EXPECT_NEAR(fitts_effort(29.7976, m), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(fitts_effort(5.77, EffortModel{}), 5.77);

  m.fitts_beta = 0.0;
  EXPECT_THROW(m.validate(), Error);
  EffortModel area;
  area.key_area = 0.0;
  EXPECT_THROW(area.validate(), Error);
}

TEST(Fitts, JsonRoundTrip) {
  EffortModel m;
  m.kind = EffortKind::Fitts;
  m.fitts_alpha = 0.1;
  m.fitts_beta = 0.2;
  EXPECT_EQ(nlohmann::json(m).get<EffortModel>(), m);
  EXPECT_EQ(nlohmann::json(EffortModel{}).get<EffortModel>(), EffortModel{});
  EXPECT_THROW((void)nlohmann::json({{"kind", "bogus"}}).get<EffortModel>(), Error);
}

TEST(Effort, DistanceCostScalesWithGeometry) {
  const KeyboardGeometry g;
  std::mt19937_64 rng(4);
  const auto stats = count_bigrams(KeySequence::parse(oracle::random_text(rng, 400)));
  for (double s : {0.5, 3.0}) {
    const KeyboardGeometry scaled(g.spec().scaled(s));
    EXPECT_LE(rel(stats_cost(scaled, qwerty_layout(), stats), s * stats_cost(g, qwerty_layout(), stats)), 1e-12);
  }
}
