#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "keyopt/effort.hpp"
#include "keyopt/optimizer.hpp"

using namespace keyopt;

namespace {

// English-ish text: letters drawn by rough frequency, words of 2-8 letters.
KeySequence synthetic_corpus(std::size_t letters, unsigned seed) {
  static const std::string weighted =
      "eeeeeeeeeeeettttttttaaaaaaaoooooooiiiiiiinnnnnnnsssssshhhhhhrrrrrrdddd"
      "llllccuummwwffggyyppbbvkjxqz";
  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, weighted.size() - 1);
  std::uniform_int_distribution<int> word(2, 8);
  std::string text;
  std::size_t placed = 0;
  while (placed < letters) {
    if (!text.empty()) text += ' ';
    for (int i = word(rng); i > 0 && placed < letters; --i, ++placed) text += weighted[pick(rng)];
  }
  return KeySequence::parse(text);
}

const BigramStats& corpus_stats() {
  static const BigramStats stats = count_bigrams(synthetic_corpus(950, 7));
  return stats;
}

void BM_SequenceCost(benchmark::State& state) {
  const KeyboardGeometry g;
  const auto seq = synthetic_corpus(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(sequence_cost(g, qwerty_layout(), seq).total);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SequenceCost)->Arg(1000)->Arg(10000);

void BM_StatsCost(benchmark::State& state) {
  const KeyboardGeometry g;
  for (auto _ : state) benchmark::DoNotOptimize(stats_cost(g, qwerty_layout(), corpus_stats()));
}
BENCHMARK(BM_StatsCost);

void BM_DeltaEvaluate(benchmark::State& state) {
  const KeyboardGeometry g;
  const DeltaEvaluator eval(g, qwerty_layout(), corpus_stats(), EffortModel{});
  const LetterPair pairs[3] = {{0, 9}, {4, 21}, {14, 24}};
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eval.evaluate(pairs, n));
}
BENCHMARK(BM_DeltaEvaluate)->DenseRange(1, 3);

void BM_Optimize(benchmark::State& state) {
  const KeyboardGeometry g;
  SearchConfig cfg;
  cfg.n_swap_pairs = static_cast<int>(state.range(0));
  cfg.workers = static_cast<unsigned>(state.range(1));
  std::uint64_t candidates = 0;
  for (auto _ : state) {
    const auto r = optimize(g, corpus_stats(), cfg);
    candidates += r.candidates_evaluated;
    benchmark::DoNotOptimize(r.best_cost);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(candidates));
}
BENCHMARK(BM_Optimize)->Args({2, 1})->Args({3, 1})->Args({3, 4})->Unit(benchmark::kMillisecond);

void BM_OptimizeTriplets(benchmark::State& state) {
  const KeyboardGeometry g;
  SearchConfig cfg;
  cfg.mode = SearchMode::Triplets;
  for (auto _ : state) benchmark::DoNotOptimize(optimize(g, corpus_stats(), cfg).best_cost);
}
BENCHMARK(BM_OptimizeTriplets)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
