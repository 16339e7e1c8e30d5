#include "keyopt/optimizer.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "keyopt/error.hpp"
#include "keyopt/report.hpp"

namespace keyopt {

namespace {

constexpr int kPairCount = kLetterCount * (kLetterCount - 1) / 2;  // 325
constexpr int kTripletCount = kLetterCount * (kLetterCount - 1) * (kLetterCount - 2) / 6;  // 2600

struct Candidate {
  std::array<LetterPair, 3> pairs{};
  int count = 0;

  bool lex_less(const Candidate& other) const {
    return std::lexicographical_compare(pairs.begin(), pairs.begin() + count,
                                        other.pairs.begin(), other.pairs.begin() + other.count);
  }
};

const std::array<LetterPair, kPairCount>& all_pairs() {
  static const auto table = [] {
    std::array<LetterPair, kPairCount> out{};
    int i = 0;
    for (int a = 0; a < kLetterCount; ++a) {
      for (int b = a + 1; b < kLetterCount; ++b) {
        out[i++] = {static_cast<std::int8_t>(a), static_cast<std::int8_t>(b)};
      }
    }
    return out;
  }();
  return table;
}

const std::array<std::array<std::int8_t, 3>, kTripletCount>& all_triplets() {
  static const auto table = [] {
    std::array<std::array<std::int8_t, 3>, kTripletCount> out{};
    int i = 0;
    for (int a = 0; a < kLetterCount; ++a) {
      for (int b = a + 1; b < kLetterCount; ++b) {
        for (int c = b + 1; c < kLetterCount; ++c) {
          out[i++] = {static_cast<std::int8_t>(a), static_cast<std::int8_t>(b),
                      static_cast<std::int8_t>(c)};
        }
      }
    }
    return out;
  }();
  return table;
}

/// A contiguous slice of the search space. Canonical slices fix the first
/// pair of a given size; Triplets slices fix the first triplet.
struct Task {
  int size = 0;
  int first = 0;
};

std::vector<Task> plan_tasks(int n, SearchMode mode, bool cumulative) {
  std::vector<Task> tasks;
  if (mode == SearchMode::Triplets) {
    for (int t = 0; t < kTripletCount; ++t) tasks.push_back({3, t});
    return tasks;
  }
  if (cumulative) tasks.push_back({0, 0});
  for (int size = cumulative ? 1 : n; size <= n; ++size) {
    for (int p = 0; p < kPairCount; ++p) tasks.push_back({size, p});
  }
  return tasks;
}

/// Calls visit(const Candidate&) for every candidate of the task in
/// canonical order, and returns the raw (pre-filter) count.
template <typename Visit>
std::uint64_t run_task(SearchMode mode, const Task& task, Visit&& visit) {
  Candidate c;
  if (mode == SearchMode::Triplets) {
    const auto& triplets = all_triplets();
    const auto& t1 = triplets[task.first];
    const std::uint32_t mask1 = (1u << t1[0]) | (1u << t1[1]) | (1u << t1[2]);
    c.count = 3;
    for (int other = 0; other < kTripletCount; ++other) {
      if (other == task.first) continue;
      const auto& t2 = triplets[other];
      const std::uint32_t mask2 = (1u << t2[0]) | (1u << t2[1]) | (1u << t2[2]);
      // (T2, T1) yields the same swaps as (T1, T2); keep one.
      if ((mask1 & mask2) != 0 || other < task.first) continue;
      for (int i = 0; i < 3; ++i) c.pairs[i] = std::minmax(t1[i], t2[i]);
      std::sort(c.pairs.begin(), c.pairs.end());
      visit(c);
    }
    return kTripletCount - 1;
  }

  if (task.size == 0) {
    c.count = 0;
    visit(c);
    return 1;
  }
  const auto& pairs = all_pairs();
  const LetterPair p1 = pairs[task.first];
  c.count = task.size;
  c.pairs[0] = p1;
  std::uint64_t emitted = 0;
  if (task.size == 1) {
    visit(c);
    return 1;
  }
  const std::uint32_t used1 = (1u << p1.first) | (1u << p1.second);
  for (int j = task.first + 1; j < kPairCount; ++j) {
    const LetterPair p2 = pairs[j];
    if (p2.first <= p1.first) continue;
    const std::uint32_t bits2 = (1u << p2.first) | (1u << p2.second);
    if (used1 & bits2) continue;
    c.pairs[1] = p2;
    if (task.size == 2) {
      visit(c);
      ++emitted;
      continue;
    }
    const std::uint32_t used2 = used1 | bits2;
    for (int k = j + 1; k < kPairCount; ++k) {
      const LetterPair p3 = pairs[k];
      if (p3.first <= p2.first) continue;
      if (used2 & ((1u << p3.first) | (1u << p3.second))) continue;
      c.pairs[2] = p3;
      visit(c);
      ++emitted;
    }
  }
  return emitted;
}

void check_n_and_mode(int n, SearchMode mode) {
  if (n < 1 || n > 3) throw Error("number of swap pairs must be 1, 2 or 3");
  if (mode == SearchMode::Triplets && n != 3) {
    throw Error("triplet enumeration requires exactly 3 swap pairs");
  }
}

/// Costs from the incremental evaluator carry rounding noise that depends
/// on which letters move, so exact ties (say, two keys equally far from the
/// spacebar) can come out a few ulps apart. Candidates within this relative
/// band of the minimum count as tied.
constexpr double kTieBand = 1e-10;

/// Every candidate within the tie band of the running minimum. The winner
/// is picked only after all workers are merged, so the choice does not
/// depend on scheduling.
struct Best {
  double cost = std::numeric_limits<double>::infinity();
  double band = 0.0;
  std::vector<std::pair<double, Candidate>> near;
  std::uint64_t evaluated = 0;
  std::uint64_t raw = 0;

  explicit Best(double band_mm = 0.0) : band(band_mm) {}

  void offer(double value, const Candidate& cand) {
    if (value > cost + band) return;
    near.emplace_back(value, cand);
    if (value < cost - band) {
      std::erase_if(near, [&](const auto& e) { return e.first > value + band; });
    }
    cost = std::min(cost, value);
  }

  void merge(const Best& other) {
    evaluated += other.evaluated;
    raw += other.raw;
    for (const auto& [value, cand] : other.near) offer(value, cand);
  }

  Candidate winner() const {
    const Candidate* pick = nullptr;
    for (const auto& [value, cand] : near) {
      if (value <= cost + band && (pick == nullptr || cand.lex_less(*pick))) pick = &cand;
    }
    return pick ? *pick : Candidate{};
  }
};

SwapSet to_swapset(const Candidate& c) {
  return SwapSet::canonical(std::vector<LetterPair>(c.pairs.begin(), c.pairs.begin() + c.count));
}

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

std::string to_string(SearchMode mode) {
  return mode == SearchMode::Canonical ? "canonical" : "triplets";
}

SearchMode parse_search_mode(std::string_view text) {
  if (text == "canonical") return SearchMode::Canonical;
  if (text == "triplets" || text == "paper") return SearchMode::Triplets;
  throw Error("unknown search mode '" + std::string(text) + "'");
}

void SearchConfig::validate() const {
  check_n_and_mode(n_swap_pairs, mode);
  if (mode == SearchMode::Triplets && cumulative) {
    throw Error("cumulative search is only defined for canonical mode");
  }
  if (workers == 0) throw Error("workers must be at least 1");
  model.validate();
}

EnumerationCount enumerate_swapsets(int n, SearchMode mode,
                                    const std::function<void(const SwapSet&)>& visit) {
  check_n_and_mode(n, mode);
  EnumerationCount count;
  for (const Task& task : plan_tasks(n, mode, false)) {
    count.raw += run_task(mode, task, [&](const Candidate& c) {
      ++count.emitted;
      visit(to_swapset(c));
    });
  }
  if (mode == SearchMode::Canonical) count.raw = count.emitted;
  return count;
}

EnumerationCount expected_enumeration_count(int n, SearchMode mode) {
  check_n_and_mode(n, mode);
  auto choose2 = [](std::uint64_t m) { return m * (m - 1) / 2; };
  if (mode == SearchMode::Triplets) {
    // Disjoint second triplet from the 23 remaining letters, halved for symmetry.
    const std::uint64_t others = 23ull * 22 * 21 / 6;
    return {std::uint64_t{kTripletCount} * (kTripletCount - 1), kTripletCount * others / 2};
  }
  std::uint64_t ordered = 1;
  std::uint64_t factorial = 1;
  for (int i = 0; i < n; ++i) {
    ordered *= choose2(kLetterCount - 2 * i);
    factorial *= static_cast<std::uint64_t>(i + 1);
  }
  return {ordered / factorial, ordered / factorial};
}

OptimizationResult optimize(const KeyboardGeometry& g, const BigramStats& stats,
                            const SearchConfig& cfg) {
  cfg.validate();
  if (stats.empty()) throw Error("optimize: empty stats");
  const auto started = std::chrono::steady_clock::now();

  const Layout qwerty = qwerty_layout();
  const DeltaEvaluator evaluator(g, qwerty, stats, cfg.model);
  const auto tasks = plan_tasks(cfg.n_swap_pairs, cfg.mode, cfg.cumulative);

  const double band = kTieBand * std::max(1.0, evaluator.base_cost());
  auto work = [&](std::atomic<std::size_t>& next) {
    Best local(band);
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      local.raw += run_task(cfg.mode, tasks[t], [&](const Candidate& c) {
        ++local.evaluated;
        local.offer(evaluator.evaluate(c.pairs.data(), c.count), c);
      });
    }
    return local;
  };

  std::atomic<std::size_t> next{0};
  Best best(band);
  const unsigned workers = std::min<std::size_t>(cfg.workers, tasks.size());
  if (workers <= 1) {
    best = work(next);
  } else {
    std::vector<Best> partial(workers);
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] { partial[w] = work(next); });
      }
    }
    for (const auto& p : partial) best.merge(p);
  }

  OptimizationResult result;
  result.best_swaps = to_swapset(best.winner());
  result.qwerty_cost = evaluator.base_cost();
  result.best_cost = stats_cost(g, apply_swaps(qwerty, result.best_swaps), stats, cfg.model);
  result.per = result.qwerty_cost > 0.0
                   ? percentage_effort_reduction(result.qwerty_cost, result.best_cost)
                   : 0.0;
  result.candidates_evaluated = best.evaluated;
  result.raw_candidates = cfg.mode == SearchMode::Canonical ? best.evaluated : best.raw;
  result.mode = cfg.mode;
  result.n_swap_pairs = cfg.n_swap_pairs;
  result.cumulative = cfg.cumulative;
  result.model = cfg.model;
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

bool verify_result(const KeyboardGeometry& g, const BigramStats& stats,
                   const OptimizationResult& result) {
  if (!result.best_swaps.is_canonical()) return false;
  const int max_pairs = result.n_swap_pairs;
  const auto size = static_cast<int>(result.best_swaps.size());
  if (size > max_pairs || (!result.cumulative && size != max_pairs)) return false;
  try {
    const Layout qwerty = qwerty_layout();
    const double qwerty_cost = stats_cost(g, qwerty, stats, result.model);
    const double best_cost =
        stats_cost(g, apply_swaps(qwerty, result.best_swaps), stats, result.model);
    const double per =
        qwerty_cost > 0.0 ? percentage_effort_reduction(qwerty_cost, best_cost) : 0.0;
    return close(qwerty_cost, result.qwerty_cost) && close(best_cost, result.best_cost) &&
           close(per, result.per);
  } catch (const Error&) {
    return false;
  }
}

void to_json(nlohmann::json& j, const OptimizationResult& result) {
  j = nlohmann::json{
      {"swaps", result.best_swaps},
      {"qwerty_cost_mm", result.qwerty_cost},
      {"best_cost_mm", result.best_cost},
      {"per_pct", result.per},
      {"candidates", result.candidates_evaluated},
      {"raw_candidates", result.raw_candidates},
      {"mode", to_string(result.mode)},
      {"n_swaps", result.n_swap_pairs},
      {"cumulative", result.cumulative},
      {"model", result.model},
      {"wall_time_s", nullptr},
  };
  if (result.wall_time_s) j["wall_time_s"] = *result.wall_time_s;
}

OptimizationResult optimization_result_from_json(const nlohmann::json& j) {
  try {
    OptimizationResult r;
    r.best_swaps = swapset_from_json(j.at("swaps"));
    r.qwerty_cost = j.at("qwerty_cost_mm").get<double>();
    r.best_cost = j.at("best_cost_mm").get<double>();
    r.per = j.at("per_pct").get<double>();
    r.candidates_evaluated = j.at("candidates").get<std::uint64_t>();
    r.raw_candidates = j.value("raw_candidates", r.candidates_evaluated);
    r.mode = parse_search_mode(j.at("mode").get<std::string>());
    r.n_swap_pairs = j.value("n_swaps", static_cast<int>(r.best_swaps.size()));
    r.cumulative = j.value("cumulative", false);
    if (j.contains("model")) r.model = j.at("model").get<EffortModel>();
    if (j.contains("wall_time_s") && !j.at("wall_time_s").is_null()) {
      r.wall_time_s = j.at("wall_time_s").get<double>();
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("optimization result: ") + e.what());
  }
}

}  // namespace keyopt
