// One line per acceptance criterion; exit status is nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli/commands.hpp"
#include "keyopt/corpus.hpp"
#include "keyopt/effort.hpp"
#include "keyopt/optimizer.hpp"
#include "keyopt/report.hpp"
#include "oracles.hpp"

using namespace keyopt;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kDataDir = KEYOPT_DATA_DIR;
const fs::path kGolden = KEYOPT_GOLDEN;
const std::vector<std::string> kSamples = {"baker", "runner", "gardener", "coder", "traveller"};

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string fmt(const char* pattern, double v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

KeySequence sample_sequence(const std::string& name) {
  const auto records = read_tweet_file(kDataDir / "tweets" / (name + ".jsonl"));
  const IngestPolicy policy;
  return normalize(ingest_tweets(records, policy), policy);
}

std::string random_corpus(std::mt19937_64& rng, std::size_t min_letters, std::size_t max_letters) {
  std::uniform_int_distribution<std::size_t> len(min_letters, max_letters);
  return oracle::random_text(rng, len(rng));
}

SwapSet random_swapset(std::mt19937_64& rng) {
  std::vector<int> letters(26);
  for (int i = 0; i < 26; ++i) letters[i] = i;
  std::shuffle(letters.begin(), letters.end(), rng);
  const int n = std::uniform_int_distribution<int>(0, 3)(rng);
  std::vector<LetterPair> pairs;
  for (int i = 0; i < n; ++i) {
    pairs.emplace_back(static_cast<std::int8_t>(letters[2 * i]),
                       static_cast<std::int8_t>(letters[2 * i + 1]));
  }
  return SwapSet::canonical(pairs);
}

std::string notation(const std::vector<std::pair<char, char>>& pairs) {
  std::string lhs;
  std::string rhs;
  for (auto [a, b] : pairs) {
    lhs += a;
    rhs += b;
  }
  return lhs + "->" + rhs;
}

// --- 1 ---------------------------------------------------------------------

Outcome worked_example() {
  const KeyboardGeometry g;
  const auto seq = normalize("Hello.  How are you?");
  const auto cost = sequence_cost(g, qwerty_layout(), seq);

  std::vector<std::string> nodes;
  std::vector<std::string> subkeys;
  for (const auto& s : cost.per_segment) {
    if (nodes.empty()) nodes.push_back(s.from.is_space() ? s.from.id() : std::string(1, letter_char(qwerty_layout().letter_at(s.from))));
    const std::string to =
        s.to.is_space() ? s.to.id() : std::string(1, letter_char(qwerty_layout().letter_at(s.to)));
    if (s.to.is_space()) subkeys.push_back(to);
    if (to != nodes.back()) nodes.push_back(to);
  }
  const std::vector<std::string> published = {"h", "e", "l", "o", "sp4", "h", "o", "w",
                                              "sp1", "a", "r", "e", "sp1", "y", "o", "u"};
  const std::vector<std::string> expected_subkeys = {"sp4", "sp1", "sp1"};
  Outcome o;
  o.pass = std::abs(cost.total - 321.0) <= 0.5 && subkeys == expected_subkeys &&
           nodes == published && cost.per_segment.size() == 16;
  std::string path;
  for (const auto& n : nodes) path += (path.empty() ? "" : ">") + n;
  o.detail = fmt("%.3f mm", cost.total) + ", " + std::to_string(cost.per_segment.size()) +
             " transitions, path " + path;
  return o;
}

// --- 2 ---------------------------------------------------------------------

Outcome geometry_golden_set() {
  const KeyboardGeometry g;
  const std::vector<std::tuple<std::string, std::string, double>> golden = {
      {"e", "sp", 2.54}, {"o", "sp", 2.54}, {"n", "sp", 0.80}, {"s", "sp", 1.97},
      {"y", "sp", 2.41}, {"e", "r", 0.58},  {"t", "h", 1.18},  {"i", "n", 1.62},
      {"t", "o", 2.31},  {"o", "u", 1.16},  {"a", "n", 3.56},  {"h", "a", 2.89},
  };
  Outcome o;
  double worst = 0.0;
  for (const auto& [a, b, cm] : golden) {
    // "sp" is the sub-key the finger would use after the letter.
    const Slot from = qwerty_layout().slot_of(a[0]);
    const Slot to = b == "sp" ? g.nearest_space_slot(from) : qwerty_layout().slot_of(b[0]);
    const double got = g.distance(from, to) / 10.0;
    worst = std::max(worst, std::abs(got - cm));
    if (std::abs(got - cm) > 0.01 + 1e-12) {
      o.pass = false;
      o.detail += a + "-" + b + fmt("=%.4f cm ", got);
    }
  }
  o.detail += "12 pairs, worst error " + fmt("%.4f cm", worst);
  return o;
}

// --- 3 ---------------------------------------------------------------------

Outcome factorization() {
  Clock clock;
  const KeyboardGeometry g;
  std::mt19937_64 rng(3003);
  Outcome o;
  double worst_stats = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto seq = KeySequence::parse(random_corpus(rng, 10, 2000));
    const double walk = sequence_cost(g, qwerty_layout(), seq).total;
    const double grouped = stats_cost(g, qwerty_layout(), count_bigrams(seq));
    worst_stats = std::max(worst_stats, std::abs(walk - grouped) / std::max(1.0, walk));
    if (!rel_close(walk, grouped, 1e-9)) o.pass = false;
  }
  double worst_delta = 0.0;
  std::vector<BigramStats> corpora;
  std::vector<double> base_costs;
  for (int i = 0; i < 20; ++i) {
    corpora.push_back(count_bigrams(KeySequence::parse(random_corpus(rng, 10, 2000))));
    base_costs.push_back(stats_cost(g, qwerty_layout(), corpora.back()));
  }
  for (int i = 0; i < 1000; ++i) {
    const std::size_t c = static_cast<std::size_t>(i) % corpora.size();
    const auto& stats = corpora[c];
    const auto swaps = random_swapset(rng);
    const double full = stats_cost(g, apply_swaps(qwerty_layout(), swaps), stats);
    const double delta = delta_cost(g, qwerty_layout(), base_costs[c], stats, swaps);
    worst_delta = std::max(worst_delta, std::abs(full - delta) / std::max(1.0, full));
    if (!rel_close(full, delta, 1e-9)) o.pass = false;
  }
  const double t = clock.seconds();
  o.pass = o.pass && t < 10.0;
  o.detail = "stats vs walk " + fmt("%.1e", worst_stats) + ", delta vs full " +
             fmt("%.1e", worst_delta) + " (relative), " + fmt("%.2f s", t);
  return o;
}

// --- 4 ---------------------------------------------------------------------

struct BruteBest {
  double cost = std::numeric_limits<double>::infinity();
  std::vector<std::pair<char, char>> pairs;
};

/// Full walk per candidate on the independently built board.
BruteBest naive_search(const std::string& text, int n) {
  const oracle::Board board;
  std::vector<std::pair<double, std::vector<std::pair<char, char>>>> all;
  auto consider = [&](const std::vector<std::pair<char, char>>& pairs) {
    const auto where = oracle::permutation_from_pairs(pairs);
    all.emplace_back(oracle::walk(board, text, [&](char c) { return where[c - 'a']; }).total, pairs);
  };
  for (char a = 'a'; a <= 'z'; ++a) {
    for (char b = a + 1; b <= 'z'; ++b) {
      if (n == 1) {
        consider({{a, b}});
        continue;
      }
      for (char c = a + 1; c <= 'z'; ++c) {
        for (char d = c + 1; d <= 'z'; ++d) {
          if (c != b && d != b) consider({{a, b}, {c, d}});
        }
      }
    }
  }
  const double band = 1e-10 * std::max(1.0, oracle::walk_qwerty(board, text).total);
  BruteBest best;
  for (const auto& [cost, pairs] : all) best.cost = std::min(best.cost, cost);
  bool first = true;
  for (const auto& [cost, pairs] : all) {
    if (cost <= best.cost + band && (first || pairs < best.pairs)) {
      best.pairs = pairs;
      first = false;
    }
  }
  return best;
}

Outcome exhaustive_oracle() {
  Clock clock;
  const KeyboardGeometry g;
  std::mt19937_64 rng(4004);
  Outcome o;
  int agreed = 0;
  for (int i = 0; i < 10; ++i) {
    const auto text = random_corpus(rng, 150, 300);
    const auto stats = count_bigrams(KeySequence::parse(text));
    for (int n : {1, 2}) {
      SearchConfig cfg;
      cfg.n_swap_pairs = n;
      const auto r = optimize(g, stats, cfg);
      const auto brute = naive_search(text, n);
      std::vector<std::pair<char, char>> got;
      for (auto [a, b] : r.best_swaps.pairs()) got.emplace_back('a' + a, 'a' + b);
      if (rel_close(r.best_cost, brute.cost, 1e-9) && got == brute.pairs) {
        ++agreed;
      } else {
        o.pass = false;
        o.detail += "corpus " + std::to_string(i) + " n=" + std::to_string(n) + ": " +
                    r.best_swaps.notation() + " vs " + notation(brute.pairs) + "; ";
      }
    }
  }
  const double t = clock.seconds();
  o.pass = o.pass && t < 60.0;
  o.detail += std::to_string(agreed) + "/20 searches agree, " + fmt("%.2f s", t);
  return o;
}

// --- 5 ---------------------------------------------------------------------

Outcome enumeration_counts() {
  Outcome o;
  std::vector<std::uint64_t> emitted;
  for (int n : {1, 2, 3}) {
    emitted.push_back(enumerate_swapsets(n, SearchMode::Canonical, [](const SwapSet&) {}).emitted);
  }
  const auto triplet_count = enumerate_swapsets(3, SearchMode::Triplets, [](const SwapSet&) {});
  SearchConfig cfg;
  cfg.mode = SearchMode::Triplets;
  const auto r = optimize(KeyboardGeometry{}, count_bigrams(sample_sequence("baker")), cfg);
  o.pass = emitted == std::vector<std::uint64_t>{325, 44850, 3453450} && triplet_count.raw == 6757400 &&
           triplet_count.emitted == 2302300 && r.raw_candidates == 6757400 &&
           r.candidates_evaluated == 2302300;
  o.detail = "canonical " + std::to_string(emitted[0]) + "/" + std::to_string(emitted[1]) + "/" +
             std::to_string(emitted[2]) + ", triplets raw " + std::to_string(r.raw_candidates) +
             " evaluated " + std::to_string(r.candidates_evaluated);
  return o;
}

// --- 6 ---------------------------------------------------------------------

Outcome dominance() {
  const KeyboardGeometry g;
  std::vector<std::pair<std::string, BigramStats>> corpora;
  for (const auto& name : kSamples) corpora.emplace_back(name, count_bigrams(sample_sequence(name)));
  std::mt19937_64 rng(6006);
  for (int i = 0; i < 3; ++i) {
    corpora.emplace_back("random" + std::to_string(i),
                         count_bigrams(KeySequence::parse(random_corpus(rng, 200, 1000))));
  }
  Outcome o;
  double smallest_gap = std::numeric_limits<double>::infinity();
  for (const auto& [name, stats] : corpora) {
    SearchConfig canonical;
    SearchConfig triplets;
    triplets.mode = SearchMode::Triplets;
    const auto a = optimize(g, stats, canonical);
    const auto b = optimize(g, stats, triplets);
    smallest_gap = std::min(smallest_gap, b.best_cost - a.best_cost);
    if (a.best_cost > b.best_cost) {
      o.pass = false;
      o.detail += name + " ";
    }
  }
  o.detail += std::to_string(corpora.size()) + " corpora, min(triplets - canonical) " +
              fmt("%.4f mm", smallest_gap);
  return o;
}

// --- 7 ---------------------------------------------------------------------

Outcome performance() {
  const KeyboardGeometry g;
  const auto stats = count_bigrams(sample_sequence("traveller"));
  SearchConfig cfg;
  cfg.workers = 1;
  Clock single_clock;
  auto single = optimize(g, stats, cfg);
  const double single_s = single_clock.seconds();
  cfg.workers = 8;
  Clock multi_clock;
  auto multi = optimize(g, stats, cfg);
  const double multi_s = multi_clock.seconds();
  single.wall_time_s.reset();
  multi.wall_time_s.reset();
  const bool same = json(single).dump() == json(multi).dump();
  Outcome o;
  o.pass = single_s <= 120.0 && multi_s <= 20.0 && same && single.candidates_evaluated == 3453450;
  o.detail = fmt("1 worker %.2f s", single_s) + fmt(", 8 workers %.2f s", multi_s) +
             (same ? ", identical results" : ", RESULTS DIFFER") + " (" +
             std::to_string(std::thread::hardware_concurrency()) + " hardware threads)";
  return o;
}

// --- 8 ---------------------------------------------------------------------

Outcome population_substitutes() {
  Outcome o;
  const json golden = json::parse(cli::read_file(kGolden));
  const KeyboardGeometry g;
  SearchConfig cfg;
  cfg.cumulative = true;

  // (a) pinned results on the bundled samples.
  int pinned = 0;
  std::map<std::string, OptimizationResult> results;
  for (const auto& name : kSamples) {
    const auto stats = count_bigrams(sample_sequence(name));
    const auto r = optimize(g, stats, cfg);
    results[name] = r;
    const auto& want = golden.at(name);
    const bool ok = r.per > 0.0 && r.best_swaps.notation() == want.at("swaps").get<std::string>() &&
                    rel_close(r.per, want.at("per_pct").get<double>(), 1e-9) &&
                    rel_close(r.qwerty_cost, want.at("qwerty_cost_mm").get<double>(), 1e-9) &&
                    rel_close(r.best_cost, want.at("best_cost_mm").get<double>(), 1e-9);
    pinned += ok;
    if (!ok) {
      o.pass = false;
      o.detail += name + " got " + r.best_swaps.notation() + fmt(" %.6f%%; ", r.per);
    }
  }

  // (b) PER and argmin do not depend on the keyboard's physical scale.
  int invariant = 0;
  for (const auto& name : kSamples) {
    const auto stats = count_bigrams(sample_sequence(name));
    bool ok = true;
    for (double factor : {0.5, 2.75}) {
      const KeyboardGeometry scaled(GeometrySpec{}.scaled(factor));
      const auto r = optimize(scaled, stats, cfg);
      ok = ok && r.best_swaps == results[name].best_swaps &&
           std::abs(r.per - results[name].per) <= 1e-9 &&
           rel_close(r.best_cost, results[name].best_cost * factor, 1e-9);
    }
    invariant += ok;
    if (!ok) {
      o.pass = false;
      o.detail += name + " not scale invariant; ";
    }
  }

  // (c) corpora built so their QWERTY totals are exactly linear in letters.
  const fs::path dir = fs::temp_directory_path() / "keyopt_acceptance_fit";
  fs::remove_all(dir);
  const std::string unit = "pack my box with five dozen liquor jugs";
  const oracle::Board board;
  const double per_unit = oracle::walk_qwerty(board, unit + " " + unit).total -
                          oracle::walk_qwerty(board, unit).total;
  const double expected_slope = per_unit / 32.0 / 10.0;  // 32 letters per unit, cm
  json manifest = {{"search", {{"swaps", 1}}},
                   {"ingest", {{"max_raw_chars", 1000000}}},
                   {"users", json::array()}};
  for (int k : {2, 5, 9, 14, 22, 35}) {
    std::string text;
    for (int i = 0; i < k; ++i) text += (i ? " " : "") + unit;
    const std::string id = "k" + std::to_string(k);
    cli::write_file(dir / (id + ".txt"), text + "\n");
    manifest["users"].push_back({{"id", id}, {"corpus", id + ".txt"}});
  }
  cli::write_file(dir / "manifest.json", manifest.dump());
  std::ostringstream log;
  double slope = std::numeric_limits<double>::quiet_NaN();
  if (cli::cmd_batch(cli::load_manifest(dir / "manifest.json", {}, [](const char*) {
                       return std::optional<std::string>{};
                     }),
                     log) == cli::kExitOk) {
    const auto agg = json::parse(cli::read_file(dir / "out" / "aggregate.json"));
    slope = agg.at("qwerty_fit").at("m").get<double>();
  }
  fs::remove_all(dir);
  const bool fit_ok = std::abs(slope - expected_slope) <= 1e-6;
  o.pass = o.pass && fit_ok;
  o.detail += std::to_string(pinned) + "/5 pinned, " + std::to_string(invariant) +
              "/5 scale invariant, fit slope " + fmt("%.9f", slope) + " vs " +
              fmt("%.9f cm/letter", expected_slope);
  return o;
}

// --- 9 ---------------------------------------------------------------------

Outcome batch_determinism() {
  const fs::path root = fs::temp_directory_path() / "keyopt_acceptance_batch";
  fs::remove_all(root);
  auto run = [&](const std::string& sub) {
    cli::FlagOverrides flags;
    flags.out_dir = root / sub;
    std::ostringstream log;
    return cli::cmd_batch(cli::load_manifest(kDataDir / "manifest.json", flags,
                                             [](const char*) { return std::optional<std::string>{}; }),
                          log);
  };
  auto tree = [](const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = cli::read_file(e.path());
    }
    return files;
  };
  Outcome o;
  const int first = run("first");
  const int second = run("second");
  const auto a = tree(root / "first");
  const auto b = tree(root / "second");
  fs::remove_all(root);
  o.pass = first == cli::kExitOk && second == cli::kExitOk && !a.empty() && a == b;
  o.detail = std::to_string(a.size()) + " files per run, " + (a == b ? "byte-identical" : "DIFFER");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"worked example walk", worked_example},
      {"published pair distances", geometry_golden_set},
      {"cost factorisation and delta", factorization},
      {"exhaustive search vs brute force", exhaustive_oracle},
      {"enumeration counts", enumeration_counts},
      {"canonical dominates triplets", dominance},
      {"performance and worker independence", performance},
      {"sample corpora, scale invariance, fit", population_substitutes},
      {"batch determinism", batch_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
