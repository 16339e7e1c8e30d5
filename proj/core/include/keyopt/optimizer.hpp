#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "keyopt/effort.hpp"
#include "keyopt/geometry.hpp"
#include "keyopt/stats.hpp"

namespace keyopt {

enum class SearchMode {
  /// Every set of n disjoint transpositions, each exactly once.
  Canonical,
  /// Sorted letter triplets paired position-wise (n = 3 only).
  Triplets,
};

std::string to_string(SearchMode mode);
SearchMode parse_search_mode(std::string_view text);

struct SearchConfig {
  int n_swap_pairs = 3;
  SearchMode mode = SearchMode::Canonical;
  /// Also admit 0..n-1 pairs, so the result never loses to QWERTY.
  bool cumulative = false;
  unsigned workers = 1;
  EffortModel model;

  void validate() const;
};

struct EnumerationCount {
  /// Candidates before any filtering (the ordered triplet pairs in
  /// Triplets mode; equal to `emitted` in Canonical mode).
  std::uint64_t raw = 0;
  std::uint64_t emitted = 0;
};

/// Streams SwapSets in canonical lexicographic order (Canonical) or in
/// triplet order (Triplets). Throws for n outside 1..3 or for
/// Triplets with n != 3.
EnumerationCount enumerate_swapsets(int n, SearchMode mode,
                                    const std::function<void(const SwapSet&)>& visit);

/// Closed-form counts, without enumerating.
EnumerationCount expected_enumeration_count(int n, SearchMode mode);

struct OptimizationResult {
  SwapSet best_swaps;
  double qwerty_cost = 0.0;
  double best_cost = 0.0;
  double per = 0.0;
  std::uint64_t candidates_evaluated = 0;
  std::uint64_t raw_candidates = 0;
  SearchMode mode = SearchMode::Canonical;
  int n_swap_pairs = 3;
  bool cumulative = false;
  EffortModel model;
  /// Left empty unless the caller asks for timing; keeps output reproducible.
  std::optional<double> wall_time_s;
};

/// Exhaustive search from QWERTY. Costs within 1e-10 (relative to the
/// QWERTY cost) of the minimum are ties, and ties go to the smallest
/// SwapSet in canonical order, independent of `cfg.workers`.
OptimizationResult optimize(const KeyboardGeometry& g, const BigramStats& stats,
                            const SearchConfig& cfg);

/// Recomputes both costs and PER from scratch and checks the SwapSet is
/// canonical; true iff everything agrees to 1e-9 relative.
bool verify_result(const KeyboardGeometry& g, const BigramStats& stats,
                   const OptimizationResult& result);

void to_json(nlohmann::json& j, const OptimizationResult& result);
OptimizationResult optimization_result_from_json(const nlohmann::json& j);

}  // namespace keyopt
