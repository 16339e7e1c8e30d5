#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "keyopt/corpus.hpp"
#include "keyopt/geometry.hpp"
#include "keyopt/stats.hpp"

namespace keyopt {

enum class EffortKind { Distance, Fitts };

/// Per-segment effort. Distance uses the key-to-key length directly;
/// Fitts maps a length d to alpha + beta * log2(d / key_area + 1).
struct EffortModel {
  EffortKind kind = EffortKind::Distance;
  double fitts_alpha = 0.0;
  double fitts_beta = 1.0;
  double key_area = 4.76 * 6.26;  ///< mm^2

  void validate() const;
  bool operator==(const EffortModel&) const = default;
};

void to_json(nlohmann::json& j, const EffortModel& model);
void from_json(const nlohmann::json& j, EffortModel& model);

double fitts_effort(double distance_mm, const EffortModel& model);

struct Segment {
  Slot from;
  Slot to;
  double length_mm = 0.0;
  double effort = 0.0;
};

struct CostBreakdown {
  double total = 0.0;
  std::vector<Segment> per_segment;
  double avg_per_transition = 0.0;
};

/// Walks the key sequence token by token. A space after letter a is typed
/// on the sub-key nearest a's slot, and the next letter starts from there.
CostBreakdown sequence_cost(const KeyboardGeometry& g, const Layout& layout,
                            const KeySequence& seq, const EffortModel& model = {});

/// Same sum as sequence_cost, regrouped over transition counts.
double stats_cost(const KeyboardGeometry& g, const Layout& layout, const BigramStats& stats,
                  const EffortModel& model = {});

/// Incremental evaluator for layouts a few transpositions away from a base.
///
/// Holds per-letter partial sums for the base layout so that a candidate
/// moving m letters costs O(m^2) work and no allocation. Immutable after
/// construction; evaluate() may be called concurrently.
class DeltaEvaluator {
 public:
  DeltaEvaluator(const KeyboardGeometry& g, const Layout& base, const BigramStats& stats,
                 const EffortModel& model = {});
  /// Uses a caller-supplied base cost instead of recomputing it.
  DeltaEvaluator(const KeyboardGeometry& g, const Layout& base, double base_cost,
                 const BigramStats& stats, const EffortModel& model = {});

  double base_cost() const { return base_cost_; }

  /// Cost of `base` with `count` disjoint transpositions applied.
  double evaluate(const LetterPair* pairs, int count) const;
  double evaluate(const SwapSet& swaps) const;

 private:
  void precompute(const KeyboardGeometry& g, const Layout& base, const BigramStats& stats,
                  const EffortModel& model);

  double pair_term(int a, int b, int from_slot, int to_slot) const {
    return letter_[a][b] * effort_[from_slot][to_slot] +
           space_[a][b] * effort_[nearest_[from_slot]][to_slot];
  }

  // Slot-indexed effort table and nearest sub-key for each letter slot.
  std::array<std::array<double, kSlotCount>, kSlotCount> effort_{};
  std::array<int, kLetterCount> nearest_{};
  std::array<double, kLetterCount> space_up_{};

  std::array<std::array<double, kLetterCount>, kLetterCount> letter_{};
  std::array<std::array<double, kLetterCount>, kLetterCount> space_{};
  std::array<double, kLetterCount> word_final_{};

  std::array<int, kLetterCount> pos_{};
  // row_at_[a][s]: all terms leaving letter a if a sat at slot s.
  // col_at_[b][s]: all terms entering letter b if b sat at slot s.
  std::array<std::array<double, kLetterCount>, kLetterCount> row_at_{};
  std::array<std::array<double, kLetterCount>, kLetterCount> col_at_{};
  double base_cost_ = 0.0;
};

/// Cost of apply_swaps(base, swaps), given base_cost = stats_cost(base).
double delta_cost(const KeyboardGeometry& g, const Layout& base, double base_cost,
                  const BigramStats& stats, const SwapSet& swaps,
                  const EffortModel& model = {});

}  // namespace keyopt
