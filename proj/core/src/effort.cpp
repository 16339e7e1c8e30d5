#include "keyopt/effort.hpp"

#include <cmath>
#include <optional>

#include "keyopt/error.hpp"

namespace keyopt {

void EffortModel::validate() const {
  if (!(key_area > 0.0)) throw Error("effort model: key_area must be positive");
  if (kind == EffortKind::Fitts && !(fitts_beta > 0.0)) {
    throw Error("effort model: fitts_beta must be positive");
  }
}

void to_json(nlohmann::json& j, const EffortModel& model) {
  if (model.kind == EffortKind::Distance) {
    j = nlohmann::json{{"kind", "distance"}};
    return;
  }
  j = nlohmann::json{{"kind", "fitts"},
                     {"alpha", model.fitts_alpha},
                     {"beta", model.fitts_beta},
                     {"key_area", model.key_area}};
}

void from_json(const nlohmann::json& j, EffortModel& model) {
  EffortModel out;
  const auto kind = j.value("kind", std::string("distance"));
  if (kind == "distance") {
    out.kind = EffortKind::Distance;
  } else if (kind == "fitts") {
    out.kind = EffortKind::Fitts;
    out.fitts_alpha = j.value("alpha", out.fitts_alpha);
    out.fitts_beta = j.value("beta", out.fitts_beta);
    out.key_area = j.value("key_area", out.key_area);
  } else {
    throw Error("effort model: unknown kind '" + kind + "'");
  }
  out.validate();
  model = out;
}

double fitts_effort(double distance_mm, const EffortModel& model) {
  if (model.kind == EffortKind::Distance) return distance_mm;
  return model.fitts_alpha + model.fitts_beta * std::log2(distance_mm / model.key_area + 1.0);
}

CostBreakdown sequence_cost(const KeyboardGeometry& g, const Layout& layout,
                            const KeySequence& seq, const EffortModel& model) {
  model.validate();
  CostBreakdown out;
  auto add = [&](Slot from, Slot to) {
    const double d = g.distance(from, to);
    const double e = fitts_effort(d, model);
    out.per_segment.push_back({from, to, d, e});
    out.total += e;
  };

  const auto& tokens = seq.tokens();
  std::optional<Slot> at;  // where the finger currently rests
  for (auto t : tokens) {
    if (t == KeySequence::kSpace) {
      const Slot sp = g.nearest_space_slot(*at);
      add(*at, sp);
      at = sp;
      continue;
    }
    const Slot next = layout.slot_of(int{t});
    if (at) add(*at, next);
    at = next;
  }
  if (!out.per_segment.empty()) {
    out.avg_per_transition = out.total / static_cast<double>(out.per_segment.size());
  }
  return out;
}

double stats_cost(const KeyboardGeometry& g, const Layout& layout, const BigramStats& stats,
                  const EffortModel& model) {
  model.validate();
  double total = 0.0;
  for (int a = 0; a < kLetterCount; ++a) {
    const Slot sa = layout.slot_of(a);
    const Slot sp = g.nearest_space_slot(sa);
    const double up = fitts_effort(g.distance(sa, sp), model);
    for (int b = 0; b < kLetterCount; ++b) {
      const Slot sb = layout.slot_of(b);
      if (const auto f = stats.letter(a, b)) {
        total += static_cast<double>(f) * fitts_effort(g.distance(sa, sb), model);
      }
      if (const auto s = stats.space(a, b)) {
        total += static_cast<double>(s) * (up + fitts_effort(g.distance(sp, sb), model));
      }
    }
    if (const auto s = stats.space(a, BigramStats::kEnd)) {
      total += static_cast<double>(s) * up;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// DeltaEvaluator

DeltaEvaluator::DeltaEvaluator(const KeyboardGeometry& g, const Layout& base,
                               const BigramStats& stats, const EffortModel& model) {
  precompute(g, base, stats, model);
  base_cost_ = stats_cost(g, base, stats, model);
}

DeltaEvaluator::DeltaEvaluator(const KeyboardGeometry& g, const Layout& base, double base_cost,
                               const BigramStats& stats, const EffortModel& model) {
  precompute(g, base, stats, model);
  base_cost_ = base_cost;
}

void DeltaEvaluator::precompute(const KeyboardGeometry& g, const Layout& base,
                                const BigramStats& stats, const EffortModel& model) {
  model.validate();
  for (int s = 0; s < kSlotCount; ++s) {
    for (int t = 0; t < kSlotCount; ++t) {
      effort_[s][t] = fitts_effort(g.distance(Slot::from_index(s), Slot::from_index(t)), model);
    }
  }
  for (int s = 0; s < kLetterCount; ++s) {
    nearest_[s] = g.nearest_space_slot(Slot::letter_slot(s)).index();
    space_up_[s] = effort_[s][nearest_[s]];
  }
  for (int a = 0; a < kLetterCount; ++a) {
    pos_[a] = base.slot_of(a).index();
    word_final_[a] = 0.0;
    for (int b = 0; b < kLetterCount; ++b) {
      letter_[a][b] = static_cast<double>(stats.letter(a, b));
      space_[a][b] = static_cast<double>(stats.space(a, b));
      word_final_[a] += space_[a][b];
    }
    word_final_[a] += static_cast<double>(stats.space(a, BigramStats::kEnd));
  }
  for (int a = 0; a < kLetterCount; ++a) {
    for (int s = 0; s < kLetterCount; ++s) {
      double row = 0.0;
      double col = 0.0;
      for (int b = 0; b < kLetterCount; ++b) {
        row += pair_term(a, b, s, pos_[b]);
        col += pair_term(b, a, pos_[b], s);
      }
      row_at_[a][s] = row;
      col_at_[a][s] = col;
    }
  }
}

double DeltaEvaluator::evaluate(const LetterPair* pairs, int count) const {
  // Moved letters with their old and new slots.
  std::array<int, 6> m{};
  std::array<int, 6> from{};
  std::array<int, 6> to{};
  int n = 0;
  for (int i = 0; i < count; ++i) {
    const int a = pairs[i].first;
    const int b = pairs[i].second;
    m[n] = a, from[n] = pos_[a], to[n] = pos_[b], ++n;
    m[n] = b, from[n] = pos_[b], to[n] = pos_[a], ++n;
  }
  if (n == 0) return base_cost_;

  // Terms touching a moved letter: every row of a moved letter plus the
  // moved columns of unmoved rows. Row/column sums are taken over all
  // letters at base positions and corrected on the moved x moved block.
  double removed = 0.0;
  double added = 0.0;
  for (int i = 0; i < n; ++i) {
    removed += row_at_[m[i]][from[i]] + col_at_[m[i]][from[i]] +
               word_final_[m[i]] * space_up_[from[i]];
    added += row_at_[m[i]][to[i]] + col_at_[m[i]][to[i]] + word_final_[m[i]] * space_up_[to[i]];
    for (int j = 0; j < n; ++j) {
      removed -= pair_term(m[i], m[j], from[i], from[j]);
      added += pair_term(m[i], m[j], to[i], to[j]) - pair_term(m[i], m[j], to[i], from[j]) -
               pair_term(m[i], m[j], from[i], to[j]);
    }
  }
  return base_cost_ - removed + added;
}

double DeltaEvaluator::evaluate(const SwapSet& swaps) const {
  if (!swaps.is_disjoint()) throw Error("delta_cost: swap pairs overlap");
  return evaluate(swaps.pairs().data(), static_cast<int>(swaps.size()));
}

double delta_cost(const KeyboardGeometry& g, const Layout& base, double base_cost,
                  const BigramStats& stats, const SwapSet& swaps, const EffortModel& model) {
  return DeltaEvaluator(g, base, base_cost, stats, model).evaluate(swaps);
}

}  // namespace keyopt
