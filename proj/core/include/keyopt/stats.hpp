#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "keyopt/corpus.hpp"
#include "keyopt/geometry.hpp"

namespace keyopt {

/// Transition counts that fully determine a layout's cost.
///
/// `letter(a, b)` counts a immediately followed by b inside a word.
/// `space(a, b)` counts word-final a followed, across one space, by
/// word-initial b; column kEnd counts a space that ends the stream.
class BigramStats {
 public:
  static constexpr int kEnd = kLetterCount;
  using LetterMatrix = std::array<std::array<std::int64_t, kLetterCount>, kLetterCount>;
  using SpaceMatrix = std::array<std::array<std::int64_t, kLetterCount + 1>, kLetterCount>;

  BigramStats() = default;
  /// Throws on negative counts.
  BigramStats(const LetterMatrix& letter, const SpaceMatrix& space);

  std::int64_t letter(int a, int b) const { return letter_[a][b]; }
  std::int64_t space(int a, int b) const { return space_[a][b]; }
  const LetterMatrix& letter_matrix() const { return letter_; }
  const SpaceMatrix& space_matrix() const { return space_; }

  /// Segments a finger travels: one per letter pair, two per interior
  /// space, one for a stream-final space.
  std::int64_t total_transitions() const { return total_; }
  bool empty() const { return total_ == 0; }

  bool operator==(const BigramStats&) const = default;

 private:
  LetterMatrix letter_{};
  SpaceMatrix space_{};
  std::int64_t total_ = 0;
};

BigramStats count_bigrams(const KeySequence& seq);

void to_json(nlohmann::json& j, const BigramStats& stats);
BigramStats bigram_stats_from_json(const nlohmann::json& j);

/// Direction-sensitive key pair over {a..z, sp}.
struct PairKey {
  enum class Kind : std::uint8_t { LetterLetter, LetterSpace, SpaceLetter };
  Kind kind = Kind::LetterLetter;
  std::int8_t first = 0;   ///< letter for LetterLetter/LetterSpace, unused otherwise
  std::int8_t second = 0;  ///< letter for LetterLetter/SpaceLetter, unused otherwise

  /// "e-r", "e-sp", "sp-t".
  std::string label() const;
  auto operator<=>(const PairKey&) const = default;
};

struct PairUsage {
  PairKey key;
  std::string label;
  std::int64_t count = 0;
  double usage_pct = 0.0;
  double mean_distance_mm = 0.0;
};

/// Every pair with a nonzero count, most used first; equal usage ranks by
/// label. Throws for empty stats.
std::vector<PairUsage> pair_usage(const BigramStats& stats, const KeyboardGeometry& g,
                                  const Layout& layout);

/// Usage-weighted mean segment length of `key` under `layout`. For sp-y the
/// sub-key depends on each preceding word-final letter. Zero when unused.
double mean_pair_distance(const BigramStats& stats, const KeyboardGeometry& g,
                          const Layout& layout, const PairKey& key);

}  // namespace keyopt
